"""Perspective Scores as high-level features for hate speech datasets."""

__version__ = '0.3.0'


class PerspectiveKitException(Exception):
    pass
