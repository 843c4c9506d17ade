"""
Numerical kernels for the regression ANOVA.

least_squares solves through a column-pivoted QR decomposition; the hat matrix and the
n x n matrices I and J are never formed. f_sf evaluates the F upper tail through the
regularized incomplete beta function (continued fraction), probit the standard normal
quantile.
"""

import math
from collections import namedtuple

import numpy as np
import scipy.linalg
import scipy.special

from . import config
from . import PerspectiveKitException

log = config.log

RANK_RTOL = 1e-10
BETACF_EPS = 1e-12
BETACF_MAX_ITER = 300
TINY = 1e-300


class NumericalError(PerspectiveKitException):
    pass


class RankDeficiencyError(NumericalError):

    def __init__(self, column, rank, columns, name=None):
        self.column = column
        self.rank = rank
        self.name = name
        super(RankDeficiencyError, self).__init__(
            'design matrix has rank {} < {}; column {} depends on the columns before it'.format(
                rank, columns, name or column))


class DomainError(NumericalError):
    pass


LeastSquares = namedtuple('LeastSquares', ['beta', 'fitted', 'rank', 'cov_unscaled'])


def _rank(r_factor, tol):
    return int(np.sum(np.abs(np.diag(r_factor)) > tol))


def least_squares(X, y):
    """
    Minimize ||y - X beta||^2.

    Returns beta, fitted values X beta, the numerical rank and (X'X)^-1 for standard
    errors. Rank is counted on the pivoted R diagonal with tolerance
    1e-10 * max column norm; a rank-deficient X raises RankDeficiencyError naming the
    first column that lies in the span of the columns before it.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise DomainError('X must be a matrix')
    n, p = X.shape
    if not n >= p >= 1:
        raise DomainError('least squares needs n >= p >= 1, got n={} p={}'.format(n, p))
    if y.shape != (n,):
        raise DomainError('y has shape {}, expected ({},)'.format(y.shape, n))
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DomainError('X and y must be finite')

    tol = RANK_RTOL * max(np.linalg.norm(X, axis=0).max(), TINY)
    Q, R, perm = scipy.linalg.qr(X, mode='economic', pivoting=True)
    rank = _rank(R, tol)
    if rank < p:
        for j in range(1, p + 1):
            if _rank(scipy.linalg.qr(X[:, :j], mode='r', pivoting=True)[0], tol) < j:
                raise RankDeficiencyError(j - 1, rank, p)
        raise RankDeficiencyError(p - 1, rank, p)

    beta = np.empty(p)
    beta[perm] = scipy.linalg.solve_triangular(R, Q.T @ y)
    r_inv = scipy.linalg.solve_triangular(R, np.eye(p))
    cov = np.empty((p, p))
    cov[np.ix_(perm, perm)] = r_inv @ r_inv.T
    return LeastSquares(beta=beta, fitted=X @ beta, rank=rank, cov_unscaled=cov)


def _betacf(a, b, x):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < TINY:
        d = TINY
    d = 1.0 / d
    h = d
    for m in range(1, BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < TINY:
            d = TINY
        c = 1.0 + aa / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < TINY:
            d = TINY
        c = 1.0 + aa / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < BETACF_EPS:
            return h
    raise NumericalError('incomplete beta continued fraction did not converge for a={} b={} x={}'.format(a, b, x))


def betai(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise DomainError('x must be in [0, 1], got {}'.format(x))
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_bt = a * math.log(x) + b * math.log1p(-x) - scipy.special.betaln(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_bt) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_bt) * _betacf(b, a, 1.0 - x) / b


def _check_f_args(f, d1, d2):
    if not (d1 > 0 and d2 > 0):
        raise DomainError('degrees of freedom must be positive, got {} and {}'.format(d1, d2))
    if math.isnan(f) or f < 0:
        raise DomainError('F must be >= 0, got {}'.format(f))


def f_sf(f, d1, d2):
    """Pr(F(d1, d2) > f) = I_{d2/(d2+d1 f)}(d2/2, d1/2)."""
    _check_f_args(f, d1, d2)
    if f == 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return min(1.0, max(0.0, betai(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))))


def f_cdf(f, d1, d2):
    """Pr(F(d1, d2) <= f), evaluated on the complementary beta argument."""
    _check_f_args(f, d1, d2)
    if f == 0:
        return 0.0
    if math.isinf(f):
        return 1.0
    return min(1.0, max(0.0, betai(d1 / 2.0, d2 / 2.0, d1 * f / (d1 * f + d2))))


def normal_cdf(z):
    return 0.5 * scipy.special.erfc(-z / math.sqrt(2.0))


# rational approximation coefficients for the normal quantile (relative error < 1.2e-9)
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _probit_rational(q):
    if q < _P_LOW:
        t = math.sqrt(-2.0 * math.log(q))
        return ((((( _C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]) / \
            ((((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0)
    if q > 1.0 - _P_LOW:
        return -_probit_rational(1.0 - q)
    s = q - 0.5
    r = s * s
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * s / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def probit(q):
    """Standard normal quantile: rational start, one Halley step on the erfc-based CDF."""
    if not 0.0 < q < 1.0:
        raise DomainError('probit needs 0 < q < 1, got {}'.format(q))
    x = _probit_rational(q)
    e = normal_cdf(x) - q
    u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)
