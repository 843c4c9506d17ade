#!/usr/bin/env python

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '..'))

from perspectivekit import cli  # noqa: E402

sys.exit(cli.main())
