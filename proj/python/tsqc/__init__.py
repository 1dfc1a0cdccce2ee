"""Photon-level simulator and analytics for threshold quantum cryptography.

The compiled extension carries the full surface: polarization optics, the
three-stage protocol with intensity checkpoints, siphoning-attack models,
closed-form security analytics and the seeded experiment harness.
"""

from ._tsqc import *  # noqa: F401,F403
from ._tsqc import __version__  # noqa: F401
