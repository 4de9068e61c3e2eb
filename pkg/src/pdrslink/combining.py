"""Receive combining and data recovery for a detected support.

Two combiner families are provided: the decorrelating weight read-out, which
derives each detected user's weight row directly from its pilot and the
pseudo-inverse of the pilot block, and the conventional two-stage chain that
first estimates the channel by least squares and then zero-forces it.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import qpsk_decide
from .linalg import pinv
from .scenario import PilotPool, ReceivedFrame

__all__ = [
    "WeightMatrix",
    "dwe_weights",
    "ls_channel_estimate",
    "zf_weights",
    "demod_qpsk",
]


@dataclass
class WeightMatrix:
    """Combining weights; row i recovers the stream of ``users[i]``."""

    W: np.ndarray
    users: np.ndarray

    def __post_init__(self):
        self.users = np.asarray(self.users, dtype=np.int64)
        if self.W.shape[0] != self.users.size:
            raise ValueError("one weight row per user is required")

    def apply(self, Y_D: np.ndarray) -> np.ndarray:
        """Recovered data-symbol estimates, one row per detected user."""
        return self.W @ Y_D


def dwe_weights(
    frame: ReceivedFrame,
    pool: PilotPool,
    detected: np.ndarray,
    y_pinv: np.ndarray | None = None,
) -> WeightMatrix:
    """Decorrelating weight read-out ``w_n = p_n @ pinv(Y)``.

    Each row depends only on that user's pilot and on ``pinv(Y)``, so the
    weights for a user are identical no matter which other users were
    detected alongside it.  The row-by-row products preserve that
    independence bitwise.  ``y_pinv`` accepts the pseudo-inverse already
    computed during detection.
    """
    detected = np.asarray(detected, dtype=np.int64)
    if y_pinv is None:
        y_pinv = pinv(frame.Y)
    W = np.empty((detected.size, frame.M), dtype=np.complex128)
    for i, n in enumerate(detected):
        W[i] = pool.P[n] @ y_pinv
    return WeightMatrix(W, detected)


def ls_channel_estimate(frame: ReceivedFrame, pool: PilotPool, detected: np.ndarray) -> np.ndarray:
    """Least-squares channel estimate ``Y @ pinv(P_detected)`` (M x zeta)."""
    detected = np.asarray(detected, dtype=np.int64)
    return frame.Y @ pinv(pool.P[detected])


def zf_weights(h_est: np.ndarray, users: np.ndarray) -> WeightMatrix:
    """Zero-forcing combiner ``pinv(h_est)`` for an estimated channel."""
    return WeightMatrix(pinv(h_est), users)


def demod_qpsk(x_est: np.ndarray) -> np.ndarray:
    """Minimum-distance hard decisions onto the unit-power QPSK grid.

    Decisions depend only on the signs of the real and imaginary parts; a
    zero part decides to the positive rail.
    """
    return qpsk_decide(np.ascontiguousarray(x_est, dtype=np.complex128))
