"""Activity detectors operating on one received frame.

All detectors return a sorted detected support of exactly ``zeta`` users
plus the per-user ranking scores and the exact multiplication tally of the
run.  Tie-breaking is deterministic: equal scores resolve to the lower user
index.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import col_norms_sq, residual_row_norms
from .linalg import pinv
from .metrics import MultCounter, matmul_mults, pinv_mults
from .scenario import PdrsCodebook, PilotPool, ReceivedFrame

__all__ = [
    "DetectionResult",
    "detect_pdrs_dwe",
    "detect_bomp",
    "detect_fpr",
    "fpr_gram_pinv",
    "oracle_support",
]


@dataclass
class DetectionResult:
    """Detected support (sorted), ranking scores, and the operation tally."""

    detected: np.ndarray
    scores: np.ndarray
    mults: int
    real_mults: int = 0
    y_pinv: np.ndarray | None = field(default=None, repr=False)


def _smallest(scores: np.ndarray, zeta: int) -> np.ndarray:
    """Indices of the zeta smallest scores, ties to the lower index."""
    order = np.argsort(scores, kind="stable")
    return np.sort(order[:zeta])


def _largest(scores: np.ndarray, zeta: int) -> np.ndarray:
    """Indices of the zeta largest scores, ties to the lower index."""
    order = np.argsort(-scores, kind="stable")
    return np.sort(order[:zeta])


def detect_pdrs_dwe(
    frame: ReceivedFrame,
    pool: PilotPool,
    codebook: PdrsCodebook,
    zeta: int,
    svd_cost: int = 4,
) -> DetectionResult:
    """Reference-signal reconstruction detector.

    The decorrelator seed ``T = pinv(Y) @ Y_R`` maps every candidate pilot to
    a reconstructed reference signal; active users reconstruct theirs almost
    exactly, so the zeta smallest residuals ``||p_n @ T - r_n||^2`` form the
    detected support.  The cached ``pinv(Y)`` is reusable for the weight
    read-out.
    """
    Y, Y_R = frame.Y, frame.Y_R
    M, L = Y.shape
    N, ell = codebook.R.shape
    if not 1 <= zeta <= N:
        raise ValueError(f"zeta must be in [1, {N}], got {zeta}")
    counter = MultCounter()

    y_pinv = pinv(Y)
    counter.add(pinv_mults(M, L, svd_cost))
    T = y_pinv @ Y_R
    counter.add(matmul_mults(L, M, ell))
    recon = pool.P @ T
    counter.add(matmul_mults(N, L, ell))
    scores = residual_row_norms(recon, codebook.R)
    counter.add(N * ell)

    scores = np.where(np.isfinite(scores), scores, np.inf)
    detected = _smallest(scores, zeta)
    return DetectionResult(detected, scores, counter.complex_mults, y_pinv=y_pinv)


def detect_bomp(
    frame: ReceivedFrame,
    pool: PilotPool,
    zeta: int,
    svd_cost: int = 4,
) -> DetectionResult:
    """Block orthogonal matching pursuit over pilot blocks.

    Each of the zeta iterations correlates the running residual with every
    pilot, admits the strongest unselected user, and deflates the residual by
    the least-squares fit of the selected pilots.
    """
    Y = frame.Y
    M, L = Y.shape
    N = pool.n_pilots
    if not 1 <= zeta <= N:
        raise ValueError(f"zeta must be in [1, {N}], got {zeta}")
    counter = MultCounter()
    P_h = pool.P.conj().T

    Z = Y
    selected: list[int] = []
    scores = np.zeros(N, dtype=np.float64)
    for _ in range(zeta):
        C = Z @ P_h
        counter.add(matmul_mults(M, L, N))
        power = col_norms_sq(C)
        counter.add(M * N)
        power = np.where(np.isfinite(power), power, -np.inf)
        if selected:
            power[selected] = -np.inf
        best = int(np.argmax(power))
        scores[best] = power[best]
        selected.append(best)

        t = len(selected)
        Ps = pool.P[selected]
        Ps_pinv = pinv(Ps)
        counter.add(pinv_mults(L, t, svd_cost))
        Hs = Y @ Ps_pinv
        counter.add(matmul_mults(M, L, t))
        Z = Y - Hs @ Ps
        counter.add(matmul_mults(M, t, L))
    detected = np.sort(np.asarray(selected, dtype=np.int64))
    return DetectionResult(detected, scores, counter.complex_mults)


def fpr_gram_pinv(pool: PilotPool, rel_tol: float | None = None) -> np.ndarray:
    """Pseudo-inverse of the squared-modulus pilot Gram matrix.

    One-time precomputation per pilot pool; the per-frame ledger charges only
    its application.
    """
    G = np.abs(pool.P @ pool.P.conj().T) ** 2
    return np.ascontiguousarray(pinv(G, rel_tol=rel_tol).real)


def detect_fpr(
    frame: ReceivedFrame,
    pool: PilotPool,
    zeta: int,
    gram_pinv: np.ndarray,
) -> DetectionResult:
    """Matched-filter power recovery detector.

    Matched filtering gives per-user powers contaminated by pilot
    cross-correlations; multiplying by the precomputed Gram pseudo-inverse
    unmixes them, and the zeta largest recovered powers form the support.
    The unmixing solve is real-valued and tallied separately.
    """
    Y = frame.Y
    M, L = Y.shape
    N = pool.n_pilots
    if not 1 <= zeta <= N:
        raise ValueError(f"zeta must be in [1, {N}], got {zeta}")
    if gram_pinv.shape != (N, N):
        raise ValueError(f"gram_pinv must be {N}x{N}, got {gram_pinv.shape}")
    counter = MultCounter()

    H_mf = Y @ pool.P.conj().T
    counter.add(matmul_mults(M, L, N))
    p_mf = col_norms_sq(H_mf)
    counter.add(M * N)
    p_rec = gram_pinv @ p_mf
    counter.add_real(N * N)

    scores = np.where(np.isfinite(p_rec), p_rec, -np.inf)
    detected = _largest(scores, zeta)
    return DetectionResult(detected, scores, counter.complex_mults, real_mults=counter.real_mults)


def oracle_support(frame: ReceivedFrame) -> DetectionResult:
    """Genie detector: returns the true support at zero cost."""
    truth = frame.ground_truth
    return DetectionResult(truth.active.copy(), truth.flags().astype(np.float64), 0)
