"""Binary frame container.

Layout (little-endian): the 8-byte magic ``PDRSFRM1``; six u32 fields
M, N, L, l, D, K; one f64 noise variance; then the matrices Y_R (M x l),
Y (M x L), Y_D (M x D), P (N x L), R (N x l), each stored row-major as
(real, imag) f64 pairs; finally the K sorted active user indices as u32.
The container carries everything a detector needs plus the true support,
but not the channel or transmitted data symbols.
"""

import struct
from pathlib import Path

import numpy as np

from .scenario import ActivityPattern, PdrsCodebook, PilotPool, ReceivedFrame

__all__ = ["MAGIC", "save_frame", "load_frame"]

MAGIC = b"PDRSFRM1"

_HEADER = struct.Struct("<6Id")


def _write_cmatrix(out: list[bytes], a: np.ndarray) -> None:
    out.append(np.ascontiguousarray(a, dtype=np.complex128).view(np.float64).tobytes())


def _read_cmatrix(buf: memoryview, offset: int, rows: int, cols: int) -> tuple[np.ndarray, int]:
    count = 2 * rows * cols
    end = offset + 8 * count
    if end > len(buf):
        raise ValueError("frame file truncated inside a matrix block")
    flat = np.frombuffer(buf[offset:end], dtype=np.float64)
    return flat.view(np.complex128).reshape(rows, cols).copy(), end


def save_frame(
    path: str | Path,
    frame: ReceivedFrame,
    pool: PilotPool,
    codebook: PdrsCodebook,
) -> None:
    """Serialize one frame plus the pool and codebook that produced it."""
    M = frame.M
    N = pool.n_pilots
    L = pool.length
    ell = codebook.length
    D = frame.Y_D.shape[1]
    K = frame.ground_truth.K
    if frame.Y.shape != (M, L) or frame.Y_R.shape != (M, ell):
        raise ValueError("frame blocks are inconsistent with the pool/codebook dimensions")
    if frame.ground_truth.n_pilots != N:
        raise ValueError("ground truth refers to a different pool size")

    out: list[bytes] = [MAGIC, _HEADER.pack(M, N, L, ell, D, K, frame.sigma2)]
    _write_cmatrix(out, frame.Y_R)
    _write_cmatrix(out, frame.Y)
    _write_cmatrix(out, frame.Y_D)
    _write_cmatrix(out, pool.P)
    _write_cmatrix(out, codebook.R)
    out.append(frame.ground_truth.active.astype(np.uint32).tobytes())
    Path(path).write_bytes(b"".join(out))


def load_frame(path: str | Path) -> tuple[ReceivedFrame, PilotPool, PdrsCodebook]:
    """Read a frame container; raises ValueError on a bad magic or size."""
    raw = Path(path).read_bytes()
    if len(raw) < len(MAGIC) + _HEADER.size:
        raise ValueError(f"{path}: too short to be a frame container")
    if raw[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path}: bad magic {raw[:len(MAGIC)]!r}, expected {MAGIC!r}")
    M, N, L, ell, D, K, sigma2 = _HEADER.unpack_from(raw, len(MAGIC))

    buf = memoryview(raw)
    off = len(MAGIC) + _HEADER.size
    Y_R, off = _read_cmatrix(buf, off, M, ell)
    Y, off = _read_cmatrix(buf, off, M, L)
    Y_D, off = _read_cmatrix(buf, off, M, D)
    P, off = _read_cmatrix(buf, off, N, L)
    R, off = _read_cmatrix(buf, off, N, ell)
    end = off + 4 * K
    if end != len(raw):
        raise ValueError(f"{path}: size mismatch, expected {end} bytes, file has {len(raw)}")
    active = np.frombuffer(buf[off:end], dtype=np.uint32).astype(np.int64)

    pattern = ActivityPattern(active, N)
    frame = ReceivedFrame(Y_R=Y_R, Y=Y, Y_D=Y_D, ground_truth=pattern, sigma2=sigma2)
    return frame, PilotPool(P), PdrsCodebook(R)
