"""Monte-Carlo experiment runner.

Trials are embarrassingly parallel: every trial owns a counter-based
substream keyed by (seed, 16 + trial_index), workers fill a per-trial result
slot, and reduction walks the slots in index order, so every reported number
except wall-clock time is independent of the worker count and of scheduling.
The pilot pool (stream 0) and the reference-signal codebook (stream 1) are
generated once per sweep point and shared by all trials of that point.
"""

import csv
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .combining import demod_qpsk, dwe_weights, ls_channel_estimate, zf_weights
from .detectors import (
    DetectionResult,
    detect_bomp,
    detect_fpr,
    detect_pdrs_dwe,
    fpr_gram_pinv,
    oracle_support,
)
from .linalg import pinv
from .metrics import (
    TrialMetrics,
    complexity_model,
    detection_metrics,
    post_sinr,
    symbol_errors,
)
from .rng import RngStream, cgauss
from .scenario import (
    PdrsCodebook,
    PilotPool,
    ReceivedFrame,
    SystemConfig,
    assemble_frame,
    gen_pdrs_codebook,
    gen_pilot_pool,
    sample_activity,
)

__all__ = [
    "CSV_HEADER",
    "DETECTORS",
    "POOL_STREAM",
    "CODEBOOK_STREAM",
    "TRIAL_STREAM_BASE",
    "SweepSpec",
    "ResultRow",
    "LemmaReport",
    "worker_count",
    "parse_config",
    "run_trial",
    "run_point",
    "run_sweep",
    "emit_csv",
    "lemma_check",
]

#: Detector names accepted by the harness.  The suffix selects the combiner:
#: "pdrs" reads weights out directly, "-lszf" variants and the baselines
#: estimate the channel by least squares and zero-force it.
DETECTORS = ("pdrs", "pdrs-lszf", "bomp", "fpr", "oracle", "oracle-dwe")

#: Which closed-form complexity model covers each detector's detection stage.
_MODEL_OF = {
    "pdrs": "pdrs",
    "pdrs-lszf": "pdrs",
    "bomp": "bomp",
    "fpr": "fpr",
    "oracle": "oracle",
    "oracle-dwe": "oracle",
}

POOL_STREAM = 0
CODEBOOK_STREAM = 1
TRIAL_STREAM_BASE = 16

CSV_HEADER = (
    "sweep_var,sweep_value,snr_db,K,L,N,M,l,zeta,detector,trials,"
    "miss_rate,false_pos_rate,ser,mean_post_sinr_db,"
    "modeled_mults,counted_mults,wall_clock_ms,seed"
)

SWEEP_VARS = ("snr_db", "K", "l", "alpha")


def worker_count() -> int:
    """Trial workers: cpu count capped by the PDRS_THREADS environment variable."""
    n = os.cpu_count() or 1
    cap = os.environ.get("PDRS_THREADS", "")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ValueError(f"PDRS_THREADS must be an integer, got {cap!r}") from None
    return max(1, n)


@dataclass
class SweepSpec:
    """One experiment: a base config, a variable to sweep, and detectors."""

    base: SystemConfig
    variable: str
    values: list
    detectors: list[str] = field(default_factory=lambda: ["pdrs"])

    def __post_init__(self):
        if self.variable not in SWEEP_VARS:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARS}, got {self.variable!r}")
        if not self.values:
            raise ValueError("sweep values must be nonempty")
        if not self.detectors:
            raise ValueError("detector list must be nonempty")
        for d in self.detectors:
            if d not in DETECTORS:
                raise ValueError(f"unknown detector {d!r}, choose from {DETECTORS}")
        for v in self.values:
            self.config_at(v)

    def config_at(self, value) -> SystemConfig:
        """Base config with the sweep variable applied; K sweeps keep alpha."""
        base = self.base
        if self.variable == "snr_db":
            return replace(base, snr_db=float(value))
        if self.variable == "K":
            k = int(value)
            return replace(base, K=k, zeta=int(round(base.alpha * k)))
        if self.variable == "l":
            return replace(base, l=int(value))
        return replace(base, zeta=int(round(float(value) * base.K)))


@dataclass
class ResultRow:
    """One aggregated line of the sweep CSV."""

    sweep_var: str
    sweep_value: float
    snr_db: float
    K: int
    L: int
    N: int
    M: int
    l: int
    zeta: int
    detector: str
    trials: int
    miss_rate: float
    false_pos_rate: float
    ser: float
    mean_post_sinr_db: float
    modeled_mults: int
    counted_mults: int
    wall_clock_ms: float
    seed: int

    def csv_line(self) -> str:
        parts = []
        for f in fields(self):
            v = getattr(self, f.name)
            parts.append(f"{v:.6g}" if isinstance(v, float) else str(v))
        return ",".join(parts)


def parse_config(path: str | Path) -> SystemConfig:
    """Read key = value lines (# comments) into a SystemConfig."""
    known = {f.name for f in fields(SystemConfig)}
    overrides: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        if key == "pdrs_mode":
            overrides[key] = val
        elif key == "snr_db":
            overrides[key] = float(val)
        else:
            overrides[key] = int(val)
    return SystemConfig(**overrides)


def _run_one_detector(
    name: str,
    frame: ReceivedFrame,
    pool: PilotPool,
    codebook: PdrsCodebook,
    cfg: SystemConfig,
    gram_pinv: np.ndarray | None,
) -> TrialMetrics:
    t0 = time.perf_counter()
    if name in ("pdrs", "pdrs-lszf"):
        res = detect_pdrs_dwe(frame, pool, codebook, cfg.zeta, cfg.svd_cost)
    elif name == "bomp":
        res = detect_bomp(frame, pool, cfg.zeta, cfg.svd_cost)
    elif name == "fpr":
        if gram_pinv is None:
            raise ValueError("fpr requires the precomputed Gram pseudo-inverse")
        res = detect_fpr(frame, pool, cfg.zeta, gram_pinv)
    elif name in ("oracle", "oracle-dwe"):
        res = oracle_support(frame)
    else:
        raise ValueError(f"unknown detector {name!r}")

    if name in ("pdrs", "oracle-dwe"):
        weights = dwe_weights(frame, pool, res.detected, y_pinv=res.y_pinv)
    else:
        h_est = ls_channel_estimate(frame, pool, res.detected)
        weights = zf_weights(h_est, res.detected)

    truth = frame.ground_truth
    m = detection_metrics(res, truth)
    tp_mask = np.isin(res.detected, truth.active, assume_unique=True)
    tp_users = res.detected[tp_mask]
    if frame.Y_D.shape[1] and tp_users.size:
        decided = demod_qpsk(weights.apply(frame.Y_D)[tp_mask])
        sent_rows = np.searchsorted(truth.active, tp_users)
        if frame.X_D is not None:
            m.sym_errors = symbol_errors(decided, frame.X_D[sent_rows])
            m.sym_total = decided.size
    if frame.H is not None and tp_users.size:
        m.post_sinr_db = post_sinr(
            weights.W[tp_mask], tp_users, frame.H, truth.active, frame.sigma2
        )
    m.mult_count = res.mults
    m.real_mults = res.real_mults
    m.wall_ms = (time.perf_counter() - t0) * 1e3
    return m


def run_trial(
    cfg: SystemConfig,
    pool: PilotPool,
    codebook: PdrsCodebook,
    gram_pinv: np.ndarray | None,
    trial_index: int,
    detectors: list[str],
) -> dict[str, TrialMetrics]:
    """Assemble one frame and score every requested detector on it.

    The frame depends only on (cfg.seed, trial_index), never on the detector
    list, so adding a detector to a sweep does not move any other detector's
    numbers.
    """
    rng = RngStream(cfg.seed, TRIAL_STREAM_BASE + trial_index)
    activity = sample_activity(cfg, rng)
    frame = assemble_frame(cfg, pool, codebook, activity, rng)
    out: dict[str, TrialMetrics] = {}
    for name in detectors:
        try:
            out[name] = _run_one_detector(name, frame, pool, codebook, cfg, gram_pinv)
        except Exception as exc:
            raise RuntimeError(f"trial {trial_index}, detector {name}: {exc}") from exc
    return out


def _guarded_rate(count: int, samples: int) -> float:
    """Binomial point estimate, or nan when its standard error tops 50%.

    A rate whose standard error exceeds half the estimate carries no usable
    information, so it is withheld rather than reported.
    """
    if samples <= 0:
        return 0.0
    p = count / samples
    if p > 0.0 and math.sqrt(p * (1.0 - p) / samples) > 0.5 * p:
        return math.nan
    return p


def run_point(
    cfg: SystemConfig,
    detectors: list[str],
    sweep_var: str = "snr_db",
    sweep_value: float | None = None,
) -> list[ResultRow]:
    """Run cfg.trials Monte-Carlo trials at one sweep point.

    On a trial failure the point is abandoned: a diagnostic row with nan
    metrics is emitted per detector and the error goes to stderr.
    """
    if not detectors:
        raise ValueError("detector list must be nonempty")
    value = cfg.snr_db if sweep_value is None else sweep_value
    pool = gen_pilot_pool(cfg, RngStream(cfg.seed, POOL_STREAM))
    codebook = gen_pdrs_codebook(cfg, RngStream(cfg.seed, CODEBOOK_STREAM))
    gram_pinv = fpr_gram_pinv(pool) if "fpr" in detectors else None

    slots: list[dict[str, TrialMetrics] | None] = [None] * cfg.trials
    failure: Exception | None = None

    def work(i: int) -> None:
        slots[i] = run_trial(cfg, pool, codebook, gram_pinv, i, detectors)

    try:
        n_workers = worker_count()
        if n_workers == 1:
            for i in range(cfg.trials):
                work(i)
        else:
            with ThreadPoolExecutor(max_workers=n_workers) as pool_exec:
                futures = [pool_exec.submit(work, i) for i in range(cfg.trials)]
                try:
                    for fut in futures:
                        fut.result()
                except Exception:
                    for fut in futures:
                        fut.cancel()
                    raise
    except Exception as exc:
        failure = exc
        print(f"sweep point {sweep_var}={value}: {exc}", file=sys.stderr)

    rows = []
    for name in detectors:
        model = complexity_model(cfg, _MODEL_OF[name])
        if failure is None:
            per = [slot[name] for slot in slots]  # type: ignore[index]
            miss = sum(t.miss for t in per)
            fp = sum(t.false_pos for t in per)
            err = sum(t.sym_errors for t in per)
            tot = sum(t.sym_total for t in per)
            sinr_sum = sum(float(np.sum(t.post_sinr_db)) for t in per)
            sinr_n = sum(t.post_sinr_db.size for t in per)
            miss_rate = _guarded_rate(miss, cfg.trials * cfg.K)
            fp_rate = _guarded_rate(fp, cfg.trials * (cfg.N - cfg.K))
            ser = err / tot if tot else math.nan
            sinr = sinr_sum / sinr_n if sinr_n else math.nan
            counted = per[0].mult_count
            wall = sum(t.wall_ms for t in per) / len(per)
        else:
            miss_rate = fp_rate = ser = sinr = math.nan
            counted = 0
            wall = math.nan
        rows.append(
            ResultRow(
                sweep_var=sweep_var,
                sweep_value=float(value),
                snr_db=cfg.snr_db,
                K=cfg.K,
                L=cfg.L,
                N=cfg.N,
                M=cfg.M,
                l=cfg.l,
                zeta=cfg.zeta,
                detector=name,
                trials=cfg.trials,
                miss_rate=miss_rate,
                false_pos_rate=fp_rate,
                ser=ser,
                mean_post_sinr_db=sinr,
                modeled_mults=model.detect_mults,
                counted_mults=counted,
                wall_clock_ms=wall,
                seed=cfg.seed,
            )
        )
    return rows


def run_sweep(spec: SweepSpec) -> list[ResultRow]:
    """All sweep points, rows ordered by sweep value then detector name."""
    rows: list[ResultRow] = []
    for value in sorted(spec.values):
        cfg = spec.config_at(value)
        rows.extend(run_point(cfg, sorted(spec.detectors), spec.variable, float(value)))
    return rows


def emit_csv(rows: list[ResultRow], path: str | Path) -> None:
    """Write rows under the fixed header; floats carry 6 significant digits."""
    if not rows:
        raise ValueError("no rows to write")
    lines = [CSV_HEADER] + [r.csv_line() for r in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv(path: str | Path) -> list[dict]:
    """Parse an emitted CSV back into per-row dicts (strings preserved)."""
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@dataclass
class LemmaReport:
    """Worst relative errors of the three verification suites."""

    mp_worst: float
    noisy_equiv_worst: float
    noiseless_equiv_worst: float
    mp_tol: float
    equiv_tol: float
    instances: int

    @property
    def ok(self) -> bool:
        return (
            self.mp_worst <= self.mp_tol
            and self.noisy_equiv_worst <= self.equiv_tol
            and self.noiseless_equiv_worst <= self.equiv_tol
        )

    def lines(self) -> list[str]:
        def one(label: str, count: int, err: float, tol: float) -> str:
            verdict = "pass" if err <= tol else "FAIL"
            return f"{label} ({count} instances): worst {err:.3e} tol {tol:.0e} {verdict}"

        return [
            one("moore-penrose identities", 2 * self.instances, self.mp_worst, self.mp_tol),
            one(
                "weight equivalence, noisy detected sets",
                self.instances,
                self.noisy_equiv_worst,
                self.equiv_tol,
            ),
            one(
                "weight equivalence, noiseless oracle",
                self.instances,
                self.noiseless_equiv_worst,
                self.equiv_tol,
            ),
        ]


def _rel_fro(a: np.ndarray, b: np.ndarray) -> float:
    """Relative Frobenius distance of b from a (absolute when a is zero)."""
    ref = np.linalg.norm(a)
    return float(np.linalg.norm(a - b) / (ref if ref > 0 else 1.0))


def _mp_suite(count: int, seed: int) -> float:
    """Worst relative error over the four defining pseudo-inverse identities."""
    worst = 0.0
    for i in range(count):
        rng = RngStream(seed, 1000 + i)
        g = rng.gen
        m, n = (int(g.integers(1, 17)) for _ in range(2))
        r = int(g.integers(1, min(m, n) + 1))
        a = cgauss(m, r, 1.0, rng) @ cgauss(r, n, 1.0, rng)
        ap = pinv(a)
        aap, apa = a @ ap, ap @ a
        worst = max(
            worst,
            _rel_fro(a, a @ apa),
            _rel_fro(ap, apa @ ap),
            _rel_fro(aap, aap.conj().T),
            _rel_fro(apa, apa.conj().T),
        )
    return worst


def _weight_equiv_suite(count: int, seed: int, noisy: bool) -> float:
    """Worst relative gap between direct weights and the two-stage chain.

    Noisy instances use detected sets of size xi in [L, L+4] (full pilot row
    rank holds almost surely); noiseless instances use oracle detection with
    K in [2, L-1], where the two-stage chain inverts the estimated channel
    exactly.
    """
    M, L, N = 16, 8, 24
    worst = 0.0
    for i in range(count):
        rng = RngStream(seed, 2000 + i)
        g = rng.gen
        P = cgauss(N, L, 1.0, rng)
        H = cgauss(M, N, 1.0, rng)
        if noisy:
            xi = int(g.integers(L, L + 5))
            k = int(g.integers(1, N + 1))
        else:
            xi = k = int(g.integers(2, L))
        active = np.sort(g.choice(N, size=k, replace=False))
        Y = H[:, active] @ P[active]
        if noisy:
            Y = Y + cgauss(M, L, 10.0 ** (-1.0), rng)
            det = np.sort(g.choice(N, size=xi, replace=False))
        else:
            det = active
        P_det = P[det]
        if np.linalg.matrix_rank(P_det) < min(xi, L):
            continue
        direct = P_det @ pinv(Y)
        two_stage = pinv(Y @ pinv(P_det))
        worst = max(worst, _rel_fro(direct, two_stage))
    return worst


def lemma_check(
    iterations: int = 100,
    equiv_tol: float = 1e-8,
    mp_tol: float = 1e-9,
    seed: int = 1,
) -> LemmaReport:
    """Run the pseudo-inverse and weight-equivalence suites."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    return LemmaReport(
        mp_worst=_mp_suite(2 * iterations, seed),
        noisy_equiv_worst=_weight_equiv_suite(iterations, seed, noisy=True),
        noiseless_equiv_worst=_weight_equiv_suite(iterations, seed + 1, noisy=False),
        mp_tol=mp_tol,
        equiv_tol=equiv_tol,
        instances=iterations,
    )
