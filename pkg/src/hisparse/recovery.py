"""Hierarchical and flat thresholding solvers, OMP, and guarantee calculators.

All solvers share the same gradient-descent loop with unit step:

    x_temp = x + A^H (y - A x)

and differ in how they pick a support from x_temp (hierarchical or flat
selection) and how they form the next estimate (hard projection or
restricted least squares). Iteration stops when the selected support
repeats or after max_iters passes.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .blocks import (
    BlockShape,
    DimensionError,
    MultiLevelVector,
    SparsityProfile,
    hi_threshold,
)

HI_ALGORITHMS = ("HiIHT", "HiHTP")
FLAT_ALGORITHMS = ("IHT", "HTP", "OMP")
DENSE_LS_MAX_SUPPORT = 1024


class GuaranteeVoidError(ValueError):
    """Requested constants lie outside the regime where the guarantee holds."""


@dataclass
class RecoveryConfig:
    algorithm: str = "HiIHT"
    profile: SparsityProfile | None = None
    max_iters: int = 10
    ls_tolerance: float = 1e-10
    ls_max_iters: int = 200
    flat_k: int | None = None

    def __post_init__(self):
        if self.algorithm not in HI_ALGORITHMS + FLAT_ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def sparsity(self, shape: BlockShape) -> int:
        """Flat selection size: explicit flat_k, else the profile product."""
        if self.flat_k is not None:
            return min(self.flat_k, shape.total)
        if self.profile is None:
            raise ValueError("config needs a profile or flat_k")
        return min(self.profile.clip(shape).max_support, shape.total)


@dataclass
class RecoveryResult:
    x_hat: MultiLevelVector
    support: np.ndarray
    iterations: int
    residual_norm: float
    error_trace: list[float] | None = None
    ls_converged: bool = True

    def to_json_dict(self) -> dict:
        doc = {
            "support": [int(i) for i in self.support],
            "iterations": self.iterations,
            "residual_norm": self.residual_norm,
            "ls_converged": self.ls_converged,
        }
        if self.error_trace is not None:
            doc["error_trace"] = [float(e) for e in self.error_trace]
        return doc


def _check_measurement(y, op) -> np.ndarray:
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (op.out_dim,):
        raise DimensionError(f"measurement length {y.shape} != {op.out_dim}")
    if not np.all(np.isfinite(y.view(np.float64))):
        raise ValueError("measurement contains non-finite entries")
    return y


def _materialize_columns(op, support: np.ndarray) -> np.ndarray:
    cols = np.empty((op.out_dim, support.size), dtype=np.complex128)
    e = np.zeros(op.shape_in.total, dtype=np.complex128)
    for j, idx in enumerate(support):
        e[idx] = 1.0
        cols[:, j] = op.forward(e)
        e[idx] = 0.0
    return cols


def _restricted_lstsq(y, op, support, cfg):
    """argmin over vectors supported on ``support`` of ||y - A x||.

    Dense QR for supports up to DENSE_LS_MAX_SUPPORT columns; conjugate
    gradient on the normal equations beyond that. Returns (coefficients,
    converged flag).
    """
    if support.size == 0:
        return np.zeros(0, dtype=np.complex128), True
    if support.size <= DENSE_LS_MAX_SUPPORT:
        cols = _materialize_columns(op, support)
        beta, *_ = np.linalg.lstsq(cols, y, rcond=None)
        return beta, True

    def apply_sub(b):
        x = np.zeros(op.shape_in.total, dtype=np.complex128)
        x[support] = b
        return op.forward(x)

    def apply_sub_adj(r):
        return op.adjoint_values(r)[support]

    beta = np.zeros(support.size, dtype=np.complex128)
    r = apply_sub_adj(y)
    p = r.copy()
    rs = np.vdot(r, r).real
    converged = False
    for _ in range(cfg.ls_max_iters):
        if math.sqrt(rs) <= cfg.ls_tolerance * max(1.0, float(np.linalg.norm(y))):
            converged = True
            break
        Ap = apply_sub_adj(apply_sub(p))
        alpha = rs / np.vdot(p, Ap).real
        beta = beta + alpha * p
        r = r - alpha * Ap
        rs_new = np.vdot(r, r).real
        p = r + (rs_new / rs) * p
        rs = rs_new
    else:
        converged = math.sqrt(rs) <= cfg.ls_tolerance * max(1.0, float(np.linalg.norm(y)))
    return beta, converged


def _flat_select(values: np.ndarray, k: int) -> np.ndarray:
    mag = values.real**2 + values.imag**2
    if k >= mag.size:
        return np.flatnonzero(mag > 0.0)
    order = np.argsort(-mag, kind="stable")
    keep = np.sort(order[:k])
    return keep[mag[keep] > 0.0]


def _threshold_loop(y, op, cfg, hierarchical: bool, pursuit: bool, x_true=None):
    y = _check_measurement(y, op)
    shape = op.shape_in
    if hierarchical:
        profile = cfg.profile.clip(shape)
    else:
        k = cfg.sparsity(shape)
    x = np.zeros(shape.total, dtype=np.complex128)
    trace = [] if x_true is not None else None
    prev_support = None
    ls_ok = True
    iterations = 0
    for i in range(1, cfg.max_iters + 1):
        iterations = i
        x_temp = x + op.adjoint_values(y - op.forward(x))
        if hierarchical:
            support = hi_threshold(MultiLevelVector(shape, x_temp), profile).indices
        else:
            support = _flat_select(x_temp, k)
        if pursuit:
            beta, ok = _restricted_lstsq(y, op, support, cfg)
            ls_ok = ls_ok and ok
            x = np.zeros(shape.total, dtype=np.complex128)
            x[support] = beta
        else:
            x = np.zeros(shape.total, dtype=np.complex128)
            x[support] = x_temp[support]
        if trace is not None:
            trace.append(float(np.linalg.norm(x - x_true)))
        if prev_support is not None and np.array_equal(support, prev_support):
            break
        prev_support = support
    residual = float(np.linalg.norm(y - op.forward(x)))
    return RecoveryResult(
        x_hat=MultiLevelVector(shape, x),
        support=support,
        iterations=iterations,
        residual_norm=residual,
        error_trace=trace,
        ls_converged=ls_ok,
    )


def hi_iht(y, op, cfg: RecoveryConfig, x_true=None) -> RecoveryResult:
    """Hierarchical iterative hard thresholding.

    Args:
        y: measurement vector of length op.out_dim.
        op: forward/adjoint operator (fast or dense).
        cfg: solver configuration; cfg.profile drives the selection.
        x_true: optional ground truth; records a per-iteration error trace.
    """
    return _threshold_loop(y, op, cfg, hierarchical=True, pursuit=False, x_true=x_true)


def hi_htp(y, op, cfg: RecoveryConfig, x_true=None) -> RecoveryResult:
    """Hierarchical hard thresholding pursuit (restricted LS per iteration)."""
    return _threshold_loop(y, op, cfg, hierarchical=True, pursuit=True, x_true=x_true)


def flat_iht(y, op, cfg: RecoveryConfig, x_true=None) -> RecoveryResult:
    """Plain IHT with best-k selection, k from cfg.sparsity()."""
    return _threshold_loop(y, op, cfg, hierarchical=False, pursuit=False, x_true=x_true)


def flat_htp(y, op, cfg: RecoveryConfig, x_true=None) -> RecoveryResult:
    """Plain HTP with best-k selection and restricted LS."""
    return _threshold_loop(y, op, cfg, hierarchical=False, pursuit=True, x_true=x_true)


def omp(y, op, k: int, cfg: RecoveryConfig | None = None, x_true=None) -> RecoveryResult:
    """Orthogonal matching pursuit: k greedy correlation picks with LS refits."""
    cfg = cfg or RecoveryConfig(algorithm="OMP", flat_k=k)
    y = _check_measurement(y, op)
    shape = op.shape_in
    selected: list[int] = []
    cols = np.empty((op.out_dim, 0), dtype=np.complex128)
    beta = np.zeros(0, dtype=np.complex128)
    r = y.copy()
    trace = [] if x_true is not None else None
    ynorm = float(np.linalg.norm(y))
    iterations = 0
    for _ in range(min(k, shape.total)):
        if float(np.linalg.norm(r)) <= cfg.ls_tolerance * max(1.0, ynorm):
            break
        iterations += 1
        corr = np.abs(op.adjoint_values(r))
        corr[selected] = -1.0
        selected.append(int(np.argmax(corr)))
        e = np.zeros(shape.total, dtype=np.complex128)
        e[selected[-1]] = 1.0
        cols = np.concatenate([cols, op.forward(e)[:, None]], axis=1)
        beta, *_ = np.linalg.lstsq(cols, y, rcond=None)
        r = y - cols @ beta
        if trace is not None:
            x = np.zeros(shape.total, dtype=np.complex128)
            x[selected] = beta
            trace.append(float(np.linalg.norm(x - x_true)))
    x = np.zeros(shape.total, dtype=np.complex128)
    if selected:
        x[selected] = beta
    support = np.sort(np.asarray(selected, dtype=np.int64))
    support = support[np.abs(x[support]) > 0.0]
    return RecoveryResult(
        x_hat=MultiLevelVector(shape, x),
        support=support,
        iterations=iterations,
        residual_norm=float(np.linalg.norm(r)),
        error_trace=trace,
    )


SOLVERS = {
    "HiIHT": hi_iht,
    "HiHTP": hi_htp,
    "IHT": flat_iht,
    "HTP": flat_htp,
}


def solve(y, op, cfg: RecoveryConfig, x_true=None) -> RecoveryResult:
    """Dispatch on cfg.algorithm (OMP uses the profile product as k)."""
    if cfg.algorithm == "OMP":
        return omp(y, op, cfg.sparsity(op.shape_in), cfg, x_true=x_true)
    return SOLVERS[cfg.algorithm](y, op, cfg, x_true=x_true)


@dataclass(frozen=True)
class ContractionConstants:
    kappa: float
    tau: float
    contractive: bool


def contraction_constants(delta: float, algorithm: str) -> ContractionConstants:
    """Per-iteration error constants (kappa, tau) of the thresholding solvers.

    Valid for restricted-isometry deviation delta < 1/sqrt(3). For HiHTP the
    kappa formula can still exceed 1 inside that range; this is reported as
    non-contractive (tau = inf) rather than raised.
    """
    if not 0.0 <= delta < 1.0 / math.sqrt(3.0):
        raise GuaranteeVoidError(f"delta {delta} outside [0, 1/sqrt(3))")
    if algorithm == "HiIHT":
        kappa = math.sqrt(3.0) * delta
        num = 2.18
    elif algorithm == "HiHTP":
        kappa = math.sqrt(2.0 * delta / (1.0 - delta**2))
        num = 5.15
    else:
        raise ValueError(f"no contraction constants for {algorithm!r}")
    contractive = kappa < 1.0
    tau = num / (1.0 - kappa) if contractive else math.inf
    return ContractionConstants(kappa=kappa, tau=tau, contractive=contractive)


def min_overhead(delta_tau, delta_theta, V, L, K_V, K_L, N, M, C=1.0, option="FS"):
    """Sufficient pilot and antenna counts for the recovery guarantee.

    Natural logarithm throughout; the universal constant C is an input
    (its numeric value is not pinned, C=1 is a qualitative default).
    Returns (Np_min, Mp_min), each saturated at N resp. M.
    """
    if delta_tau <= 0 or delta_theta <= 0:
        raise GuaranteeVoidError("delta_tau and delta_theta must be positive")
    if delta_tau + delta_theta + delta_tau * delta_theta >= 1.0 / math.sqrt(3.0):
        raise GuaranteeVoidError(
            "need delta_tau + delta_theta + delta_tau*delta_theta < 1/sqrt(3)"
        )
    log4_n = math.log(N) ** 4
    log4_m = math.log(M) ** 4
    option = str(option).upper()
    if option == "FS":
        np_min = min(3.0 * C * delta_tau**-2 * K_V * K_L * log4_n, float(N))
        mp_min = min(9.0 * C * delta_theta**-2 * V * L * log4_m, float(M))
    elif option == "SF":
        np_min = min(9.0 * C * delta_tau**-2 * V * L * log4_n, float(N))
        mp_min = min(3.0 * C * delta_theta**-2 * K_L * log4_m, float(M))
    else:
        raise ValueError(f"unknown option {option!r}")
    return np_min, mp_min
