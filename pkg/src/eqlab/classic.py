"""Baseline equalizers: 2x2 butterfly CMA, supervised linear FFE, second-order
Volterra, plus exact MAC-per-symbol accounting for all of them.

MAC convention (stated in every report footer): one complex MAC counts as 4
real MACs; feature products count as 1 MAC each; biases are free. A butterfly
with N complex taps per branch costs 16N real MACs per dual-polarization
symbol, reported per polarization as 8N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .constellation import Constellation, NumericalError, hard_decide
from .signals import (
    DualPolBlock,
    ParameterError,
    SignalBlock,
    TrainingError,
)


@dataclass
class ButterflyFir:
    """2x2 complex FIR bank; ``w[a, b]`` filters input lane b into output lane a.

    The filter acts as a centered correlation: output symbol n of lane a is
    sum_k w[a, b, k] * u_b[n*sps - N//2 + k], decimated to one sample per
    symbol.
    """

    w: np.ndarray
    sps_in: int = 1

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=complex)
        if self.w.shape[:2] != (2, 2) or self.w.ndim != 3:
            raise ParameterError("butterfly weights must have shape (2, 2, N)")
        if self.w.shape[2] % 2 == 0:
            raise ParameterError("butterfly tap count must be odd")
        if self.sps_in not in (1, 2):
            raise ParameterError("sps_in must be 1 or 2")
        if not np.all(np.isfinite(self.w.view(float))):
            raise ParameterError("butterfly taps must be finite")

    @property
    def n_taps(self) -> int:
        return self.w.shape[2]

    @classmethod
    def identity(cls, n_taps: int, sps_in: int = 1) -> "ButterflyFir":
        w = np.zeros((2, 2, n_taps), dtype=complex)
        w[0, 0, n_taps // 2] = 1.0
        w[1, 1, n_taps // 2] = 1.0
        return cls(w, sps_in)


def butterfly_apply(rx: DualPolBlock, w: ButterflyFir) -> DualPolBlock:
    """Run the butterfly filter and decimate to one sample per symbol."""
    if rx.sps != w.sps_in:
        raise ParameterError(f"rx sps {rx.sps} != butterfly sps_in {w.sps_in}")
    u = rx.as_array()
    out = np.zeros((2, u.shape[1]), dtype=complex)
    for a in range(2):
        for b in range(2):
            out[a] += np.convolve(u[b], w.w[a, b][::-1], mode="same")
    z = out[:, :: rx.sps]
    return DualPolBlock.from_array(z, sps=1, symbol_rate=rx.x.symbol_rate)


def cma_radius(c: Constellation) -> float:
    """Godard modulus constant R = E|c|^4 / E|c|^2 under the priors."""
    p2 = np.sum(c.priors * np.abs(c.points) ** 2)
    p4 = np.sum(c.priors * np.abs(c.points) ** 4)
    return float(p4 / p2)


def cma_loss(z: np.ndarray, radius: float) -> float:
    """Mean Godard cost (|z|^2 - R)^2 over all lanes and symbols."""
    return float(np.mean((np.abs(z) ** 2 - radius) ** 2))


@dataclass
class CmaResult:
    w: ButterflyFir
    loss_trace: np.ndarray          # per-block mean Godard cost
    block_size: int
    singular_reinit: bool = False
    ser_trace: np.ndarray | None = None  # per-block SER vs reference, if given


def _padded_windows(u: np.ndarray, n_taps: int, sps: int) -> np.ndarray:
    """(n_symbols, n_taps) sliding views so window n covers u[n*sps - c .. +c]."""
    c = n_taps // 2
    padded = np.concatenate([np.zeros(c, dtype=u.dtype), u, np.zeros(c, dtype=u.dtype)])
    return sliding_window_view(padded, n_taps)[::sps]


def _orthogonal_reinit(w: np.ndarray) -> None:
    """Re-seed the y output lane orthogonally to the converged x lane."""
    w[1, 0] = -np.conj(w[0, 1][::-1])
    w[1, 1] = np.conj(w[0, 0][::-1])


def cma_train(
    rx: DualPolBlock,
    w0: ButterflyFir,
    radius: float,
    step: float,
    n_updates: int,
    block_size: int = 500,
    constellation: Constellation | None = None,
    reference: tuple[np.ndarray, np.ndarray] | None = None,
    guard_every: int = 4000,
    divergence_limit: float = 1e3,
) -> CmaResult:
    """Per-symbol stochastic gradient CMA on the Godard cost per output lane.

    Updates wrap around the block if ``n_updates`` exceeds the symbol count.
    The effective step is ``step`` divided by the mean input power. A
    singularity guard checks every ``guard_every`` symbols whether both output
    lanes track the same source (decision cross-correlation above 0.9 at any
    small lag) and, if so, reinitializes the y lane orthogonally and flags it.

    With ``constellation`` and ``reference`` (per-lane transmitted indices)
    given, a per-block SER trace is recorded for startup analysis; the
    adaptation itself never sees the reference.
    """
    if step <= 0:
        raise ParameterError("step must be positive")
    u = rx.as_array()
    sps = rx.sps
    n_sym = u.shape[1] // sps
    wins = [_padded_windows(u[b], w0.n_taps, sps) for b in range(2)]
    w = w0.w.copy()
    p_in = float(np.mean(np.abs(u) ** 2))
    mu = step / max(p_in, 1e-12)
    loss_blocks: list[float] = []
    ser_blocks: list[float] = []
    z_hist = np.zeros((2, n_sym), dtype=complex)  # most recent outputs per position
    acc = 0.0
    singular = False
    from .evaltools import dualpol_ser  # local import to avoid a cycle

    for t in range(n_updates):
        n = t % n_sym
        win0, win1 = wins[0][n], wins[1][n]
        z0 = np.dot(w[0, 0], win0) + np.dot(w[0, 1], win1)
        z1 = np.dot(w[1, 0], win0) + np.dot(w[1, 1], win1)
        e0 = radius - (z0.real**2 + z0.imag**2)
        e1 = radius - (z1.real**2 + z1.imag**2)
        g0 = 2.0 * mu * e0 * z0
        g1 = 2.0 * mu * e1 * z1
        w[0, 0] += g0 * np.conj(win0)
        w[0, 1] += g0 * np.conj(win1)
        w[1, 0] += g1 * np.conj(win0)
        w[1, 1] += g1 * np.conj(win1)
        z_hist[0, n], z_hist[1, n] = z0, z1
        acc += e0 * e0 + e1 * e1
        if (t + 1) % block_size == 0:
            loss = acc / (2 * block_size)
            loss_blocks.append(loss)
            acc = 0.0
            if loss > divergence_limit:
                raise TrainingError(
                    f"CMA diverged: block loss {loss:.3g}",
                    details=np.asarray(loss_blocks),
                )
            if constellation is not None and reference is not None:
                lo = max(0, n + 1 - block_size)
                res = dualpol_ser(
                    z_hist[0, lo : n + 1],
                    z_hist[1, lo : n + 1],
                    reference[0][lo : n + 1],
                    reference[1][lo : n + 1],
                    constellation,
                    max_lag=min(16, max(1, (n - lo) // 4)),
                )
                ser_blocks.append(res.ser)
        if (t + 1) % guard_every == 0 and constellation is not None:
            lo = max(0, n + 1 - 2000)
            zx, zy = z_hist[0, lo : n + 1], z_hist[1, lo : n + 1]
            dx = constellation.points[hard_decide(zx, constellation)]
            dy = constellation.points[hard_decide(zy, constellation)]
            for lag in range(-4, 5):
                if lag >= 0:
                    a, b = dx[lag:], dy[: dy.size - lag] if lag else dy
                else:
                    a, b = dx[:lag], dy[-lag:]
                m = min(a.size, b.size)
                if m < 100:
                    continue
                num = abs(np.vdot(a[:m], b[:m]))
                den = np.linalg.norm(a[:m]) * np.linalg.norm(b[:m])
                if den > 0 and num / den > 0.9:
                    _orthogonal_reinit(w)
                    singular = True
                    break
    return CmaResult(
        ButterflyFir(w, w0.sps_in),
        np.asarray(loss_blocks),
        block_size,
        singular_reinit=singular,
        ser_trace=np.asarray(ser_blocks) if ser_blocks else None,
    )


@dataclass
class FfeModel:
    """Linear feed-forward equalizer: real tap vector over a centered window."""

    taps: np.ndarray

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=float)
        if self.taps.ndim != 1 or self.taps.size == 0:
            raise ParameterError("FFE taps must be a non-empty vector")

    @property
    def n_taps(self) -> int:
        return self.taps.size


def sliding_feature_windows(
    samples: np.ndarray, n_taps: int, sps: int = 1
) -> np.ndarray:
    """(n_symbols, n_taps) centered windows of a sample stream, one per symbol."""
    return _padded_windows(np.asarray(samples), n_taps, sps)


def ffe_train_ls(
    features: np.ndarray,
    targets: np.ndarray,
    n_taps: int | None = None,
    ridge_scale: float = 1e-6,
) -> FfeModel:
    """Ridge-regularized least squares for the MMSE FIR.

    ``features`` is either a prebuilt (n, n_taps) window matrix or a raw
    sample stream (then ``n_taps`` must be given and centered symbol-rate
    windows are built). Regularization is ridge_scale * trace(X^T X) / n_taps.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        if n_taps is None:
            raise ParameterError("n_taps required when passing a raw stream")
        features = sliding_feature_windows(features, n_taps)
    elif n_taps is not None and features.shape[1] != n_taps:
        raise ParameterError(f"feature width {features.shape[1]} != n_taps {n_taps}")
    targets = np.asarray(targets, dtype=float)
    n, m = features.shape
    if targets.size != n:
        raise ParameterError("targets must match the number of feature rows")
    if n < 10 * m:
        raise ParameterError(f"need >= {10 * m} training symbols for {m} taps, got {n}")
    gram = features.T @ features
    lam = ridge_scale * np.trace(gram) / m
    try:
        taps = np.linalg.solve(gram + lam * np.eye(m), features.T @ targets)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"ridge system is singular: {exc}") from exc
    if not np.all(np.isfinite(taps)):
        raise NumericalError("least-squares solution is not finite")
    return FfeModel(taps)


def ffe_train_lms(
    features: np.ndarray,
    targets: np.ndarray,
    n_taps: int | None = None,
    step: float = 1e-3,
    passes: int = 1,
) -> FfeModel:
    """Plain LMS on the same window matrix; converges to the LS solution."""
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        if n_taps is None:
            raise ParameterError("n_taps required when passing a raw stream")
        features = sliding_feature_windows(features, n_taps)
    targets = np.asarray(targets, dtype=float)
    w = np.zeros(features.shape[1])
    mu = step / max(np.mean(features**2) * features.shape[1], 1e-12)
    for _ in range(passes):
        for x, d in zip(features, targets):
            err = d - np.dot(w, x)
            w += 2 * mu * err * x
    return FfeModel(w)


def ffe_apply(model: FfeModel, samples: np.ndarray, sps: int = 1) -> np.ndarray:
    """Symbol-rate estimates from a sample stream."""
    return sliding_feature_windows(samples, model.n_taps, sps) @ model.taps


@dataclass
class VolterraModel:
    """Second-order Volterra equalizer: m1 linear taps + symmetric quadratic kernel."""

    m1: int
    m2: int
    kernel1: np.ndarray = field(default=None)
    kernel2: np.ndarray = field(default=None)
    bias: float = 0.0

    def __post_init__(self):
        if self.m2 > self.m1:
            raise ParameterError("quadratic memory m2 cannot exceed linear memory m1")
        if self.m1 < 1 or self.m2 < 0:
            raise ParameterError("memory lengths must be positive")
        if self.kernel1 is None:
            self.kernel1 = np.zeros(self.m1)
        if self.kernel2 is None:
            self.kernel2 = np.zeros(self.m2 * (self.m2 + 1) // 2)
        self.kernel1 = np.asarray(self.kernel1, dtype=float)
        self.kernel2 = np.asarray(self.kernel2, dtype=float)
        if self.kernel1.size != self.m1 or self.kernel2.size != self.m2 * (self.m2 + 1) // 2:
            raise ParameterError("kernel sizes inconsistent with m1/m2")
        if not (np.all(np.isfinite(self.kernel1)) and np.all(np.isfinite(self.kernel2))):
            raise ParameterError("kernels must be finite")

    @property
    def n_features(self) -> int:
        return self.m1 + self.m2 * (self.m2 + 1) // 2


def volterra_features(window: np.ndarray, m1: int, m2: int) -> np.ndarray:
    """Feature vector: m1 linear terms then the m2(m2+1)/2 products x_i*x_j, i<=j.

    The quadratic terms come from the m2 samples centered inside the m1
    window. Feature count is m1 + m2(m2+1)/2.
    """
    window = np.asarray(window, dtype=float)
    if m2 > m1:
        raise ParameterError("m2 cannot exceed m1")
    if window.size < m1:
        raise ParameterError(f"window length {window.size} < m1 {m1}")
    lin = window[-m1:] if window.size > m1 else window
    off = (m1 - m2) // 2
    quad_base = lin[off : off + m2]
    iu, ju = np.triu_indices(m2)
    return np.concatenate([lin, quad_base[iu] * quad_base[ju]])


def volterra_feature_matrix(samples: np.ndarray, m1: int, m2: int, sps: int = 1) -> np.ndarray:
    """Stacked volterra_features over centered symbol-rate windows."""
    wins = sliding_feature_windows(samples, m1, sps)
    off = (m1 - m2) // 2
    qb = wins[:, off : off + m2]
    iu, ju = np.triu_indices(m2)
    return np.concatenate([wins, qb[:, iu] * qb[:, ju]], axis=1)


def volterra_train_ls(
    samples: np.ndarray,
    targets: np.ndarray,
    m1: int,
    m2: int,
    sps: int = 1,
    ridge_scale: float = 1e-6,
) -> VolterraModel:
    """Ridge LS fit of kernels and bias on symbol-rate windows."""
    feats = volterra_feature_matrix(samples, m1, m2, sps)
    targets = np.asarray(targets, dtype=float)
    n = min(feats.shape[0], targets.size)
    feats, targets = feats[:n], targets[:n]
    x = np.concatenate([feats, np.ones((n, 1))], axis=1)
    gram = x.T @ x
    lam = ridge_scale * np.trace(gram) / x.shape[1]
    theta = np.linalg.solve(gram + lam * np.eye(x.shape[1]), x.T @ targets)
    nfeat = m1 + m2 * (m2 + 1) // 2
    return VolterraModel(m1, m2, theta[:m1], theta[m1:nfeat], float(theta[-1]))


def volterra_apply(model: VolterraModel, samples: np.ndarray, sps: int = 1) -> np.ndarray:
    feats = volterra_feature_matrix(samples, model.m1, model.m2, sps)
    return feats @ np.concatenate([model.kernel1, model.kernel2]) + model.bias


def macs_per_symbol_classic(model) -> int:
    """Real MACs per output symbol under the 4-real-MACs-per-complex convention.

    ButterflyFir: 8N per polarization symbol. FFE: one MAC per tap. Volterra:
    m1 + m2(m2+1) (kernel MACs plus the product formations). Counts depend on
    shape only, never on trained values.
    """
    if isinstance(model, ButterflyFir):
        return 8 * model.n_taps
    if isinstance(model, FfeModel):
        return model.n_taps
    if isinstance(model, VolterraModel):
        return model.m1 + model.m2 * (model.m2 + 1)
    raise ParameterError(f"unknown model type {type(model).__name__}")
