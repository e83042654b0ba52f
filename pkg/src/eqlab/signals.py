"""Complex-baseband signal containers, filtering, noise injection, and error metrics.

All DSP runs in normalized time (symbol period = 1). Physical symbol rates are
carried as metadata only. Everything here is a pure function of its inputs plus
an explicit :class:`RngStream`, so results are bit-reproducible and safe to
evaluate in parallel on disjoint data.

SNR convention: ``snr_db`` is defined per sample against the measured (or
assumed-unit) per-sample signal power. For complex signals the noise is
circularly symmetric with total variance ``sigma2`` split evenly over I and Q;
for real signals the full ``sigma2`` sits in the single real dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import erfc


class ParameterError(ValueError):
    """Invalid argument to a DSP operation."""


class EvaluationError(RuntimeError):
    """A metric could not be evaluated on the given inputs."""


class TrainingError(RuntimeError):
    """Adaptive training diverged or produced invalid values.

    Carries whatever diagnostic payload the trainer had at failure time
    (loss trace, last-good checkpoint) in ``details``.
    """

    def __init__(self, msg: str, details=None):
        super().__init__(msg)
        self.details = details


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by (seed, stream_id).

    The same pair always reproduces identical draws bit-exactly. Substreams
    derived via :meth:`substream` are independent of each other and of the
    parent.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, offset: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id * 1000003 + offset + 1)


@dataclass
class SignalBlock:
    """A block of baseband samples at an integer number of samples per symbol.

    ``samples`` may be complex (coherent lanes) or real (IM/DD waveforms);
    ``symbol_rate`` is bookkeeping only and never enters the DSP.
    """

    samples: np.ndarray
    sps: int = 1
    symbol_rate: float = 1.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.sps < 1:
            raise ParameterError(f"sps must be >= 1, got {self.sps}")
        if self.samples.ndim != 1:
            raise ParameterError("SignalBlock samples must be one-dimensional")
        if self.samples.size % self.sps != 0:
            raise ParameterError(
                f"length {self.samples.size} not divisible by sps {self.sps}"
            )
        if self.samples.size and not np.all(np.isfinite(self.samples.view(float))):
            raise ParameterError("samples must be finite (no NaN/Inf)")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def n_symbols(self) -> int:
        return self.samples.size // self.sps

    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def copy_with(self, samples: np.ndarray) -> "SignalBlock":
        return SignalBlock(samples, sps=self.sps, symbol_rate=self.symbol_rate)


@dataclass
class DualPolBlock:
    """Two aligned polarization lanes with a common sample grid."""

    x: SignalBlock
    y: SignalBlock

    def __post_init__(self):
        if len(self.x) != len(self.y) or self.x.sps != self.y.sps:
            raise ParameterError("dual-pol lanes must share length and sps")

    @property
    def sps(self) -> int:
        return self.x.sps

    def __len__(self) -> int:
        return len(self.x)

    def as_array(self) -> np.ndarray:
        """Stack lanes into a (2, N) array."""
        return np.stack([self.x.samples, self.y.samples])

    @classmethod
    def from_array(cls, arr: np.ndarray, sps: int = 1, symbol_rate: float = 1.0) -> "DualPolBlock":
        return cls(
            SignalBlock(arr[0], sps=sps, symbol_rate=symbol_rate),
            SignalBlock(arr[1], sps=sps, symbol_rate=symbol_rate),
        )


def rrc_taps(rolloff: float, span_symbols: int, sps: int) -> np.ndarray:
    """Root-raised-cosine FIR, ``span_symbols*sps + 1`` taps, unit energy.

    The taps are symmetric about the center and evaluated on the grid
    t = -span/2 .. span/2 symbols. Removable singularities at t = 0 and
    |t| = 1/(4*rolloff) use the analytic limits.
    """
    if not (0.0 < rolloff <= 1.0):
        raise ParameterError(f"rolloff must be in (0, 1], got {rolloff}")
    if span_symbols < 1 or sps < 1:
        raise ParameterError("span_symbols and sps must be positive")
    n = span_symbols * sps
    t = (np.arange(n + 1) - n / 2) / sps
    beta = rolloff
    h = np.empty(t.size)
    eps = 1e-12
    at0 = np.abs(t) < eps
    sing = np.abs(np.abs(t) - 1.0 / (4 * beta)) < eps
    reg = ~(at0 | sing)
    tr = t[reg]
    h[reg] = (np.sin(np.pi * tr * (1 - beta)) + 4 * beta * tr * np.cos(np.pi * tr * (1 + beta))) / (
        np.pi * tr * (1 - (4 * beta * tr) ** 2)
    )
    h[at0] = 1 + beta * (4 / np.pi - 1)
    h[sing] = (beta / np.sqrt(2)) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
    )
    return h / np.linalg.norm(h)


def fir_apply(signal: SignalBlock, taps: np.ndarray, mode: str = "same") -> SignalBlock:
    """Linear convolution with ``taps``.

    ``same`` keeps the input length with the group delay of the center tap
    compensated (center = (len(taps)-1)//2); ``full`` returns the complete
    convolution.
    """
    taps = np.asarray(taps)
    if taps.size == 0:
        raise ParameterError("taps must be non-empty")
    if mode not in ("same", "full"):
        raise ParameterError(f"unknown mode {mode!r}")
    out = np.convolve(signal.samples, taps, mode="full")
    if mode == "same":
        c = (taps.size - 1) // 2
        return signal.copy_with(out[c : c + len(signal)])
    # full mode extends the transient, so symbol alignment is lost
    return SignalBlock(out, sps=1, symbol_rate=signal.symbol_rate)


class NoisyBlock(NamedTuple):
    block: SignalBlock
    noise_var: float


def awgn_add(
    signal: SignalBlock,
    snr_db: float,
    rng: RngStream,
    measured_power: bool = True,
) -> NoisyBlock:
    """Add white Gaussian noise at ``snr_db`` relative to the signal power.

    Complex input gets circularly symmetric noise with total variance
    ``sigma2 = P / 10**(snr_db/10)``; real input gets real noise with the same
    total variance. ``snr_db = +inf`` disables noise. Returns the noisy block
    plus the ``sigma2`` actually used.
    """
    if len(signal) == 0:
        raise ParameterError("cannot add noise to an empty signal")
    if math.isnan(snr_db):
        raise ParameterError("snr_db must not be NaN")
    if math.isinf(snr_db) and snr_db > 0:
        return NoisyBlock(signal.copy_with(signal.samples.copy()), 0.0)
    p = signal.power() if measured_power else 1.0
    sigma2 = p / 10 ** (snr_db / 10)
    g = rng.generator()
    if np.iscomplexobj(signal.samples):
        noise = np.sqrt(sigma2 / 2) * (
            g.standard_normal(len(signal)) + 1j * g.standard_normal(len(signal))
        )
    else:
        noise = np.sqrt(sigma2) * g.standard_normal(len(signal))
    return NoisyBlock(signal.copy_with(signal.samples + noise), float(sigma2))


class SerResult(NamedTuple):
    ser: float
    lag: int
    rotation: int  # number of +90 deg rotations applied to decisions (0 if n/a)


def _ser_at_lag(a: np.ndarray, b: np.ndarray, lag: int) -> float:
    """Mismatch fraction between a shifted by `lag` and b on their overlap."""
    if lag >= 0:
        aa, bb = a[lag:], b[: b.size - lag] if lag else b
    else:
        aa, bb = a[: a.size + lag], b[-lag:]
    n = min(aa.size, bb.size)
    if n == 0:
        return 1.0
    return float(np.mean(aa[:n] != bb[:n]))


def symbol_error_rate(
    decisions: np.ndarray,
    reference: np.ndarray,
    ambiguity: str = "none",
    rotation_perm: np.ndarray | None = None,
    max_lag: int = 32,
) -> SerResult:
    """Symbol error rate with alignment (and optionally 90-degree) ambiguity.

    Searches integer lags in [-max_lag, max_lag] and reports the minimum
    mismatch fraction. With ``ambiguity='qam_rotations'`` the four 90-degree
    constellation rotations of the decisions are also searched;
    ``rotation_perm`` must then give the index permutation of one +90 degree
    rotation (see :func:`eqlab.constellation.rotation_permutation`).
    """
    decisions = np.asarray(decisions)
    reference = np.asarray(reference)
    if abs(decisions.size - reference.size) > max_lag:
        raise EvaluationError(
            f"length mismatch {decisions.size} vs {reference.size} exceeds alignment window {max_lag}"
        )
    if ambiguity not in ("none", "qam_rotations"):
        raise ParameterError(f"unknown ambiguity {ambiguity!r}")
    if ambiguity == "qam_rotations":
        if rotation_perm is None:
            raise ParameterError("qam_rotations ambiguity needs rotation_perm")
        variants = []
        d = decisions
        for r in range(4):
            variants.append((d, r))
            d = np.asarray(rotation_perm)[d]
    else:
        variants = [(decisions, 0)]
    best = SerResult(1.0, 0, 0)
    for d, r in variants:
        for lag in range(-max_lag, max_lag + 1):
            s = _ser_at_lag(d, reference, lag)
            if s < best.ser:
                best = SerResult(s, lag, r)
    return best


def theory_ber_2pam(esn0_db: float) -> float:
    """Analytic AWGN BER of antipodal 2-PAM, Q(sqrt(2*Es/N0))."""
    if math.isnan(esn0_db):
        raise ParameterError("esn0_db must not be NaN")
    if math.isinf(esn0_db):
        return 0.0 if esn0_db > 0 else 0.5
    gamma = 10 ** (esn0_db / 10)
    return float(0.5 * erfc(np.sqrt(gamma)))


def upsample(symbols: np.ndarray, sps: int) -> np.ndarray:
    """Zero-stuff symbols to ``sps`` samples per symbol (symbol at index k*sps)."""
    if sps == 1:
        return np.asarray(symbols).copy()
    out = np.zeros(len(symbols) * sps, dtype=np.asarray(symbols).dtype)
    out[::sps] = symbols
    return out
