"""Simulated plants: coherent dual-polarization link and nonlinear IM/DD link.

The coherent channel is 2x2 polarization mixing followed by per-lane chromatic
dispersion (an all-pass FIR) and AWGN. The IM/DD channel drives a pulse-shaped
PAM waveform through a memoryless component nonlinearity, disperses the
optical field, square-law detects, and adds receiver noise.

Dispersion is parameterized by a single normalized ``beta2L`` (accumulated
dispersion with s^2 * symbol-rate^2 absorbed); emulating a higher symbol rate
on the same fiber means scaling beta2L by the squared rate ratio.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .signals import (
    DualPolBlock,
    ParameterError,
    RngStream,
    SignalBlock,
    fir_apply,
    rrc_taps,
    upsample,
)

log = logging.getLogger(__name__)


def cd_fir(beta2L: float, n_taps: int, sps: int = 1) -> np.ndarray:
    """Chromatic-dispersion FIR: truncated all-pass exp(-j*(beta2L/2)*w^2).

    The frequency response is sampled on an FFT grid of at least 8*n_taps
    points (w in rad/symbol, so the per-sample frequency is scaled by sps)
    and transformed. The chirp's group delay spans +-beta2L*pi*sps^2 samples;
    taps inside that support are kept as-is and the truncation tails get a
    Hann taper (a full-span Hann would crush the chirp body itself). The
    result is not re-normalized; truncation loss shows up as an energy
    deficit and is logged when it exceeds 1%.
    """
    if n_taps % 2 == 0 or n_taps < 1:
        raise ParameterError(f"n_taps must be odd and positive, got {n_taps}")
    if sps < 1:
        raise ParameterError("sps must be >= 1")
    m = 1 << max(int(np.ceil(np.log2(8 * n_taps))), 6)
    nu = 2 * np.pi * np.fft.fftfreq(m)  # rad/sample
    h_freq = np.exp(-0.5j * beta2L * (nu * sps) ** 2)
    h_time = np.fft.fftshift(np.fft.ifft(h_freq))
    c = m // 2
    half = n_taps // 2
    taps = h_time[c - half : c + half + 1].copy()
    support = abs(beta2L) * np.pi * sps**2
    k = np.arange(n_taps) - half
    window = np.ones(n_taps)
    tail = np.abs(k) > support
    window[tail] = 0.5 * (
        1 + np.cos(np.pi * (np.abs(k[tail]) - support) / max(half - support, 1.0))
    )
    taps *= window
    energy = float(np.sum(np.abs(taps) ** 2))
    if abs(energy - 1.0) > 0.01:
        log.info(
            "cd_fir truncation loss %.2f%% (beta2L=%g, n_taps=%d, sps=%d)",
            100 * (1 - energy), beta2L, n_taps, sps,
        )
    return taps


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


@dataclass
class CoherentChannelConfig:
    """Linear dispersive dual-polarization channel with AWGN.

    Polarization mixing is a rotation by ``theta`` unless an explicit unitary
    ``jones`` matrix is given. ``rotation_rate`` (rad/symbol) makes the
    rotation angle drift linearly over the block. ``dgd_tau`` inserts a
    differential group delay (fraction of a symbol period) on the x lane.
    """

    beta2L: float = 0.0
    cd_taps_len: int = 21
    theta: float = 0.0
    jones: np.ndarray | None = None
    dgd_tau: float = 0.0
    snr_db: float = np.inf
    rotation_rate: float = 0.0

    def __post_init__(self):
        if self.cd_taps_len % 2 == 0:
            raise ParameterError("cd_taps_len must be odd")
        if self.jones is not None:
            j = np.asarray(self.jones, dtype=complex)
            if j.shape != (2, 2) or np.max(np.abs(j @ j.conj().T - np.eye(2))) > 1e-9:
                raise ParameterError("jones matrix must be 2x2 unitary")
            self.jones = j

    def mixing_matrix(self) -> np.ndarray:
        return self.jones if self.jones is not None else rotation_matrix(self.theta)


class CoherentChannelResult(NamedTuple):
    rx: DualPolBlock
    true_response: np.ndarray  # (2, 2, n_taps) composite mixing + CD impulse response
    noise_var: float


def _dgd_taps(tau_samples: float) -> np.ndarray:
    """Two-tap linear-interpolation delay by ``tau_samples`` in [0, 1)."""
    f = float(tau_samples)
    if not (0 <= f < 1):
        raise ParameterError("dgd delay must be a fraction of one sample")
    return np.array([1 - f, f], dtype=complex)


def coherent_channel_apply(
    tx: DualPolBlock, cfg: CoherentChannelConfig, rng: RngStream
) -> CoherentChannelResult:
    """Mixing, per-lane CD, AWGN; also returns the composite impulse response.

    The exported response is the convolution of the (block-constant) mixing
    matrix with the CD taps, which is what a blind channel estimator should
    recover for a static channel. With ``rotation_rate`` set, the response at
    the block center is exported.
    """
    sig = tx.as_array().astype(complex)
    sps = tx.sps
    n = sig.shape[1]
    if cfg.rotation_rate != 0.0:
        theta_n = cfg.theta + cfg.rotation_rate * np.arange(n) / sps
        c, s = np.cos(theta_n), np.sin(theta_n)
        mixed = np.stack([c * sig[0] + s * sig[1], -s * sig[0] + c * sig[1]])
        m_center = rotation_matrix(cfg.theta + cfg.rotation_rate * (n // 2) / sps)
    else:
        m_center = cfg.mixing_matrix()
        mixed = m_center @ sig
    cd = cd_fir(cfg.beta2L, cfg.cd_taps_len, sps)
    lane_taps = [cd, cd]
    if cfg.dgd_tau:
        lane_taps[0] = np.convolve(cd, _dgd_taps(cfg.dgd_tau * sps))
    out = np.stack(
        [
            fir_apply(SignalBlock(mixed[i], sps=sps, symbol_rate=tx.x.symbol_rate), lane_taps[i]).samples
            for i in range(2)
        ]
    )
    # composite response h[i, j, k] = (lane CD)_i[k] * M[i, j]
    klen = max(len(t) for t in lane_taps)
    true_h = np.zeros((2, 2, klen), dtype=complex)
    for i in range(2):
        t = lane_taps[i]
        off = (klen - len(t)) // 2
        for j in range(2):
            true_h[i, j, off : off + len(t)] = t * m_center[i, j]
    # noise variance from the lane-averaged power so both lanes share sigma2
    power = float(np.mean(np.abs(out) ** 2))
    if np.isinf(cfg.snr_db) and cfg.snr_db > 0:
        noisy = out
        noise_var = 0.0
    else:
        noise_var = power / 10 ** (cfg.snr_db / 10)
        g = rng.generator()
        noise = np.sqrt(noise_var / 2) * (
            g.standard_normal(out.shape) + 1j * g.standard_normal(out.shape)
        )
        noisy = out + noise
    rx = DualPolBlock.from_array(noisy, sps=sps, symbol_rate=tx.x.symbol_rate)
    return CoherentChannelResult(rx, true_h, float(noise_var))


@dataclass
class ImddChannelConfig:
    """IM/DD link: RRC pulse shaping, component nonlinearity, field CD, square-law PD.

    ``nonlinearity`` is one of 'none', 'eam' (tanh transfer saturating at
    ``sat``), or 'soa' (saturable gain g0 / (1 + |a|^2 / p_sat)). ``pd=False``
    bypasses the photodiode and takes the real field instead - a linear
    calibration mode used to check the noise/filter bookkeeping against the
    analytic 2-PAM oracle.
    """

    sps: int = 2
    rolloff: float = 0.25
    span_symbols: int = 24
    beta2L: float = 0.0
    cd_taps_len: int = 31
    nonlinearity: str = "none"
    sat: float = 1.0
    p_sat: float = 1.0
    g0: float = 1.0
    snr_db: float = np.inf
    shot_scale: float = 0.0
    pd: bool = True
    bias: float | None = None

    def __post_init__(self):
        if self.sps < 2:
            raise ParameterError("IM/DD field dispersion needs sps >= 2")
        if self.nonlinearity not in ("none", "eam", "soa"):
            raise ParameterError(f"unknown nonlinearity {self.nonlinearity!r}")
        if self.sat <= 0 or self.p_sat <= 0 or self.g0 <= 0:
            raise ParameterError("sat, p_sat, g0 must be positive")
        if self.cd_taps_len % 2 == 0:
            raise ParameterError("cd_taps_len must be odd")


class ImddResult(NamedTuple):
    rx: SignalBlock       # received waveform at cfg.sps, noisy
    clean: SignalBlock    # same chain without noise
    noise_var: float
    bias: float


def _apply_nonlinearity(a: np.ndarray, cfg: ImddChannelConfig) -> np.ndarray:
    if cfg.nonlinearity == "none":
        return a
    if cfg.nonlinearity == "eam":
        return cfg.sat * np.tanh(a / cfg.sat)
    return a * cfg.g0 / (1.0 + np.abs(a) ** 2 / cfg.p_sat)


def imdd_channel_apply(
    pam_symbols: np.ndarray, cfg: ImddChannelConfig, rng: RngStream
) -> ImddResult:
    """Drive real PAM symbols through the IM/DD chain.

    Chain: bias to non-negative drive, upsample, transmit RRC, memoryless
    nonlinearity on the field amplitude, CD on the complex field, photodiode
    (|.|^2), AWGN at ``snr_db`` against the measured pre-noise power, receive
    RRC. Output stays at ``cfg.sps`` samples per symbol with symbol k centered
    on sample k*sps.
    """
    symbols = np.asarray(pam_symbols, dtype=float)
    bias = float(-symbols.min()) if cfg.bias is None else float(cfg.bias)
    drive = symbols + bias
    if drive.min() < -1e-12:
        raise ParameterError(
            f"negative drive after bias: min symbol {symbols.min():.4g} + bias {bias:.4g}"
        )
    pulse = rrc_taps(cfg.rolloff, cfg.span_symbols, cfg.sps)
    field = np.convolve(upsample(drive, cfg.sps), pulse, mode="same")
    field = _apply_nonlinearity(field, cfg)
    if cfg.beta2L != 0.0:
        field = np.convolve(
            field.astype(complex), cd_fir(cfg.beta2L, cfg.cd_taps_len, cfg.sps), mode="same"
        )
    detected = np.abs(field) ** 2 if cfg.pd else np.real(field)
    power = float(np.mean(detected**2))
    if np.isinf(cfg.snr_db) and cfg.snr_db > 0:
        noisy, noise_var = detected.copy(), 0.0
    else:
        noise_var = power / 10 ** (cfg.snr_db / 10)
        g = rng.generator()
        sigma = np.sqrt(noise_var + cfg.shot_scale * np.clip(detected, 0, None))
        noisy = detected + sigma * g.standard_normal(detected.size)
    rx = np.convolve(noisy, pulse, mode="same")
    clean = np.convolve(detected, pulse, mode="same")
    mk = lambda s: SignalBlock(s, sps=cfg.sps)
    return ImddResult(mk(rx), mk(clean), float(noise_var), bias)
