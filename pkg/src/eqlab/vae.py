"""Blind VAE-based equalizer (VAE-LE) and its VQ-VAE simplification.

The model is a linear butterfly encoder whose symbol posteriors come from the
Gaussian soft demapper, a linear 2x2 (or 1x1 for single-lane signals) channel
decoder, and a per-sample noise variance. The blind cost is the standard
linear-AWGN evidence bound: a noise-normalized reconstruction term built from
the posterior's first and second moments plus the categorical KL divergence of
the posterior against the (possibly shaped) source priors.

Gradients are computed analytically. Encoder gradients flow through the
demapper softmax; decoder and sigma^2 gradients are direct (the posterior is
treated as an input of the loss, matching its signature). sigma^2 itself is
never descended: each training step applies the closed-form M-step (mean
residual power per sample, floored).

Complex-parameter gradients use the convention g = dL/dRe + j*dL/dIm, which
is what finite differences over the real and imaginary parts measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .classic import ButterflyFir, _padded_windows
from .constellation import Constellation, PosteriorBlock, soft_demap_q
from .evaltools import dualpol_ser
from .signals import (
    DualPolBlock,
    ParameterError,
    SignalBlock,
    TrainingError,
)

SIGMA2_FLOOR = 1e-6


@dataclass
class VaeLeModel:
    """Parameter container: encoder taps, channel-hypothesis decoder, sigma^2."""

    enc: np.ndarray          # (L, L, Nw) complex butterfly encoder
    dec: np.ndarray          # (L, L, Nh) complex channel hypothesis, Nh odd
    sigma2: float
    constellation: Constellation
    sps: int = 1

    def __post_init__(self):
        self.enc = np.asarray(self.enc, dtype=complex)
        self.dec = np.asarray(self.dec, dtype=complex)
        if self.enc.ndim != 3 or self.enc.shape[0] != self.enc.shape[1]:
            raise ParameterError("encoder must have shape (L, L, Nw)")
        if self.dec.shape[:2] != self.enc.shape[:2]:
            raise ParameterError("decoder lane count must match encoder")
        if self.dec.shape[2] % 2 == 0:
            raise ParameterError("decoder length must be odd")
        if self.sigma2 <= 0:
            raise ParameterError("sigma2 must be positive")
        if self.sps not in (1, 2):
            raise ParameterError("sps must be 1 or 2")
        for arr in (self.enc, self.dec):
            if not np.all(np.isfinite(arr.view(float))):
                raise ParameterError("model parameters must be finite")

    @property
    def lanes(self) -> int:
        return self.enc.shape[0]

    @property
    def encoder(self) -> ButterflyFir:
        if self.lanes != 2:
            raise ParameterError("butterfly view only defined for two lanes")
        return ButterflyFir(self.enc, self.sps)

    def copy(self) -> "VaeLeModel":
        return VaeLeModel(
            self.enc.copy(), self.dec.copy(), self.sigma2, self.constellation, self.sps
        )

    @classmethod
    def cold_start(
        cls,
        constellation: Constellation,
        n_enc_taps: int,
        n_dec_taps: int,
        lanes: int = 2,
        sps: int = 1,
        sigma2: float = 1.0,
    ) -> "VaeLeModel":
        """Center-spike identity encoder and decoder, sigma^2 = 1."""
        enc = np.zeros((lanes, lanes, n_enc_taps), dtype=complex)
        dec = np.zeros((lanes, lanes, n_dec_taps), dtype=complex)
        for a in range(lanes):
            enc[a, a, n_enc_taps // 2] = 1.0
            dec[a, a, n_dec_taps // 2] = 1.0
        return cls(enc, dec, sigma2, constellation, sps)


def _as_lanes(rx) -> np.ndarray:
    """Accept a DualPolBlock (two lanes) or SignalBlock (one lane)."""
    if isinstance(rx, DualPolBlock):
        return rx.as_array().astype(complex)
    if isinstance(rx, SignalBlock):
        return rx.samples[None, :].astype(complex)
    arr = np.asarray(rx, dtype=complex)
    return arr if arr.ndim == 2 else arr[None, :]


def _equalize(u: np.ndarray, enc: np.ndarray, sps: int) -> np.ndarray:
    """z[a, n] = sum_b sum_k enc[a,b,k] * u_b[n*sps - Nw//2 + k]."""
    lanes, _, nw = enc.shape
    z = np.zeros((lanes, u.shape[1]), dtype=complex)
    for a in range(lanes):
        for b in range(lanes):
            z[a] += np.convolve(u[b], enc[a, b][::-1], mode="same")
    return z[:, ::sps]


def _upsample_lanes(x: np.ndarray, sps: int, n_samples: int) -> np.ndarray:
    if sps == 1:
        return x.astype(x.dtype, copy=True)
    out = np.zeros((x.shape[0], n_samples), dtype=x.dtype)
    out[:, ::sps] = x
    return out


def vae_posterior(rx, model: VaeLeModel) -> list[PosteriorBlock]:
    """Equalize and soft-demap; one posterior block per lane."""
    u = _as_lanes(rx)
    z = _equalize(u, model.enc, model.sps)
    return [
        PosteriorBlock(soft_demap_q(z[a], model.constellation, model.sigma2))
        for a in range(model.lanes)
    ]


class ElboBreakdown(NamedTuple):
    recon: float
    kl: float
    total: float


def _q_array(q, lanes: int) -> np.ndarray:
    if isinstance(q, PosteriorBlock):
        q = [q]
    if isinstance(q, (list, tuple)):
        q = np.stack([p.q if isinstance(p, PosteriorBlock) else np.asarray(p) for p in q])
    q = np.asarray(q, dtype=float)
    if q.ndim == 2:
        q = q[None]
    if q.shape[0] != lanes:
        raise ParameterError(f"posterior has {q.shape[0]} lanes, model has {lanes}")
    return q


def _moments(q: np.ndarray, c: Constellation):
    mu = q @ c.points
    e2 = q @ (np.abs(c.points) ** 2)
    var = np.maximum(e2 - np.abs(mu) ** 2, 0.0)
    return mu, e2, var


def _kl_rows(q: np.ndarray, priors: np.ndarray) -> np.ndarray:
    """KL(q || p) per symbol, (L, B)."""
    safe = np.maximum(q, 1e-300)
    return np.sum(q * (np.log(safe) - np.log(priors)), axis=-1)


class _LossPieces(NamedTuple):
    a0: float                # sum of |r - d|^2 over the interior
    b0: float                # decoder-energy-weighted posterior variance sum
    kl_sum: float
    n_eff: int               # symbols entering the per-symbol normalization
    n_int: int               # interior sample count per lane
    d: np.ndarray            # reconstruction (L, Ns)
    mu_up: np.ndarray
    var_up: np.ndarray
    mask: np.ndarray


def _loss_pieces(u, q, model: VaeLeModel) -> _LossPieces:
    lanes, ns = u.shape
    nh = model.dec.shape[2]
    ch = nh // 2
    if ns < nh:
        raise ParameterError(f"block of {ns} samples shorter than decoder ({nh})")
    mu, e2, var = _moments(q, model.constellation)
    mu_up = _upsample_lanes(mu, model.sps, ns)
    var_up = _upsample_lanes(var, model.sps, ns)
    d = np.zeros((lanes, ns), dtype=complex)
    for i in range(lanes):
        for j in range(lanes):
            d[i] += np.convolve(mu_up[j], model.dec[i, j], mode="same")
    mask = np.zeros(ns)
    mask[ch : ns - ch] = 1.0
    resid = (u - d) * mask
    a0 = float(np.sum(np.abs(resid) ** 2))
    b0 = 0.0
    for i in range(lanes):
        for j in range(lanes):
            b0 += float(
                np.sum(mask * np.convolve(var_up[j], np.abs(model.dec[i, j]) ** 2, mode="same"))
            )
    sym_interior = mask[:: model.sps].astype(bool)
    kl_sum = float(np.sum(_kl_rows(q, model.constellation.priors)[:, sym_interior]))
    n_eff = lanes * int(sym_interior.sum())
    n_int = int(mask.sum())
    return _LossPieces(a0, b0, kl_sum, n_eff, n_int, d, mu_up, var_up, mask)


def elbo_loss(rx, q, model: VaeLeModel) -> ElboBreakdown:
    """Blind evidence-bound cost, normalized per symbol.

    recon = (A + B)/sigma^2 with A the squared reconstruction residual using
    the posterior mean and B the decoder-energy-weighted posterior variance;
    kl is the categorical KL divergence of the posterior against the priors.
    Block edges inside one decoder half-length are excluded.
    """
    u = _as_lanes(rx)
    qa = _q_array(q, model.lanes)
    if qa.shape[1] != u.shape[1] // model.sps:
        raise ParameterError("posterior rows do not match the rx symbol grid")
    p = _loss_pieces(u, qa, model)
    recon = (p.a0 + p.b0) / (model.sigma2 * p.n_eff)
    kl = p.kl_sum / p.n_eff
    return ElboBreakdown(recon, kl, recon + kl)


class VaeGradients(NamedTuple):
    enc: np.ndarray          # dL/dRe + j dL/dIm per encoder tap
    dec: np.ndarray
    sigma2: float            # holding the posterior fixed, per the loss signature
    breakdown: ElboBreakdown
    sigma2_mstep: float      # closed-form update target (A+B)/(lanes*interior)


def elbo_gradients(rx, model: VaeLeModel) -> VaeGradients:
    """Analytic gradients of the blind cost at the model's own posterior.

    Encoder gradients include the demapper pathway (through the softmax
    weights); decoder and sigma^2 gradients hold the posterior fixed.
    """
    u = _as_lanes(rx)
    c = model.constellation
    lanes, ns = u.shape
    sps = model.sps
    nh = model.dec.shape[2]
    nw = model.enc.shape[2]
    ch = nh // 2
    z = _equalize(u, model.enc, sps)
    qa = np.stack([soft_demap_q(z[a], c, model.sigma2) for a in range(lanes)])
    p = _loss_pieces(u, qa, model)
    s2, n_eff = model.sigma2, p.n_eff
    recon = (p.a0 + p.b0) / (s2 * n_eff)
    kl = p.kl_sum / n_eff
    breakdown = ElboBreakdown(recon, kl, recon + kl)

    # reconstruction adjoint: G_d = 2 dL/dd* on the interior
    g_d = (-2.0 / (s2 * n_eff)) * (u - p.d) * p.mask
    grad_dec = np.zeros_like(model.dec)
    mu_pad = np.pad(p.mu_up, ((0, 0), (ch, ch)))
    for i in range(lanes):
        for j in range(lanes):
            # windows V[m] = mu_pad[j, m : m+ns]; grad over taps is the
            # reversed cross-correlation with the residual adjoint
            v = np.lib.stride_tricks.sliding_window_view(mu_pad[j], ns)
            grad_dec[i, j] = (v.conj() @ g_d[i])[::-1]
    # decoder-energy (variance) term: direct in |h|^2
    var_pad = np.pad(p.var_up, ((0, 0), (ch, ch)))
    s_var = np.empty((lanes, nh))
    for j in range(lanes):
        v = np.lib.stride_tricks.sliding_window_view(var_pad[j], ns)
        s_var[j] = (v @ p.mask)[::-1]
    for i in range(lanes):
        for j in range(lanes):
            grad_dec[i, j] += (2.0 / (s2 * n_eff)) * model.dec[i, j] * s_var[j]

    # posterior-mean adjoint G_mu and variance weights w at sample grid
    g_mu_up = np.zeros((lanes, ns), dtype=complex)
    w_up = np.zeros((lanes, ns))
    for j in range(lanes):
        for i in range(lanes):
            g_mu_up[j] += np.convolve(g_d[i], np.conj(model.dec[i, j])[::-1], mode="same")
            w_up[j] += np.convolve(p.mask, (np.abs(model.dec[i, j]) ** 2)[::-1], mode="same")
    w_up /= s2 * n_eff
    g_mu = g_mu_up[:, ::sps]
    w_sym = w_up[:, ::sps]
    mu_sym = p.mu_up[:, ::sps]
    g_mu = g_mu - 2.0 * w_sym * mu_sym  # variance term's -|mu|^2 pathway

    # per-symbol posterior gradient g[l, n, m] = dL/dq
    points = c.points
    sym_mask = p.mask[::sps]
    g_q = (
        np.real(np.conj(g_mu)[..., None] * points[None, None, :])
        + w_sym[..., None] * (np.abs(points) ** 2)[None, None, :]
        + (sym_mask[None, :, None] / n_eff)
        * (np.log(np.maximum(qa, 1e-300)) - np.log(c.priors)[None, None, :] + 1.0)
    )
    # softmax backward, then the Gaussian-score pathway to z
    inner = np.sum(qa * g_q, axis=-1, keepdims=True)
    ds = qa * (g_q - inner)
    g_z = (-2.0 / s2) * (z * ds.sum(-1) - ds @ points)

    grad_enc = np.zeros_like(model.enc)
    wins = [_padded_windows(u[b], nw, sps) for b in range(lanes)]
    for a in range(lanes):
        for b in range(lanes):
            grad_enc[a, b] = g_z[a] @ np.conj(wins[b])

    grad_sigma2 = -(p.a0 + p.b0) / (s2 * s2 * n_eff)
    mstep = max((p.a0 + p.b0) / (lanes * p.n_int), SIGMA2_FLOOR)
    return VaeGradients(grad_enc, grad_dec, grad_sigma2, breakdown, mstep)


class VqVaeBreakdown(NamedTuple):
    recon: float
    commit: float
    total: float


def vq_quantize(z: np.ndarray, c: Constellation, sigma2: float) -> np.ndarray:
    """Prior-weighted nearest-point indices: argmin |z-c|^2 - sigma2*log p."""
    d2 = np.abs(z[..., None] - c.points) ** 2
    logp = np.log(np.maximum(c.priors, 1e-300))
    return np.argmin(d2 - sigma2 * logp, axis=-1)


def vqvae_loss(rx, model: VaeLeModel, beta_commit: float = 0.25) -> VqVaeBreakdown:
    """Hard-quantized blind cost: reconstruction from decisions + commitment."""
    if beta_commit < 0:
        raise ParameterError("beta_commit must be >= 0")
    u = _as_lanes(rx)
    pieces = _vqvae_pieces(u, model, beta_commit)
    return pieces[0]


def _vqvae_pieces(u: np.ndarray, model: VaeLeModel, beta_commit: float):
    c = model.constellation
    lanes, ns = u.shape
    sps = model.sps
    nh = model.dec.shape[2]
    ch = nh // 2
    if ns < nh:
        raise ParameterError(f"block of {ns} samples shorter than decoder ({nh})")
    z = _equalize(u, model.enc, sps)
    idx = vq_quantize(z, c, model.sigma2)
    xq = c.points[idx]
    xq_up = _upsample_lanes(xq, sps, ns)
    d = np.zeros((lanes, ns), dtype=complex)
    for i in range(lanes):
        for j in range(lanes):
            d[i] += np.convolve(xq_up[j], model.dec[i, j], mode="same")
    mask = np.zeros(ns)
    mask[ch : ns - ch] = 1.0
    sym_mask = mask[::sps]
    n_eff = lanes * int(sym_mask.sum())
    resid = (u - d) * mask
    a0 = float(np.sum(np.abs(resid) ** 2))
    commit_terms = np.abs(z - xq) ** 2 * sym_mask
    commit = beta_commit * float(np.sum(commit_terms)) / n_eff
    recon = a0 / (model.sigma2 * n_eff)
    bd = VqVaeBreakdown(recon, commit, recon + commit)
    return bd, z, idx, xq, xq_up, d, mask, sym_mask, n_eff, a0


class VqVaeGradients(NamedTuple):
    enc: np.ndarray
    dec: np.ndarray
    breakdown: VqVaeBreakdown
    sigma2_mstep: float
    decisions: np.ndarray


def vqvae_gradients(rx, model: VaeLeModel, beta_commit: float = 0.25) -> VqVaeGradients:
    """Analytic gradients with the straight-through quantizer convention."""
    u = _as_lanes(rx)
    bd, z, idx, xq, xq_up, d, mask, sym_mask, n_eff, a0 = _vqvae_pieces(
        u, model, beta_commit
    )
    lanes, ns = u.shape
    sps = model.sps
    nh = model.dec.shape[2]
    nw = model.enc.shape[2]
    ch = nh // 2
    s2 = model.sigma2
    g_d = (-2.0 / (s2 * n_eff)) * (u - d) * mask
    grad_dec = np.zeros_like(model.dec)
    xq_pad = np.pad(xq_up, ((0, 0), (ch, ch)))
    g_xq_up = np.zeros((lanes, ns), dtype=complex)
    for i in range(lanes):
        for j in range(lanes):
            v = np.lib.stride_tricks.sliding_window_view(xq_pad[j], ns)
            grad_dec[i, j] = (v.conj() @ g_d[i])[::-1]
    for j in range(lanes):
        for i in range(lanes):
            g_xq_up[j] += np.convolve(g_d[i], np.conj(model.dec[i, j])[::-1], mode="same")
    # straight-through: the quantizer passes the reconstruction gradient to z
    g_z = g_xq_up[:, ::sps] + (2.0 * beta_commit / n_eff) * (z - xq) * sym_mask
    grad_enc = np.zeros_like(model.enc)
    wins = [_padded_windows(u[b], nw, sps) for b in range(lanes)]
    for a in range(lanes):
        for b in range(lanes):
            grad_enc[a, b] = g_z[a] @ np.conj(wins[b])
    n_int = int(mask.sum())
    mstep = max(a0 / (lanes * n_int), SIGMA2_FLOOR)
    return VqVaeGradients(grad_enc, grad_dec, bd, mstep, idx)


class _Adam:
    """Adam over a list of complex arrays, elementwise on real and imaginary parts."""

    def __init__(self, params: list[np.ndarray], lr: float, betas=(0.9, 0.999), eps=1e-8):
        self.params = params
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros(p.shape) for p in params]
        self.t = 0

    def step(self, grads: list[np.ndarray]) -> None:
        self.t += 1
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * (g.real**2 + g.imag**2 if np.iscomplexobj(g) else g**2)
            mhat = m / (1 - self.b1**self.t)
            vhat = v / (1 - self.b2**self.t)
            denom = np.sqrt(vhat) + self.eps
            if np.iscomplexobj(p):
                p -= self.lr * (mhat.real / denom + 1j * (mhat.imag / denom))
            else:
                p -= self.lr * mhat / denom


@dataclass
class VaeTrainConfig:
    lr_enc: float = 1e-3
    lr_dec: float = 1e-3
    batch_symbols: int = 256
    betas: tuple = (0.9, 0.999)
    beta_commit: float = 0.25   # only used by the VQ-VAE variant
    ser_block: int = 4          # batches per SER-trace point


@dataclass
class VaeTrainResult:
    model: VaeLeModel
    trace: list                 # per-step ElboBreakdown / VqVaeBreakdown
    ser_trace: np.ndarray       # per ser_block error-rate points
    ser_block_symbols: int
    steps: int


def _train(
    rx,
    model0: VaeLeModel,
    n_steps: int,
    cfg: VaeTrainConfig,
    reference,
    variant: str,
) -> VaeTrainResult:
    u = _as_lanes(rx)
    lanes, ns = u.shape
    model = model0.copy()
    sps = model.sps
    bs = cfg.batch_symbols * sps
    if bs < model.dec.shape[2] * 4:
        raise ParameterError("batch must cover at least four decoder lengths")
    if bs > ns:
        raise ParameterError("batch larger than the signal block")
    opt = _Adam([model.enc], cfg.lr_enc, cfg.betas)
    opt_dec = _Adam([model.dec], cfg.lr_dec, cfg.betas)
    trace = []
    ser_points = []
    pending_z: list[np.ndarray] = []
    pending_ref: list[np.ndarray] = []
    n_batches = ns // bs
    last_good = model.copy()
    for step in range(n_steps):
        k = step % n_batches
        sl = slice(k * bs, (k + 1) * bs)
        batch = u[:, sl]
        if variant == "elbo":
            g = elbo_gradients(batch, model)
            total = g.breakdown.total
        else:
            g = vqvae_gradients(batch, model, cfg.beta_commit)
            total = g.breakdown.total
        if not np.isfinite(total):
            raise TrainingError(
                f"non-finite loss at step {step}", details=(trace, last_good)
            )
        opt.step([g.enc])
        opt_dec.step([g.dec])
        model.sigma2 = g.sigma2_mstep
        trace.append(g.breakdown)
        if step % 50 == 0:
            last_good = model.copy()
        if reference is not None:
            z = _equalize(batch, model.enc, sps)
            pending_z.append(z)
            refs = [np.asarray(r)[k * cfg.batch_symbols : (k + 1) * cfg.batch_symbols] for r in reference]
            pending_ref.append(np.stack(refs))
            if len(pending_z) == cfg.ser_block:
                zcat = np.concatenate(pending_z, axis=1)
                rcat = np.concatenate(pending_ref, axis=1)
                if lanes == 2:
                    res = dualpol_ser(zcat[0], zcat[1], rcat[0], rcat[1],
                                      model.constellation, max_lag=model.enc.shape[2])
                    ser_points.append(res.ser)
                else:
                    from .constellation import hard_decide
                    from .signals import symbol_error_rate
                    dec_idx = hard_decide(zcat[0], model.constellation)
                    ser_points.append(
                        symbol_error_rate(dec_idx, rcat[0],
                                          max_lag=model.enc.shape[2]).ser
                    )
                pending_z.clear()
                pending_ref.clear()
    return VaeTrainResult(
        model,
        trace,
        np.asarray(ser_points),
        cfg.ser_block * cfg.batch_symbols,
        n_steps,
    )


def vae_train(
    rx,
    model0: VaeLeModel,
    n_steps: int,
    cfg: VaeTrainConfig | None = None,
    reference=None,
) -> VaeTrainResult:
    """Mini-batch blind training of the VAE-LE.

    Batches walk the received stream sequentially (wrapping), so the SER trace
    vs consumed symbols measures startup behavior. ``reference`` (per-lane
    transmitted indices) is used only for that diagnostic trace, never for
    adaptation. Deterministic: no randomness beyond the input data.
    """
    return _train(rx, model0, n_steps, cfg or VaeTrainConfig(), reference, "elbo")


def vqvae_train(
    rx,
    model0: VaeLeModel,
    n_steps: int,
    cfg: VaeTrainConfig | None = None,
    reference=None,
) -> VaeTrainResult:
    """Blind training with the hard-quantizer cost (VQ-VAE simplification)."""
    return _train(rx, model0, n_steps, cfg or VaeTrainConfig(), reference, "vq")


class ChannelEstimate(NamedTuple):
    response: np.ndarray     # decoder taps, (L, L, Nh)
    score: float             # alignment score in [0, 1] against the ground truth
    lag: int
    permuted: bool


def channel_estimate(model: VaeLeModel, true_response: np.ndarray) -> ChannelEstimate:
    """Score the decoder taps against a known composite channel response.

    The score is max over integer lag, lane permutation, and per-lane phase of
    |<h, g>| / (||h|| ||g||), accumulated per symbol-lane column so each
    blind lane may carry its own phase. 1.0 means a perfect match up to those
    (unobservable) ambiguities.
    """
    h = model.dec
    g = np.asarray(true_response, dtype=complex)
    if g.ndim == 2:
        g = g[None, None] if g.shape[0] != 2 else g[:, :, None]
    lanes = h.shape[0]
    if g.shape[:2] != (lanes, lanes):
        raise ParameterError("ground truth lane count does not match the decoder")
    nh, ng = h.shape[2], g.shape[2]
    norm = np.linalg.norm(h) * np.linalg.norm(g)
    if norm == 0:
        return ChannelEstimate(h.copy(), 0.0, 0, False)
    max_lag = (nh + ng) // 2
    perms = [np.arange(lanes)]
    if lanes == 2:
        perms.append(np.array([1, 0]))
    best = (0.0, 0, False)
    gp = np.pad(g, ((0, 0), (0, 0), (max_lag + nh, max_lag + nh)))
    for lag in range(-max_lag, max_lag + 1):
        # align h[k] with g[k - lag]
        start = max_lag + nh + (nh // 2 - ng // 2) - lag
        gs = gp[:, :, start : start + nh]
        for pi, perm in enumerate(perms):
            total = 0.0
            for j in range(lanes):
                total += abs(np.sum(h[:, j, :] * np.conj(gs[:, perm[j], :])))
            score = total / norm
            if score > best[0]:
                best = (float(score), lag, pi == 1)
    return ChannelEstimate(h.copy(), best[0], best[1], best[2])
