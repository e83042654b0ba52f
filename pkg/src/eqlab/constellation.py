"""Constellations, probabilistic shaping, symbol sourcing, and the soft demapper.

Shaping uses the Maxwell-Boltzmann family ``p_i ~ exp(-lambda*|c_i|^2)``
selected by bisection on lambda until the prior entropy hits the requested
target. Points are re-normalized to unit average energy under the shaped
priors so SNR definitions stay family-independent. Shaping is applied per 2-D
symbol (per polarization).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signals import ParameterError, RngStream


class NumericalError(RuntimeError):
    """An iterative numerical procedure failed to converge."""


@dataclass
class Constellation:
    """Symbol alphabet with bit labels and (possibly shaped) priors."""

    points: np.ndarray
    labels: list[str]
    priors: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        self.priors = np.asarray(self.priors, dtype=float)
        if self.points.size != self.priors.size or len(self.labels) != self.points.size:
            raise ParameterError("points, labels, and priors must have equal length")
        if abs(self.priors.sum() - 1.0) > 1e-12:
            raise ParameterError("priors must sum to 1")
        if np.any(self.priors < 0):
            raise ParameterError("priors must be non-negative")
        d = np.abs(self.points[:, None] - self.points[None, :])
        if np.any(d[~np.eye(len(self.points), dtype=bool)] < 1e-12):
            raise ParameterError("constellation points must be pairwise distinct")

    def __len__(self) -> int:
        return self.points.size

    @property
    def order(self) -> int:
        return self.points.size

    def mean_energy(self) -> float:
        return float(np.sum(self.priors * np.abs(self.points) ** 2))

    def entropy_bits(self) -> float:
        p = self.priors[self.priors > 0]
        return float(-(p * np.log2(p)).sum())

    def bits_per_symbol(self) -> int:
        return len(self.labels[0])

    def to_text(self) -> str:
        """Serialize as a line-oriented text block (name, then one point per line)."""
        lines = [f"constellation {self.name} {len(self)}"]
        for c, lab, p in zip(self.points, self.labels, self.priors):
            lines.append(f"{float(c.real)!r} {float(c.imag)!r} {float(p)!r} {lab}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Constellation":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "constellation" or len(lines) - 1 != int(head[2]):
            raise ParameterError("malformed constellation text")
        pts, labs, pri = [], [], []
        for ln in lines[1:]:
            re_, im_, p, lab = ln.split()
            pts.append(complex(float(re_), float(im_)))
            labs.append(lab)
            pri.append(float(p))
        return cls(np.array(pts), labs, np.array(pri), name=head[1])


def _gray(n_bits: int) -> list[int]:
    return [i ^ (i >> 1) for i in range(1 << n_bits)]


def build_pam(order: int) -> Constellation:
    """Gray-labeled PAM with uniform priors, normalized to unit average energy."""
    if order not in (2, 4, 8):
        raise ParameterError(f"unsupported PAM order {order}")
    n_bits = order.bit_length() - 1
    levels = np.arange(-(order - 1), order, 2, dtype=float)
    levels /= np.sqrt(np.mean(levels**2))
    gray = _gray(n_bits)
    labels = [format(gray[i], f"0{n_bits}b") for i in range(order)]
    priors = np.full(order, 1.0 / order)
    return Constellation(levels.astype(complex), labels, priors, name=f"pam{order}")


def build_qam(order: int) -> Constellation:
    """Square Gray-labeled QAM with uniform priors and unit average energy."""
    if order not in (4, 16, 64, 256):
        raise ParameterError(f"unsupported QAM order {order}")
    side = int(np.sqrt(order))
    n_bits_side = side.bit_length() - 1
    amps = np.arange(-(side - 1), side, 2, dtype=float)
    gray = _gray(n_bits_side)
    pts, labels = [], []
    for i, a in enumerate(amps):
        for q, b in enumerate(amps):
            pts.append(a + 1j * b)
            labels.append(
                format(gray[i], f"0{n_bits_side}b") + format(gray[q], f"0{n_bits_side}b")
            )
    pts = np.array(pts)
    pts /= np.sqrt(np.mean(np.abs(pts) ** 2))
    priors = np.full(order, 1.0 / order)
    return Constellation(pts, labels, priors, name=f"qam{order}")


def mb_priors(points: np.ndarray, lam: float) -> np.ndarray:
    """Maxwell-Boltzmann priors exp(-lam*|c|^2), normalized."""
    w = np.exp(-lam * np.abs(np.asarray(points)) ** 2)
    return w / w.sum()


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def pcs_shape(
    base: Constellation,
    target_entropy_bits: float,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> Constellation:
    """Shape ``base`` to the target prior entropy via bisection on lambda >= 0.

    Returns a new constellation whose Maxwell-Boltzmann priors hit the target
    entropy within ``tol`` bits and whose points are re-scaled to unit average
    energy under the shaped priors. The lambda found is stored in the name for
    traceability.
    """
    m = len(base)
    if not (0.0 < target_entropy_bits < np.log2(m)):
        raise ParameterError(
            f"target entropy must lie in (0, {np.log2(m):.3f}) bits, got {target_entropy_bits}"
        )
    lo, hi = 0.0, 1.0
    while _entropy_bits(mb_priors(base.points, hi)) > target_entropy_bits:
        hi *= 2
        if hi > 1e12:
            raise NumericalError("failed to bracket lambda for target entropy")
    lam = hi
    for _ in range(max_iter):
        lam = 0.5 * (lo + hi)
        h = _entropy_bits(mb_priors(base.points, lam))
        if h > target_entropy_bits:
            lo = lam
        else:
            hi = lam
        if hi - lo < 1e-15 and abs(h - target_entropy_bits) < tol:
            break
    priors = mb_priors(base.points, lam)
    if abs(_entropy_bits(priors) - target_entropy_bits) > tol:
        raise NumericalError(
            f"bisection did not reach entropy {target_entropy_bits} within {tol} bits"
        )
    energy = np.sum(priors * np.abs(base.points) ** 2)
    points = base.points / np.sqrt(energy)
    return Constellation(
        points,
        list(base.labels),
        priors,
        name=f"{base.name}-pcs{target_entropy_bits:g}(lam={lam:.6g})",
    )


def sample_symbols(
    c: Constellation, n: int, rng: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` i.i.d. symbol indices from the priors; returns (indices, points)."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    g = rng.generator()
    idx = g.choice(len(c), size=n, p=c.priors)
    return idx, c.points[idx]


@dataclass
class PosteriorBlock:
    """Per-symbol posterior probabilities over the constellation (rows on the simplex)."""

    q: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        if self.q.ndim != 2:
            raise ParameterError("posterior matrix must be 2-D")
        if np.any(self.q < -1e-15):
            raise ParameterError("posterior entries must be non-negative")
        if np.any(np.abs(self.q.sum(axis=1) - 1.0) > 1e-9):
            raise ParameterError("posterior rows must sum to 1")


def soft_demap_q(y: np.ndarray, c: Constellation, noise_var: float) -> np.ndarray:
    """Raw posterior matrix q[n, k] ~ p_k * exp(-|y_n - c_k|^2 / noise_var).

    Computed in the log domain with per-row max subtraction so strongly shaped
    priors and small noise variances cannot overflow.
    """
    if noise_var <= 0:
        raise ParameterError(f"noise_var must be positive, got {noise_var}")
    y = np.atleast_1d(np.asarray(y))
    d2 = np.abs(y[:, None] - c.points[None, :]) ** 2
    logp = np.full(len(c), -np.inf)
    nz = c.priors > 0
    logp[nz] = np.log(c.priors[nz])
    logits = logp[None, :] - d2 / noise_var
    logits -= logits.max(axis=1, keepdims=True)
    q = np.exp(logits)
    q /= q.sum(axis=1, keepdims=True)
    return q


def soft_demap(y: np.ndarray, c: Constellation, noise_var: float) -> PosteriorBlock:
    """Gaussian soft demapper; see :func:`soft_demap_q`."""
    return PosteriorBlock(soft_demap_q(y, c, noise_var))


def hard_decide(y: np.ndarray, c: Constellation) -> np.ndarray:
    """Minimum-distance decisions; returns symbol indices."""
    y = np.atleast_1d(np.asarray(y))
    return np.argmin(np.abs(y[:, None] - c.points[None, :]) ** 2, axis=1)


def rotation_permutation(c: Constellation) -> np.ndarray:
    """Index permutation implementing a +90 degree rotation of the constellation.

    Only defined for alphabets closed under multiplication by 1j (square QAM).
    """
    rotated = 1j * c.points
    d = np.abs(rotated[:, None] - c.points[None, :])
    perm = np.argmin(d, axis=1)
    if np.any(d[np.arange(len(c)), perm] > 1e-9) or len(set(perm.tolist())) != len(c):
        raise ParameterError("constellation is not closed under 90 degree rotation")
    return perm


def bit_error_rate(
    decisions: np.ndarray, reference: np.ndarray, c: Constellation
) -> float:
    """BER from symbol indices via the constellation's bit labels."""
    decisions = np.asarray(decisions)
    reference = np.asarray(reference)
    if decisions.size != reference.size:
        raise ParameterError("decisions and reference must have equal length")
    bits = np.array([[int(b) for b in lab] for lab in c.labels], dtype=np.int8)
    diff = bits[decisions] ^ bits[reference]
    return float(diff.mean())
