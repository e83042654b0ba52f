"""Evaluation helpers for blind equalizer outputs.

Blind 2x2 equalizers recover the transmitted streams only up to a constant
phase per lane, a 90-degree constellation rotation, an integer delay, and a
polarization swap. These helpers resolve all of that before scoring, so the
reported SER reflects the equalizer and not the ambiguity bookkeeping.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .constellation import (
    Constellation,
    bit_error_rate,
    hard_decide,
    rotation_permutation,
)
from .signals import symbol_error_rate


def fourth_power_phase(z: np.ndarray) -> float:
    """Constant phase offset estimate via the fourth-moment (Viterbi&Viterbi).

    Valid for square QAM where E[c^4] is real and negative; returns the
    residual phase modulo pi/2.
    """
    m4 = np.mean(np.asarray(z) ** 4)
    if m4 == 0:
        return 0.0
    return float(np.angle(-m4) / 4.0)


def derotate(z: np.ndarray, constellation: Constellation | None = None) -> np.ndarray:
    """Remove the constant modulo-pi/2 phase offset of a blind output lane."""
    return np.asarray(z) * np.exp(-1j * fourth_power_phase(z))


class DualPolSer(NamedTuple):
    ser: float        # mean over both lanes
    ser_x: float
    ser_y: float
    ber: float        # mean Gray-label BER under the same alignment
    swapped: bool


def _lane_ser(z, ref_idx, c, perm, max_lag):
    dec = hard_decide(derotate(z), c)
    res = symbol_error_rate(
        dec, ref_idx, ambiguity="qam_rotations", rotation_perm=perm, max_lag=max_lag
    )
    # apply the winning rotation/lag to get aligned decisions for the BER
    aligned = dec
    for _ in range(res.rotation):
        aligned = perm[aligned]
    if res.lag >= 0:
        a, b = aligned[res.lag :], ref_idx[: ref_idx.size - res.lag] if res.lag else ref_idx
    else:
        a, b = aligned[: res.lag], ref_idx[-res.lag :]
    n = min(a.size, b.size)
    ber = bit_error_rate(a[:n], b[:n], c) if n else 1.0
    return res.ser, ber


def dualpol_ser(
    zx: np.ndarray,
    zy: np.ndarray,
    ref_x: np.ndarray,
    ref_y: np.ndarray,
    c: Constellation,
    max_lag: int = 32,
) -> DualPolSer:
    """SER/BER of a dual-polarization blind output against known indices.

    Tries both lane pairings and, per lane, constant phase, the four QAM
    rotations, and integer lags; reports the best consistent assignment.
    """
    perm = rotation_permutation(c)
    straight_x = _lane_ser(zx, np.asarray(ref_x), c, perm, max_lag)
    straight_y = _lane_ser(zy, np.asarray(ref_y), c, perm, max_lag)
    crossed_x = _lane_ser(zx, np.asarray(ref_y), c, perm, max_lag)
    crossed_y = _lane_ser(zy, np.asarray(ref_x), c, perm, max_lag)
    straight = 0.5 * (straight_x[0] + straight_y[0])
    crossed = 0.5 * (crossed_x[0] + crossed_y[0])
    if crossed < straight:
        return DualPolSer(
            crossed, crossed_x[0], crossed_y[0], 0.5 * (crossed_x[1] + crossed_y[1]), True
        )
    return DualPolSer(
        straight, straight_x[0], straight_y[0], 0.5 * (straight_x[1] + straight_y[1]), False
    )


def symbols_to_reach(ser_trace: np.ndarray, block_symbols: int, threshold: float) -> float:
    """Symbols consumed until the per-block SER first drops below threshold.

    Returns +inf when the trace never crosses, which is how a failed startup
    (e.g. CMA on a shaped constellation) is reported.
    """
    trace = np.asarray(ser_trace, dtype=float)
    below = np.flatnonzero(trace < threshold)
    if below.size == 0:
        return float("inf")
    return float((below[0] + 1) * block_symbols)
