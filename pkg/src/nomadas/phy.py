"""Closed-form link math shared by the schedulers and the slot resolver.

Per-subband rates follow the Shannon capacity limit, with jamming entering as
extra interference power whenever the jammer fires. Every rate expression has
an exact power inverse, so a scheduler can provision for a required rate and
the resolver can check what was actually delivered. All functions are pure
and accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinkBudget",
    "EEInputs",
    "rate_single",
    "rate_second_user",
    "power_for_rate_single",
    "power_for_rate_second",
    "sic_feasible",
    "sic_decode_sinr",
    "enforce_pmc",
    "energy_efficiency",
    "required_rate",
    "update_avg_rate",
    "mat_rate",
    "mat_power",
]


def rate_single(power_w, gain_sq, noise_w, jam_w=0.0, jam_active=False,
                subband_bw_hz=None):
    """Rate in bit/s of a lone user on one subband.

    ``jam_w`` is the jamming power perceived at the receiver; it only counts
    as interference when ``jam_active`` is true.
    """
    interference = noise_w + np.where(jam_active, jam_w, 0.0)
    return subband_bw_hz * np.log2(1.0 + power_w * gain_sq / interference)


def rate_second_user(p1_w, p2_w, gain2_sq, noise_w, jam2_w=0.0,
                     jam_active=False, subband_bw_hz=None):
    """Rate in bit/s of the second (weaker) user of a power-multiplexed pair.

    The second user cannot cancel the first user's signal, so ``p1_w`` shows
    up as interference through the second user's own channel.
    """
    interference = p1_w * gain2_sq + noise_w + np.where(jam_active, jam2_w, 0.0)
    return subband_bw_hz * np.log2(1.0 + p2_w * gain2_sq / interference)


def power_for_rate_single(rate_bps, gain_sq, noise_plus_jam_w, subband_bw_hz):
    """Exact inverse of :func:`rate_single`: power needed for ``rate_bps``.

    Raises ``OverflowError`` for a scalar rate so large that the implied SNR
    does not fit a float.
    """
    snr = np.exp2(np.asarray(rate_bps, dtype=float) / subband_bw_hz) - 1.0
    if np.ndim(rate_bps) == 0 and not np.isfinite(snr):
        raise OverflowError(
            f"rate {rate_bps:.3e} bps on {subband_bw_hz:.3e} Hz overflows the power inversion")
    return noise_plus_jam_w / gain_sq * snr


def power_for_rate_second(deficit_bps, p1_w, gain2_sq, noise_w, jam2_w=0.0,
                          jam_active=False, subband_bw_hz=None):
    """Exact inverse of :func:`rate_second_user` for the second user's power."""
    snr = np.exp2(np.asarray(deficit_bps, dtype=float) / subband_bw_hz) - 1.0
    interference = p1_w * gain2_sq + noise_w + np.where(jam_active, jam2_w, 0.0)
    return snr * interference / gain2_sq


def sic_feasible(h1, h2, g1, g2, jam_active):
    """Whether the first user can decode-and-cancel the second user's signal.

    Without jamming the usual channel-gain ordering decides. Under jamming
    the comparison is between cross products of user and jammer-link
    amplitudes, which is where the jammer channel asymmetry enters. Ties are
    not feasible (strict inequalities).
    """
    if jam_active:
        return bool(h1 * g2 > h2 * g1)
    return bool(h1 > h2)


def sic_decode_sinr(p1_w, p2_w, gain_sq, noise_w, jam_w):
    """SINR seen when decoding the second user's signal at a receiver with
    squared channel gain ``gain_sq``, before any cancellation.

    Evaluating this at both receivers gives the exact feasibility comparison
    that :func:`sic_feasible` approximates by dropping the noise term.
    """
    return p2_w * gain_sq / (p1_w * gain_sq + noise_w + jam_w)


def enforce_pmc(p1_w, p2_w, h1_sq, jam1_w, jam_active, margin_m_w):
    """Raise the second user's power until power multiplexing is decodable.

    The first user can only cancel the second user's signal if that signal
    dominates what the first user receives; when it does not, the second
    power is pushed a relative margin above the violating level. Ties count
    as violations so the returned power always satisfies the strict
    condition (for positive inputs).
    """
    if jam_active:
        floor = p1_w * h1_sq + jam1_w
        if floor >= p2_w * h1_sq:
            return (1.0 + margin_m_w) * floor / h1_sq
    else:
        if p1_w >= p2_w:
            return (1.0 + margin_m_w) * p1_w
    return p2_w


def energy_efficiency(total_rate_bps, total_tx_power_w, active_rrh_count,
                      static_power_w, epsilon_w_per_bps):
    """System energy efficiency in bit/J.

    Denominator combines rate-proportional processing power, radiated power,
    and a static cost per active antenna. Zero rate (or an all-zero
    denominator) is defined as 0.
    """
    denom = (epsilon_w_per_bps * total_rate_bps + total_tx_power_w
             + active_rrh_count * static_power_w)
    if total_rate_bps <= 0.0 or denom <= 0.0:
        return 0.0
    return total_rate_bps / denom


def required_rate(timeslot_i, target_bps, avg_rate_prev_bps):
    """Rate needed in slot ``timeslot_i`` so the running average hits target.

    Negative values (user already ahead of target) clamp to zero: such a
    user simply sits out the slot.
    """
    raw = timeslot_i * np.asarray(target_bps, dtype=float) \
        - (timeslot_i - 1) * np.asarray(avg_rate_prev_bps, dtype=float)
    return np.maximum(raw, 0.0)


def update_avg_rate(timeslot_i, avg_prev_bps, achieved_bps):
    """Fold one slot's achieved rate into the running average."""
    inv = 1.0 / timeslot_i
    return (1.0 - inv) * np.asarray(avg_prev_bps, dtype=float) \
        + inv * np.asarray(achieved_bps, dtype=float)


def mat_rate(p_r1_w, h_r1_sq, p_r2_w, h_r2_sq, noise_w, jam_w, subband_bw_hz):
    """Rate of a user fed by two antennas on the same subband.

    Received powers add; ``jam_w`` is whatever jamming interference applies
    (the scheduler plans with it always present, the resolver passes the
    actual value).
    """
    signal = p_r1_w * h_r1_sq + p_r2_w * h_r2_sq
    return subband_bw_hz * np.log2(1.0 + signal / (noise_w + jam_w))


def mat_power(required_rate_bps, p_r1_w, h_r1_sq, h_r2_sq, noise_w, jam_w,
              subband_bw_hz):
    """Power needed on the second antenna to reach ``required_rate_bps``.

    Exact inverse of :func:`mat_rate` when positive; clamps to zero when the
    first antenna alone already suffices.
    """
    snr = np.exp2(np.asarray(required_rate_bps, dtype=float) / subband_bw_hz) - 1.0
    needed = snr * (noise_w + jam_w) - p_r1_w * h_r1_sq
    return np.maximum(needed, 0.0) / h_r2_sq


@dataclass
class LinkBudget:
    """Everything needed to rate one single-user link."""

    power_w: float
    gain_sq: float
    noise_w: float
    jam_w: float = 0.0
    jam_active: bool = False

    def __post_init__(self):
        if self.power_w < 0.0:
            raise ValueError("power_w must be >= 0")
        if not self.gain_sq > 0.0:
            raise ValueError("gain_sq must be > 0")
        if not self.noise_w > 0.0:
            raise ValueError("noise_w must be > 0")
        if self.jam_w < 0.0:
            raise ValueError("jam_w must be >= 0")

    def rate_bps(self, subband_bw_hz):
        return float(rate_single(self.power_w, self.gain_sq, self.noise_w,
                                 self.jam_w, self.jam_active, subband_bw_hz))


@dataclass
class EEInputs:
    """Aggregates feeding one energy-efficiency evaluation."""

    total_rate_bps: float
    total_tx_power_w: float
    active_rrh_count: int
    static_power_w: float
    epsilon_w_per_bps: float

    def __post_init__(self):
        if self.active_rrh_count != int(self.active_rrh_count):
            raise ValueError("active_rrh_count must be an integer")
        for name in ("total_rate_bps", "total_tx_power_w", "active_rrh_count",
                     "static_power_w", "epsilon_w_per_bps"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def efficiency(self):
        return energy_efficiency(self.total_rate_bps, self.total_tx_power_w,
                                 self.active_rrh_count, self.static_power_w,
                                 self.epsilon_w_per_bps)
