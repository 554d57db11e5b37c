"""Cell geometry and per-drop channel synthesis.

One "drop" places users and the jammer in a hexagonal cell and draws a
frequency-selective channel for every link; the realization then stays
frozen for all timeslots of a horizon. Large-scale attenuation is
``distance^-eta`` with lognormal shadowing per link; small-scale fading is a
tapped delay line with an exponential power-delay profile, evaluated at each
subband's center frequency.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "ChannelParams",
    "CellGeometry",
    "ChannelRealization",
    "hexagon_contains",
    "sample_hexagon",
    "place_rrhs",
    "drop_positions",
    "pathloss_gain_sq",
    "tap_delay_profile",
    "rayleigh_subband_gains",
    "generate_channel",
]

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class ChannelParams:
    """Static propagation and numerology parameters."""

    bandwidth_hz: float = 10e6
    num_subbands: int = 16
    noise_psd_w_per_hz: float = 4e-21
    pathloss_exponent: float = 3.76
    shadowing_std_db: float = 8.0
    rms_delay_spread_s: float = 500e-9
    num_taps: int = 8
    min_distance_m: float = 10.0

    def __post_init__(self):
        if self.num_subbands < 1:
            raise ValueError("num_subbands must be >= 1")
        if not self.pathloss_exponent > 2.0:
            raise ValueError("pathloss_exponent must be > 2")
        if self.num_taps < 1:
            raise ValueError("num_taps must be >= 1")

    @property
    def subband_bandwidth_hz(self) -> float:
        return self.bandwidth_hz / self.num_subbands

    @property
    def noise_power_w(self) -> float:
        # per-subband noise power: PSD times subband width
        return self.noise_psd_w_per_hz * self.bandwidth_hz / self.num_subbands


def hexagon_contains(points, circumradius: float, atol: float = 1e-9):
    """True where ``points`` lie inside the flat-top hexagon of the given
    circumradius centered at the origin."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x = np.abs(pts[:, 0])
    y = np.abs(pts[:, 1])
    tol = atol * circumradius
    inside = (y <= _SQRT3 / 2.0 * circumradius + tol) \
        & (_SQRT3 * x + y <= _SQRT3 * circumradius + tol)
    return inside if np.ndim(points) > 1 else bool(inside[0])


def place_rrhs(num_rrh: int, cell_radius_m: float) -> np.ndarray:
    """Deterministic antenna layout: one at the center, the rest equally
    spaced on the circle of radius ``2/3`` of the cell radius, starting at
    angle zero."""
    if num_rrh < 1:
        raise ValueError("num_rrh must be >= 1")
    positions = np.zeros((num_rrh, 2))
    if num_rrh > 1:
        angles = 2.0 * np.pi * np.arange(num_rrh - 1) / (num_rrh - 1)
        ring = 2.0 * cell_radius_m / 3.0
        positions[1:, 0] = ring * np.cos(angles)
        positions[1:, 1] = ring * np.sin(angles)
    return positions


def sample_hexagon(num_points: int, circumradius: float,
                   rng: np.random.Generator) -> np.ndarray:
    """Uniform points in the flat-top hexagon, by rejection from its
    bounding box."""
    out = np.empty((num_points, 2))
    filled = 0
    while filled < num_points:
        batch = max(2 * (num_points - filled), 16)
        cand = rng.uniform(-1.0, 1.0, size=(batch, 2))
        cand[:, 0] *= circumradius
        cand[:, 1] *= _SQRT3 / 2.0 * circumradius
        keep = cand[hexagon_contains(cand, circumradius)]
        take = min(len(keep), num_points - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def drop_positions(num_users: int, cell_radius_m: float,
                   rng: np.random.Generator):
    """Draw user positions and one jammer position, all uniform in the cell.

    Returns ``(user_positions, jammer_position)``; reproducible from the
    generator's seed.
    """
    if num_users < 1:
        raise ValueError("num_users must be >= 1")
    pts = sample_hexagon(num_users + 1, cell_radius_m, rng)
    return pts[:num_users], pts[num_users]


@dataclass
class CellGeometry:
    """Positions of everything in one drop. All points must lie inside the
    hexagon; for more than one antenna the layout must follow
    :func:`place_rrhs` (center plus a ring at 2/3 of the cell radius)."""

    cell_radius_m: float
    rrh_positions: np.ndarray
    user_positions: np.ndarray
    jammer_position: np.ndarray

    def __post_init__(self):
        self.rrh_positions = np.atleast_2d(np.asarray(self.rrh_positions, dtype=float))
        self.user_positions = np.atleast_2d(np.asarray(self.user_positions, dtype=float))
        self.jammer_position = np.asarray(self.jammer_position, dtype=float)
        for name, pts in (("rrh_positions", self.rrh_positions),
                          ("user_positions", self.user_positions),
                          ("jammer_position", self.jammer_position[None, :])):
            if not np.all(hexagon_contains(pts, self.cell_radius_m)):
                raise ValueError(f"{name} outside the cell hexagon")
        num_rrh = len(self.rrh_positions)
        if num_rrh > 1:
            radii = np.hypot(self.rrh_positions[:, 0], self.rrh_positions[:, 1])
            at_center = np.isclose(radii, 0.0, atol=1e-6 * self.cell_radius_m)
            ring = 2.0 * self.cell_radius_m / 3.0
            on_ring = np.isclose(radii, ring, rtol=1e-9, atol=1e-6)
            if at_center.sum() != 1 or not np.all(at_center | on_ring):
                raise ValueError(
                    "multi-antenna layout must be one center antenna plus a ring "
                    "at 2/3 of the cell radius")

    @property
    def num_rrh(self) -> int:
        return len(self.rrh_positions)

    @property
    def num_users(self) -> int:
        return len(self.user_positions)


def pathloss_gain_sq(distance_m, params: ChannelParams):
    """Linear squared-gain attenuation at a distance, with the short-range
    clamp that keeps the power law finite."""
    clamped = np.maximum(np.asarray(distance_m, dtype=float), params.min_distance_m)
    return clamped ** (-params.pathloss_exponent)


@functools.lru_cache(maxsize=None)
def tap_delay_profile(params: ChannelParams):
    """Delays and normalized powers of the fading taps.

    Tap powers decay exponentially; the decay constant is solved so the
    discrete profile's RMS delay spread equals ``rms_delay_spread_s``
    exactly. Returns ``(delays_s, powers)``.
    """
    taps = params.num_taps
    if taps == 1:
        return np.zeros(1), np.ones(1)
    # spacing chosen so the uniform-power limit overshoots the target spread,
    # guaranteeing a root for the decay constant
    uniform_limit = math.sqrt((taps ** 2 - 1) / 12.0)
    spacing = 2.0 * params.rms_delay_spread_s / uniform_limit
    delays = spacing * np.arange(taps)

    def spread(decay_s: float) -> float:
        p = np.exp(-delays / decay_s)
        p /= p.sum()
        mean = float(p @ delays)
        return math.sqrt(float(p @ delays ** 2) - mean ** 2)

    target = params.rms_delay_spread_s
    decay = brentq(lambda d: spread(d) - target,
                   1e-6 * target, 1e9 * target, xtol=1e-300, rtol=1e-14)
    powers = np.exp(-delays / decay)
    powers /= powers.sum()
    return delays, powers


def rayleigh_subband_gains(params: ChannelParams, num_links: int,
                           rng: np.random.Generator) -> np.ndarray:
    """Per-subband fading amplitudes for independent links, shape
    ``(num_links, num_subbands)``. The expected squared gain is 1 on every
    subband (unit-power profile)."""
    delays, powers = tap_delay_profile(params)
    taps = (rng.standard_normal((num_links, params.num_taps))
            + 1j * rng.standard_normal((num_links, params.num_taps)))
    taps *= np.sqrt(powers / 2.0)
    centers = (np.arange(params.num_subbands) - (params.num_subbands - 1) / 2.0) \
        * params.subband_bandwidth_hz
    phase = np.exp(-2j * np.pi * np.outer(delays, centers))
    return np.abs(taps @ phase)


@dataclass
class ChannelRealization:
    """Amplitude gains of every link for one drop.

    ``h[k, n, r]`` serves user ``k`` from antenna ``r`` on subband ``n``;
    ``g[k, n]`` is the jammer-to-user link; ``h_j[n, r]`` the
    antenna-to-jammer link used only by the ground-truth jammer.
    """

    h: np.ndarray
    g: np.ndarray
    h_j: np.ndarray
    noise_power_w: float
    h_sq: np.ndarray = field(init=False, repr=False)
    g_sq: np.ndarray = field(init=False, repr=False)
    hj_sq: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("h", "g", "h_j"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)) or not np.all(arr > 0.0):
                raise ValueError(f"{name} gains must be strictly positive and finite")
        if not self.noise_power_w > 0.0:
            raise ValueError("noise_power_w must be > 0")
        self.h_sq = self.h ** 2
        self.g_sq = self.g ** 2
        self.hj_sq = self.h_j ** 2

    @property
    def num_users(self) -> int:
        return self.h.shape[0]

    @property
    def num_subbands(self) -> int:
        return self.h.shape[1]

    @property
    def num_rrh(self) -> int:
        return self.h.shape[2]


def _link_amplitudes(distances, params, num_subbands, rng,
                     include_fading, include_shadowing):
    """Amplitudes for a batch of links at given distances, shape
    ``(len(distances), num_subbands)``."""
    distances = np.asarray(distances, dtype=float)
    large_scale = pathloss_gain_sq(distances, params)
    if include_shadowing:
        shadow_db = rng.normal(0.0, params.shadowing_std_db, size=distances.shape)
        large_scale = large_scale * 10.0 ** (shadow_db / 10.0)
    amps = np.sqrt(large_scale)[:, None]
    if include_fading:
        amps = amps * rayleigh_subband_gains(params, len(distances), rng)
    else:
        amps = np.broadcast_to(amps, (len(distances), num_subbands)).copy()
    return amps


def generate_channel(geometry: CellGeometry, params: ChannelParams,
                     rng: np.random.Generator,
                     jammer_link_params: ChannelParams | None = None,
                     include_fading: bool = True,
                     include_shadowing: bool = True) -> ChannelRealization:
    """Draw the full channel realization for one drop.

    Jammer-side links follow the same model; pass ``jammer_link_params`` to
    override their propagation parameters. The fading/shadowing switches
    exist for tests that isolate the distance law.
    """
    jp = jammer_link_params if jammer_link_params is not None else params
    K = geometry.num_users
    R = geometry.num_rrh
    S = params.num_subbands

    d_user_rrh = np.linalg.norm(
        geometry.user_positions[:, None, :] - geometry.rrh_positions[None, :, :],
        axis=2)                                                     # (K, R)
    d_jam_user = np.linalg.norm(
        geometry.user_positions - geometry.jammer_position, axis=1)  # (K,)
    d_rrh_jam = np.linalg.norm(
        geometry.rrh_positions - geometry.jammer_position, axis=1)   # (R,)

    h_flat = _link_amplitudes(d_user_rrh.reshape(-1), params, S, rng,
                              include_fading, include_shadowing)
    h = h_flat.reshape(K, R, S).transpose(0, 2, 1)                   # (K, S, R)
    g = _link_amplitudes(d_jam_user, jp, S, rng,
                         include_fading, include_shadowing)          # (K, S)
    h_j = _link_amplitudes(d_rrh_jam, jp, S, rng,
                           include_fading, include_shadowing).T      # (S, R)

    return ChannelRealization(h=h, g=g, h_j=h_j,
                              noise_power_w=params.noise_power_w)
