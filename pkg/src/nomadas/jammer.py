"""Ground-truth reactive jammer.

The jammer watches every subband and fires for a whole timeslot whenever the
power it receives on a subband exceeds its hidden threshold. Only the
simulation engine may construct or query this object; schedulers see its
effects solely through end-of-slot feedback (trigger outcomes and perceived
jamming powers).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import ChannelRealization

__all__ = ["JammerTruth"]


@dataclass
class JammerTruth:
    """Hidden threshold detector plus its side of the channel.

    ``rrh_gain_sq[n, r]`` is the squared antenna-to-jammer gain,
    ``user_gain_sq[k, n]`` the squared jammer-to-user gain.
    """

    threshold_w: float
    jam_power_w: float
    rrh_gain_sq: np.ndarray
    user_gain_sq: np.ndarray

    def __post_init__(self):
        if not self.threshold_w > 0.0:
            raise ValueError("threshold_w must be > 0")
        if self.jam_power_w < 0.0:
            raise ValueError("jam_power_w must be >= 0")

    @classmethod
    def from_channel(cls, channel: ChannelRealization, threshold_w: float,
                     jam_power_w: float) -> "JammerTruth":
        return cls(threshold_w=threshold_w, jam_power_w=jam_power_w,
                   rrh_gain_sq=channel.hj_sq, user_gain_sq=channel.g_sq)

    def received_power_w(self, n: int, contributions) -> float:
        """Composite power the jammer detects on subband ``n``.

        ``contributions`` is an iterable of ``(rrh, power_w)`` pairs; for a
        power-multiplexed pair the caller passes the summed pair power on
        the shared antenna, for two-antenna transmission one entry per
        antenna.
        """
        return float(sum(p * self.rrh_gain_sq[n, r] for r, p in contributions))

    def triggered(self, n: int, contributions) -> bool:
        """Trigger decision for subband ``n`` (strict exceedance)."""
        return self.received_power_w(n, contributions) > self.threshold_w

    def perceived_jam_power(self, k: int, n: int) -> float:
        """Jamming power user ``k`` perceives on subband ``n`` when jammed."""
        return float(self.jam_power_w * self.user_gain_sq[k, n])
