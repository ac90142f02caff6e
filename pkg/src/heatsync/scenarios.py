"""Built-in demo scenarios.

The demo network has five followers on a tree (edges 1-3, 2-4, 3-4, 4-5)
with followers 1..3 hearing the leader, zero reaction rate, unit diffusion
and a shared forcing term.  Three preset variants exist, selected by the
preset tokens used in config files:

* ``sectionV``  - boundary gain 3, coupling gain -2 (full closed loop)
* ``fig5_k0``   - boundary gain 0 (leader links cut, coupling only)
* ``fig6_g0``   - coupling gain 0 (leader links only, agents 4 and 5 isolated)
"""
from __future__ import annotations

import numpy as np

from .graph import FollowerGraph, build_graph

PRESET_NAMES = ("sectionV", "fig5_k0", "fig6_g0")

DEMO_EDGES = ((1, 3), (2, 4), (3, 4), (4, 5))
DEMO_LEADERS = (1, 2, 3)
DEMO_ALPHA = 0.0
DEMO_BETA = 1.0
DEMO_K = 3.0
DEMO_G = -2.0
DEMO_T_END = 2.5


def demo_graph() -> FollowerGraph:
    return build_graph(5, DEMO_EDGES, DEMO_LEADERS)


def demo_initial_profiles(
    x: np.ndarray, leader_seventh_harmonic: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Initial profiles of the five demo followers and the leader.

    The leader profile carries a 2*cos(7x) term whose argument is 7x, not
    7*pi*x; pass ``leader_seventh_harmonic=True`` to use the harmonic
    variant 2*cos(7*pi*x) instead.
    """
    x = np.asarray(x, dtype=float)
    followers = np.vstack(
        [
            0.5 + 2.0 * np.cos(5 * np.pi * x) + np.cos(np.pi * x),
            np.ones_like(x),
            2.0 * np.cos(5 * np.pi * x),
            1.5 - 2.0 * np.cos(5 * np.pi * x),
            0.5 * np.cos(7 * np.pi * x),
        ]
    )
    mode = 7 * np.pi * x if leader_seventh_harmonic else 7 * x
    leader = 2.0 + np.cos(np.pi * x) + 2.0 * np.cos(mode)
    return followers, leader


def forcing_profile(x: np.ndarray, t: float) -> np.ndarray:
    """Shared source term (1 + cos(2 pi x)) sin(pi t) of the demo scenario."""
    return (1.0 + np.cos(2 * np.pi * np.asarray(x, dtype=float))) * np.sin(np.pi * t)


def preset_gains(name: str) -> tuple[float, float]:
    """(boundary gain, coupling gain) for a preset token."""
    if name == "sectionV":
        return DEMO_K, DEMO_G
    if name == "fig5_k0":
        return 0.0, DEMO_G
    if name == "fig6_g0":
        return DEMO_K, 0.0
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")
