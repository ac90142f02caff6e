"""Control-gain synthesis: boundary-gain windows and the coupling-gain search.

The admissible boundary gain k has a closed-form open interval per connected
component; the in-domain coupling gain g is then found by minimizing the top
certificate eigenvalue over a bracket.  That eigenvalue is convex in g (the
certificate matrix is affine in g), so a ternary search locates the
minimizer, which is also the maximal-margin choice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import (
    Certificate,
    NetworkConfig,
    _max_eig_fast,
    certificate_matrix,
    evaluate_certificate,
)
from .errors import (
    EmptyWindow,
    GraphNotConnected,
    InfeasibleInBracket,
    InvalidLeaderCount,
    UncontrollableComponent,
)
from .graph import FollowerGraph, connected_components

_PI_SQ = np.pi**2


@dataclass(frozen=True)
class Interval:
    """Open interval of admissible boundary gains; may be empty."""

    lo: float
    hi: float
    empty: bool = False

    @property
    def width(self) -> float:
        return 0.0 if self.empty else self.hi - self.lo

    @property
    def midpoint(self) -> float:
        if self.empty:
            raise EmptyWindow("empty interval has no midpoint")
        return 0.5 * (self.lo + self.hi)

    def contains(self, value: float) -> bool:
        return (not self.empty) and self.lo < value < self.hi


_EMPTY = Interval(lo=np.nan, hi=np.nan, empty=True)


@dataclass(frozen=True)
class ComponentPlan:
    """Per-component bookkeeping from the design pipeline."""

    component: tuple[int, ...]
    n_nodes: int
    leader_count: int
    window: Interval


@dataclass(frozen=True)
class GainDesign:
    """Synthesized gains plus the certificate that vouches for them."""

    k: float
    g: float
    k_window: Interval
    certificate: Certificate
    per_component: tuple[ComponentPlan, ...]


def k_window_full(alpha: float) -> Interval:
    """Admissible boundary gain interval when every agent hears the leader.

    Empty iff alpha >= pi^2/4.  Otherwise the open interval

        pi^2/2 - (pi/2) sqrt(pi^2 - 4 alpha) < k < pi^2/2 + (pi/2) sqrt(...)

    intersected with the trace condition k > alpha - pi^2/4 (which is in
    fact implied by the interval, but is intersected rather than assumed
    redundant).
    """
    if alpha >= _PI_SQ / 4.0:
        return _EMPTY
    radius = 0.5 * np.pi * np.sqrt(_PI_SQ - 4.0 * alpha)
    lo = max(alpha - _PI_SQ / 4.0, _PI_SQ / 2.0 - radius)
    hi = _PI_SQ / 2.0 + radius
    if lo >= hi:
        return _EMPTY
    return Interval(lo=lo, hi=hi)


def k_window_partial(alpha: float, n: int, s: int) -> Interval:
    """Admissible boundary gain interval with s of n agents leader-connected.

    Empty iff alpha >= s pi^2 / (4 n); otherwise

        pi^2/2 - (pi/2) sqrt(pi^2 - 4 (n/s) alpha) < k < pi^2/2 + (pi/2) sqrt(...)

    For s = n this coincides with the fully controlled interval.
    """
    if not 1 <= s <= n:
        raise InvalidLeaderCount(f"need 1 <= s <= n, got s={s}, n={n}")
    if alpha >= s * _PI_SQ / (4.0 * n):
        return _EMPTY
    radius = 0.5 * np.pi * np.sqrt(_PI_SQ - 4.0 * (n / s) * alpha)
    return Interval(lo=_PI_SQ / 2.0 - radius, hi=_PI_SQ / 2.0 + radius)


def _ternary_search_g(cfg, bracket, g_tol, margin):
    g_lo, g_hi = float(bracket[0]), float(bracket[1])
    if not g_lo < g_hi:
        raise ValueError(f"bracket must satisfy lo < hi, got {bracket}")

    def top_eig(g: float) -> float:
        return _max_eig_fast(certificate_matrix(cfg.with_gains(g=g)))

    lo, hi = g_lo, g_hi
    while hi - lo > g_tol:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if top_eig(m1) <= top_eig(m2):
            hi = m2
        else:
            lo = m1
    g_best = 0.5 * (lo + hi)
    cert = evaluate_certificate(certificate_matrix(cfg.with_gains(g=g_best)), margin)
    if not cert.feasible:
        raise InfeasibleInBracket(g_best=g_best, max_eig=cert.max_eig)
    return g_best, cert


def search_g(
    cfg: NetworkConfig,
    bracket: tuple[float, float] = (-1e4, 0.0),
    g_tol: float = 1e-6,
    margin: float = 1e-9,
) -> tuple[float, Certificate]:
    """Minimize the certificate's top eigenvalue over a coupling-gain bracket.

    Any g already on ``cfg`` is ignored.  The minimizer is returned together
    with its certificate when feasible; otherwise InfeasibleInBracket carries
    the best (g, max eigenvalue) pair found.  The follower graph must be
    connected; disconnected graphs need a per-component design (see
    ``design``).
    """
    if len(connected_components(cfg.graph)) != 1:
        raise GraphNotConnected("coupling-gain search needs a connected graph")
    return _ternary_search_g(cfg, bracket, g_tol, margin)


def design(
    graph: FollowerGraph,
    alpha: float,
    beta: float = 1.0,
    bracket: tuple[float, float] = (-1e4, 0.0),
    margin: float = 1e-9,
) -> GainDesign:
    """Full synthesis pipeline for a common boundary gain and coupling gain.

    Per connected component of the follower graph the admissible window is
    computed from (component size, leader count) at the rescaled reaction
    rate alpha/beta; the common k is the midpoint of the narrowest window.
    The coupling gain then comes from ``search_g`` on the whole network, and
    the returned certificate is always re-verified at the true beta.

    Raises UncontrollableComponent when some component has no leader node
    (the one case in which no coupling gain can help) and EmptyWindow when
    the reaction rate is too large for some component.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    alpha_scaled = alpha / beta
    plans: list[ComponentPlan] = []
    for comp in connected_components(graph):
        s_i = sum(1 for v in comp if v in graph.leader_set)
        if s_i < 1:
            raise UncontrollableComponent(comp)
        window = k_window_partial(alpha_scaled, len(comp), s_i)
        if window.empty:
            raise EmptyWindow(
                f"no admissible boundary gain for component {comp}: "
                f"alpha/beta={alpha_scaled:.6g} >= {s_i}*pi^2/(4*{len(comp)})"
            )
        plans.append(
            ComponentPlan(
                component=comp, n_nodes=len(comp), leader_count=s_i, window=window
            )
        )
    narrowest = min(plans, key=lambda p: p.window.width)
    k = narrowest.window.midpoint

    # The certificate block-decomposes over components, so one search on the
    # whole network covers the disconnected case too (every component has a
    # leader node by the check above); skip the single-component guard.
    base = NetworkConfig(graph=graph, alpha=alpha, beta=beta, k=k, g=0.0)
    g, cert = _ternary_search_g(base, bracket=bracket, g_tol=1e-6, margin=margin)
    return GainDesign(
        k=k,
        g=g,
        k_window=narrowest.window,
        certificate=cert,
        per_component=tuple(plans),
    )
