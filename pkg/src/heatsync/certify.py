"""Synchronization certificates for the coupled heat-equation network.

The sufficient condition for leader synchronization is negative definiteness
of a 2N x 2N block matrix assembled from the physics (reaction alpha,
diffusion beta), the boundary gains, the in-domain coupling gains and the
follower Laplacian.  Two builders exist:

* ``build_certificate`` takes the general form: matrix Lyapunov weight,
  per-agent gains, arbitrary beta.
* ``build_certificate_normalized`` takes the normalized form (beta = 1,
  identity weight, one common boundary gain and one common coupling gain)
  in which the condition is a linear matrix inequality in the coupling gain.

For normalized configs both builders produce the same matrix entrywise.
The coupling term enters the lower-right block once (as g*L in the
normalized form); for g <= 0 this is the conservative reading and it is the
one all the closed-form gain windows are derived from.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    GraphNotConnected,
    GridTooCoarse,
    InvalidSimplification,
)
from .graph import FollowerGraph, connected_components, laplacian, leader_mask
from .matrixkit import SymMatrix, is_negative_definite, sym_eigenvalues

_HALF_PI_SQ = np.pi**2 / 2.0

Gains = Union[float, Sequence[float]]


def _as_gain_vector(value: Gains, n: int, name: str) -> np.ndarray:
    if np.isscalar(value):
        return np.full(n, float(value))
    vec = np.asarray(value, dtype=float)
    if vec.shape != (n,):
        raise ValueError(f"{name} must be a scalar or a length-{n} sequence")
    return vec


@dataclass(frozen=True, eq=False)
class NetworkConfig:
    """One scenario: graph topology plus physical and control parameters.

    ``k`` is the boundary feedback gain (scalar or one value per follower;
    values on followers without leader access are inert because the leader
    mask multiplies them away).  ``g`` is the in-domain coupling gain, with
    the sign convention that the coupling term is ``+ g * L @ z``, so
    attractive coupling means g < 0.  ``weight`` is the Lyapunov weight
    matrix; None means identity.
    """

    graph: FollowerGraph
    alpha: float
    beta: float = 1.0
    k: Gains = 0.0
    g: Gains = 0.0
    weight: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        _as_gain_vector(self.k, self.graph.n, "k")
        _as_gain_vector(self.g, self.graph.n, "g")
        if self.weight is not None:
            w = np.asarray(self.weight, dtype=float)
            n = self.graph.n
            if w.shape != (n, n):
                raise DimensionMismatch(f"weight must be {n}x{n}, got {w.shape}")
            w = (w + w.T) / 2.0
            try:
                np.linalg.cholesky(w)
            except np.linalg.LinAlgError:
                raise ValueError("weight matrix must be positive definite")
            object.__setattr__(self, "weight", w)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def k_vector(self) -> np.ndarray:
        return _as_gain_vector(self.k, self.n, "k")

    @property
    def g_vector(self) -> np.ndarray:
        return _as_gain_vector(self.g, self.n, "g")

    @property
    def k_scalar(self) -> float | None:
        return float(self.k) if np.isscalar(self.k) else None

    @property
    def g_scalar(self) -> float | None:
        return float(self.g) if np.isscalar(self.g) else None

    @property
    def weight_matrix(self) -> np.ndarray:
        return np.eye(self.n) if self.weight is None else self.weight

    @property
    def is_normalized(self) -> bool:
        """Unit diffusion, identity weight, common scalar gains."""
        identity_weight = self.weight is None or np.array_equal(
            self.weight, np.eye(self.n)
        )
        return (
            self.beta == 1.0
            and identity_weight
            and self.k_scalar is not None
            and self.g_scalar is not None
        )

    def with_gains(self, k: Gains | None = None, g: Gains | None = None):
        changes = {}
        if k is not None:
            changes["k"] = k
        if g is not None:
            changes["g"] = g
        return replace(self, **changes)


@dataclass(frozen=True)
class Certificate:
    """Feasibility verdict for one certificate matrix.

    ``margin`` is the largest d such that the matrix stays negative
    semidefinite under a +d*I shift (zero when infeasible); it doubles as
    the guaranteed exponential decay margin of the error norm squared.
    """

    matrix: SymMatrix
    max_eig: float
    feasible: bool
    margin: float


def _require_followers(cfg_or_n) -> int:
    n = cfg_or_n if isinstance(cfg_or_n, int) else cfg_or_n.n
    if n < 1:
        raise DimensionMismatch("certificates need at least one follower")
    return n


def build_certificate(cfg: NetworkConfig) -> SymMatrix:
    """General 2N x 2N certificate matrix.

    Blocks, with P the weight, Kbar = diag(k) @ M the masked boundary gains,
    G = diag(g) and L the follower Laplacian::

        [ -(beta*pi^2/2) P     beta P Kbar                              ]
        [ beta (P Kbar)^T      2 alpha P - beta(P Kbar + (P Kbar)^T)
                                 + sym(P G L)                           ]

    where sym(X) = (X + X^T)/2.  Negative definiteness certifies exponential
    leader synchronization in the L2 norm.
    """
    n = _require_followers(cfg)
    p = cfg.weight_matrix
    lap = laplacian(cfg.graph).astype(float)
    mask = leader_mask(cfg.graph).astype(float)
    kbar = np.diag(cfg.k_vector) @ mask
    pkbar = p @ kbar
    pgl = p @ (np.diag(cfg.g_vector) @ lap)
    top = np.hstack([-(cfg.beta * _HALF_PI_SQ) * p, cfg.beta * pkbar])
    lower_right = 2.0 * cfg.alpha * p - cfg.beta * (pkbar + pkbar.T) + (pgl + pgl.T) / 2.0
    bottom = np.hstack([cfg.beta * pkbar.T, lower_right])
    full = np.vstack([top, bottom])
    if full.shape != (2 * n, 2 * n):
        raise DimensionMismatch(f"unexpected certificate shape {full.shape}")
    return SymMatrix(full)


def build_certificate_normalized(cfg: NetworkConfig) -> SymMatrix:
    """Certificate matrix in the normalized regime (beta=1, P=I, scalar gains)::

        [ -(pi^2/2) I    k M                     ]
        [ k M            2 alpha I - 2 k M + g L ]

    Raises InvalidSimplification when the config is not in that regime; use
    ``build_certificate`` there instead.
    """
    n = _require_followers(cfg)
    if not cfg.is_normalized:
        raise InvalidSimplification(
            "normalized builder needs beta=1, identity weight and scalar gains"
        )
    k = cfg.k_scalar
    g = cfg.g_scalar
    lap = laplacian(cfg.graph).astype(float)
    mask = leader_mask(cfg.graph).astype(float)
    eye = np.eye(n)
    top = np.hstack([-_HALF_PI_SQ * eye, k * mask])
    bottom = np.hstack([k * mask, 2.0 * cfg.alpha * eye - 2.0 * k * mask + g * lap])
    return SymMatrix(np.vstack([top, bottom]))


def build_certificate_fully_controlled(n: int, alpha: float, k: float) -> SymMatrix:
    """Certificate for the fully controlled, uncoupled case, 2n x 2n::

        [ -(pi^2/2) I_n    k I_n          ]
        [ k I_n            2(alpha-k) I_n ]

    This is the 2x2 scalar kernel expanded over n agents; when it is negative
    definite, adding any coupling g <= 0 keeps the full certificate feasible.
    """
    n = _require_followers(int(n))
    eye = np.eye(n)
    top = np.hstack([-_HALF_PI_SQ * eye, k * eye])
    bottom = np.hstack([k * eye, 2.0 * (alpha - k) * eye])
    return SymMatrix(np.vstack([top, bottom]))


def certificate_matrix(cfg: NetworkConfig) -> SymMatrix:
    """The appropriate builder for the config: normalized form when possible."""
    return build_certificate_normalized(cfg) if cfg.is_normalized else build_certificate(cfg)


def schur_reduction(cfg: NetworkConfig) -> SymMatrix:
    """N x N Schur complement of the normalized certificate::

        D = 2 k M - 2 alpha I - g L - (2 k^2 / pi^2) M

    The full 2N x 2N certificate is negative definite iff D is positive
    definite (the upper-left block is unconditionally negative).
    """
    n = _require_followers(cfg)
    if not cfg.is_normalized:
        raise InvalidSimplification(
            "schur reduction is defined for the normalized regime only"
        )
    k = cfg.k_scalar
    g = cfg.g_scalar
    lap = laplacian(cfg.graph).astype(float)
    mask = leader_mask(cfg.graph).astype(float)
    eye = np.eye(n)
    d = 2.0 * k * mask - 2.0 * cfg.alpha * eye - g * lap - (2.0 * k**2 / np.pi**2) * mask
    return SymMatrix(d)


def coupling_gain_feasible(cfg: NetworkConfig) -> bool:
    """Existence test for an in-domain gain making the certificate feasible.

    For a connected follower graph the incidence kernel is the span of the
    all-ones vector, so by Finsler's lemma a feasible g exists iff the
    quadratic form of Q = 2 alpha I - 2 k M + (2 k^2/pi^2) M at the all-ones
    vector is negative, i.e. 2 k s - 2 alpha N - (2 k^2/pi^2) s > 0 with s
    the leader count.  The coupling gain cannot influence this quantity
    because L annihilates the all-ones vector.

    Raises GraphNotConnected on disconnected graphs, where the kernel is
    larger and this scalar test would be incomplete.
    """
    n = _require_followers(cfg)
    if not cfg.is_normalized:
        raise InvalidSimplification(
            "feasibility test is defined for the normalized regime only"
        )
    if len(connected_components(cfg.graph)) != 1:
        raise GraphNotConnected(
            "kernel test needs a connected follower graph; "
            "apply it per connected component instead"
        )
    k = cfg.k_scalar
    s = cfg.graph.leader_count
    value = 2.0 * cfg.alpha * n - 2.0 * k * s + (2.0 * k**2 / np.pi**2) * s
    return value < 0.0


def evaluate_certificate(matrix: SymMatrix, margin: float = 1e-9) -> Certificate:
    """Decide feasibility of a certificate matrix.

    The verdict comes from the Cholesky route with the given absolute margin
    on the max eigenvalue; the reported eigenvalue comes from the Jacobi
    route.  The two must agree outside the margin band, which the test suite
    enforces on random inputs.
    """
    max_eig = float(sym_eigenvalues(matrix).eigenvalues[-1])
    return Certificate(
        matrix=matrix,
        max_eig=max_eig,
        feasible=is_negative_definite(matrix, margin),
        margin=max(0.0, -max_eig),
    )


def _max_eig_fast(matrix: SymMatrix) -> float:
    # LAPACK work-horse for inner search loops; the Jacobi route in
    # matrixkit stays the oracle and prices the final certificates.
    return float(np.linalg.eigvalsh(matrix.mat)[-1])


def wirtinger_check(samples, dx: float) -> tuple[float, float]:
    """Numerically probe the one-sided Wirtinger inequality on [0, 1].

    For h with h(0) = 0 sampled on a uniform grid, returns

        lhs = integral of (dh/dx)^2      (central differences + trapezoid)
        rhs = (pi^2/4) * integral of h^2

    The inequality lhs >= rhs holds up to O(dx^2) discretization error, with
    equality approached by h = sin(pi x / 2).  Endpoint derivatives use
    second-order one-sided stencils so the equality case converges
    quadratically.
    """
    h = np.asarray(samples, dtype=float)
    if h.ndim != 1:
        raise ValueError("samples must be a one-dimensional array")
    if h.size < 8:
        raise GridTooCoarse(f"need at least 8 samples, got {h.size}")
    if abs(h[0]) > 1e-12:
        raise ValueError("samples[0] must vanish (h(0) = 0)")
    if abs((h.size - 1) * dx - 1.0) > 1e-8:
        raise ValueError("grid must cover [0, 1]: (len-1)*dx must equal 1")
    dh = np.empty_like(h)
    dh[1:-1] = (h[2:] - h[:-2]) / (2.0 * dx)
    dh[0] = (-3.0 * h[0] + 4.0 * h[1] - h[2]) / (2.0 * dx)
    dh[-1] = (3.0 * h[-1] - 4.0 * h[-2] + h[-3]) / (2.0 * dx)
    w = np.full(h.size, dx)
    w[0] = w[-1] = dx / 2.0
    lhs = float(w @ dh**2)
    rhs = float(np.pi**2 / 4.0 * (w @ h**2))
    return lhs, rhs
