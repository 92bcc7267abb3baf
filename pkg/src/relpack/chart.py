"""Action-angle chart of the affine ball model and the composed embedding.

The target of the packing is modeled by the open unit ball in C^n: each
rectangle factor ``(Q, P)`` with ``Q`` in ``(0, pi)`` and ``P`` in the open
simplex corresponds to the complex coordinate ``z = sqrt(P) * exp(2i*Q)``.
The doubled angle is forced by area accounting: the factor rectangle has
``Q``-extent ``pi`` but the circle action is ``2*pi``-periodic, and only
with the factor 2 does ``dx ^ dy`` pull back exactly to ``dP ^ dQ`` (the
one-factor Jacobian of ``(P, Q) -> (x, y)`` is identically 1).

The torus of interest is the set where every action equals ``c = 1/(n+1)``;
`clifford_distance` measures the max-norm distance to it in action space.
`full_embedding` composes the product disc map with this chart, giving the
packing of the ball whose real slice ``{p = 0}`` lands exactly on the torus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discmap import phi
from .errors import BranchBoundary, NotInDomain, OnAxes
from .params import PackingParams

__all__ = [
    "DomainSpec",
    "moment_map",
    "chart_j",
    "chart_j_inv",
    "full_embedding",
    "clifford_distance",
    "chart_symplectic_check",
]


@dataclass(frozen=True)
class DomainSpec:
    """Membership predicates for the chart domains at a given ``n``.

    ``box`` is the open cube ``(0, pi)^n`` of angle coordinates, ``simplex``
    the open action simplex ``{P_i > 0, sum P_i < 1}``, and the chart domain
    is their product.  ``line_area`` records the normalization: each complex
    line of the target carries symplectic area ``pi``.
    """

    n: int
    line_area: float = np.pi

    def _split(self, coords):
        coords = np.asarray(coords, dtype=float)
        if coords.shape[-1] != 2 * self.n:
            raise ValueError(
                f"expected trailing dimension {2 * self.n}, got {coords.shape}"
            )
        return coords[..., 0::2], coords[..., 1::2]

    def in_box(self, coords):
        """True where all angle coordinates lie strictly inside (0, pi)."""
        Q, _ = self._split(coords)
        return np.all((Q > 0.0) & (Q < np.pi), axis=-1)

    def in_simplex(self, coords):
        """True where the action coordinates lie in the open simplex."""
        _, P = self._split(coords)
        return np.all(P > 0.0, axis=-1) & (np.sum(P, axis=-1) < 1.0)

    def in_chart_domain(self, coords):
        """True on the product of `in_box` and `in_simplex` (the chart's K')."""
        return self.in_box(coords) & self.in_simplex(coords)

    def in_ambient(self, coords):
        """True where only the box constraint holds (actions unconstrained)."""
        return self.in_box(coords)

    def on_torus_level(self, coords, tol=0.0):
        """True where every action equals ``1/(n+1)`` within ``tol``."""
        _, P = self._split(coords)
        c = 1.0 / (self.n + 1)
        return np.all(np.abs(P - c) <= tol, axis=-1)

    def in_real_slice(self, ball_coords, r):
        """True for ball points with all momenta zero, inside radius ``r``."""
        q, p = self._split(ball_coords)
        return np.all(p == 0.0, axis=-1) & (np.sum(q**2, axis=-1) < r**2)


def moment_map(z):
    """Action coordinates ``(|z_1|**2, ..., |z_n|**2)`` of a chart point."""
    z = np.asarray(z, dtype=complex)
    return (z * z.conj()).real


def chart_j(coords):
    """Chart map ``(Q_k, P_k) -> z_k = sqrt(P_k) * exp(2i*Q_k)``.

    Parameters
    ----------
    coords : array_like, shape (..., 2n)
        Rectangle coordinates ``(Q1, P1, ..., Qn, Pn)`` inside the chart
        domain (open box times open simplex).

    Returns
    -------
    ndarray of complex, shape (..., n)

    Raises
    ------
    NotInDomain
        If any point violates a chart-domain predicate.
    """
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[-1] // 2
    if coords.shape[-1] != 2 * n or n == 0:
        raise ValueError(f"expected even trailing dimension, got {coords.shape}")
    spec = DomainSpec(n)
    ok = spec.in_chart_domain(coords)
    if not np.all(ok):
        raise NotInDomain("point outside the open chart domain (box x simplex)")
    Q = coords[..., 0::2]
    P = coords[..., 1::2]
    return np.sqrt(P) * np.exp(2j * Q)


def chart_j_inv(z):
    """Invert `chart_j` on the locus where the torus action is free.

    Returns
    -------
    ndarray, shape (..., 2n)
        Rectangle coordinates with ``P_k = |z_k|**2`` and
        ``Q_k = arg(z_k)/2`` reduced to ``(0, pi)``.

    Raises
    ------
    OnAxes
        If some ``z_k = 0`` (the angle is undefined there).
    BranchBoundary
        If some ``arg(z_k) = 0``, which would need ``Q_k`` in {0, pi},
        outside the open box.
    """
    z = np.asarray(z, dtype=complex)
    P = moment_map(z)
    if np.any(P == 0.0):
        raise OnAxes("chart angle undefined where a coordinate vanishes")
    theta = np.angle(z)  # in (-pi, pi]
    if np.any(theta == 0.0):
        raise BranchBoundary("argument 0 corresponds to the closed box boundary")
    Q = np.where(theta > 0.0, theta, theta + 2.0 * np.pi) / 2.0
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],), dtype=float)
    out[..., 0::2] = Q
    out[..., 1::2] = P
    return out


def full_embedding(coords, params: PackingParams):
    """The composed packing: disc map each factor, then the chart.

    Parameters
    ----------
    coords : array_like, shape (..., 2n)
        Ball coordinates ``(q1, p1, ..., qn, pn)`` with ``sum u_i < r**2``.
    params : PackingParams

    Returns
    -------
    ndarray of complex, shape (..., n)
        A point of the open unit ball in C^n; it lies on the torus of
        actions ``c`` exactly when every source ``p_i`` vanishes.
    """
    return chart_j(phi(coords, params))


def clifford_distance(z, params: PackingParams):
    """Max-norm action distance ``max_k | |z_k|**2 - c |`` to the torus."""
    dist = np.max(np.abs(moment_map(z) - params.c), axis=-1)
    if dist.ndim == 0:
        return float(dist)
    return dist


def chart_symplectic_check(coords, step=1e-5):
    """Numerical pullback defect of the chart at the given points.

    Differentiates `chart_j` (viewed as a map into R^{2n}) by central
    differences and returns the max-norm of ``J^T Omega_std J - Omega_pq``
    per point, where ``Omega_std`` is the standard form on the ``(x, y)``
    pairs and ``Omega_pq`` the coordinate form ``sum dP ^ dQ``.  Exactly
    zero in exact arithmetic; the returned defect is finite-difference
    truncation plus rounding, which degrades as some ``P_k -> 0``.

    Parameters
    ----------
    coords : array_like, shape (..., 2n)
        Chart-domain points with every ``Q_k`` at distance at least 1e-6
        from {0, pi} (so the difference stencil stays in the domain).
    step : float
        Central-difference step.

    Returns
    -------
    float or ndarray
        Max-norm defect per point.
    """
    coords = np.asarray(coords, dtype=float)
    scalar = coords.ndim == 1
    pts = coords.reshape(-1, coords.shape[-1])
    n = pts.shape[-1] // 2
    Q = pts[..., 0::2]
    P = pts[..., 1::2]
    if np.any(Q < 1e-6) or np.any(Q > np.pi - 1e-6):
        raise ValueError("angle coordinates must keep 1e-6 clearance from {0, pi}")
    if np.any(P <= step) or np.any(np.sum(P, axis=-1) >= 1.0 - step):
        raise ValueError("actions must clear the simplex boundary by the step")

    def to_real(c):
        z = chart_j(c)
        out = np.empty(c.shape, dtype=float)
        out[..., 0::2] = z.real
        out[..., 1::2] = z.imag
        return out

    npts, dim = pts.shape
    J = np.empty((npts, dim, dim))
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = step
        J[:, :, j] = (to_real(pts + e) - to_real(pts - e)) / (2.0 * step)

    omega_xy = np.zeros((dim, dim))
    omega_pq = np.zeros((dim, dim))
    for i in range(n):
        # on (x_i, y_i): dx ^ dy;  on (Q_i, P_i): dP ^ dQ
        omega_xy[2 * i, 2 * i + 1] = 1.0
        omega_xy[2 * i + 1, 2 * i] = -1.0
        omega_pq[2 * i, 2 * i + 1] = -1.0
        omega_pq[2 * i + 1, 2 * i] = 1.0

    defect = np.einsum("kia,ij,kjb->kab", J, omega_xy, J) - omega_pq
    worst = np.max(np.abs(defect), axis=(-2, -1))
    if scalar:
        return float(worst[0])
    return worst.reshape(coords.shape[:-1])
