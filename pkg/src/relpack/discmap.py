"""Area-preserving map from the open disc onto a midline neighborhood.

The map ``sigma`` sends the open disc of radius ``r`` (coordinates
``(q, p)``) into the open rectangle ``(0, pi) x (0, 2c)`` so that

* the circle ``q**2 + p**2 = u`` lands on the level curve enclosing area
  ``pi*u`` (so area is preserved: each sublevel disc keeps its area),
* the diameter ``p = 0`` lands on the horizontal midline ``P = c``, with
  the sign of ``P - c`` matching the sign of ``p`` off the diameter,
* the image stays in the band ``|P - c| <= u/2 + epsilon/2``.

Angularly, the polar angle of ``(q, p)`` is matched to the normalized area
sweep along the level curve; this choice is what makes the Jacobian
determinant equal to 1 pointwise and not just on average.  The product map
``phi`` applies ``sigma`` to each complex factor of the ball.
"""

from __future__ import annotations

import numpy as np

from .curves import _engine, clenshaw
from .errors import NotInImage, QuadratureNonConvergent
from .params import PackingParams

__all__ = [
    "sigma",
    "sigma_inv",
    "sigma_jacobian",
    "level_curve_point",
    "enclosed_area",
    "phi",
    "property_margins",
]

_BALL_EDGE_TOL = 1e-14


def _flatten(*arrays):
    """Broadcast inputs, flatten to 1-d float arrays; remember the shape."""
    bc = np.broadcast_arrays(*[np.asarray(x, dtype=float) for x in arrays])
    shape = bc[0].shape
    return [b.reshape(-1).copy() for b in bc], shape


def _restore(arr, shape):
    if shape == ():
        return float(arr[0])
    return arr.reshape(shape)


def _fold_angle(t):
    """Quarter-fold of the normalized angle ``t`` in [0, 1).

    Returns the quadrant index ``k``, the in-quadrant sweep fraction
    ``tau4`` in [0, 1], its orientation ``s4 = d(tau4)/d(4t)``, and the
    coordinate signs ``(sq, sp)`` of the quadrant.
    """
    k = np.minimum((4.0 * t).astype(int), 3)
    branches = [k == 0, k == 1, k == 2, k == 3]
    tau4 = np.select(branches, [4.0 * t, 2.0 - 4.0 * t, 4.0 * t - 2.0, 4.0 - 4.0 * t])
    s4 = np.select(branches, [1.0, -1.0, 1.0, -1.0])
    sq = np.select(branches, [1.0, -1.0, -1.0, 1.0])
    sp = np.select(branches, [1.0, 1.0, -1.0, -1.0])
    return k, tau4, s4, sq, sp


def _curve_eval(eng, A, t):
    """Point of the level curve at area ``A`` and sweep fraction ``t``."""
    _, tau4, _, sq, sp = _fold_angle(t)
    b, total, wp = eng.build_sweep(A)
    alpha, _ = eng.solve_angle(b, total, wp, tau4)
    R = np.sqrt(eng.radius_sq(A, alpha))
    Q = np.pi / 2.0 + sq * R * np.cos(alpha)
    P = eng.c + sp * R * np.sin(alpha)
    return Q, P


def _check_in_ball(u, r, what="q**2 + p**2"):
    limit = r**2 - _BALL_EDGE_TOL
    if np.any(u > limit):
        raise ValueError(
            f"point outside the open ball: {what} must stay below "
            f"r**2 = {r**2!r} by more than {_BALL_EDGE_TOL:g}"
        )


def sigma(q, p, params: PackingParams):
    """Map disc points into the rectangle, preserving area.

    Parameters
    ----------
    q, p : array_like
        Disc coordinates with ``q**2 + p**2 < r**2`` (strictly; points
        within 1e-14 of the boundary are rejected).
    params : PackingParams

    Returns
    -------
    Q, P : float or ndarray
        Image coordinates, ``Q`` in ``(0, pi)`` and ``P`` in ``(0, 2c)``.

    Notes
    -----
    The center maps to the curve family's center ``(pi/2, c)``.  Points on
    the diameter ``p = 0`` return ``P == c`` exactly.
    """
    (qf, pf), shape = _flatten(q, p)
    u = qf * qf + pf * pf
    _check_in_ball(u, params.r)
    eng = _engine(params)
    A = np.pi * u
    t = np.arctan2(pf, qf) / (2.0 * np.pi)
    t = np.where(t < 0.0, t + 1.0, t)
    interior = u > 0.0
    A_safe = np.where(interior, A, params.area_max * 1e-8)
    Q, P = _curve_eval(eng, A_safe, t)
    Q = np.where(interior, Q, np.pi / 2.0)
    P = np.where(interior, P, eng.c)
    return _restore(Q, shape), _restore(P, shape)


def level_curve_point(A, phi_frac, params: PackingParams):
    """Point on the level curve of area ``A`` at sweep fraction ``phi_frac``.

    ``phi_frac = 0`` is the rightmost midline crossing ``(pi/2 + a, c)``;
    ``phi_frac = 0.25`` is the top ``(pi/2, c + h)``; the fraction advances
    counterclockwise proportionally to enclosed-area sweep, matching the
    angular parametrization used by `sigma`.
    """
    A_arr = np.asarray(A, dtype=float)
    if np.any(A_arr <= 0.0) or np.any(A_arr >= params.area_max):
        raise ValueError(f"area must lie in (0, {params.area_max!r})")
    (A_f, t_f), shape = _flatten(A, np.mod(phi_frac, 1.0))
    eng = _engine(params)
    Q, P = _curve_eval(eng, A_f, t_f)
    return _restore(Q, shape), _restore(P, shape)


def sigma_inv(Q, P, params: PackingParams):
    """Invert `sigma` on the image of the open disc.

    Raises
    ------
    NotInImage
        If ``(Q, P)`` lies on or outside the outermost level curve (the
        image of the open ball boundary), including all points outside the
        rectangle.
    """
    (Qf, Pf), shape = _flatten(Q, P)
    eng = _engine(params)
    xi = Qf - np.pi / 2.0
    up = Pf - eng.c
    rho2 = xi * xi + up * up
    alpha_q = np.arctan2(np.abs(up), np.abs(xi))
    k = np.select(
        [
            (xi >= 0) & (up >= 0),
            (xi < 0) & (up >= 0),
            (xi < 0) & (up < 0),
            (xi >= 0) & (up < 0),
        ],
        [0, 1, 2, 3],
    )
    A_lim = np.pi * (params.r**2 - _BALL_EDGE_TOL)
    interior = rho2 > 0.0
    rho2_safe = np.where(interior, rho2, eng.radius_sq(A_lim * 1e-8, alpha_q))
    outside = eng.radius_sq(np.full_like(rho2, A_lim), alpha_q) <= rho2_safe
    if np.any(outside):
        idx = np.argmax(outside)
        raise NotInImage(
            f"point (Q, P) = ({Qf[idx]!r}, {Pf[idx]!r}) is not inside the "
            "image of the open ball"
        )
    # solve radius_sq(A, alpha_q) = rho2 for A: bisection in log A, then
    # a few Newton steps to machine accuracy
    lo = np.full_like(rho2, np.log(1e-18))
    hi = np.full_like(rho2, np.log(A_lim))
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        val = eng.radius_sq(np.exp(mid), alpha_q) - rho2_safe
        hi = np.where(val >= 0.0, mid, hi)
        lo = np.where(val < 0.0, mid, lo)
    A = np.exp(0.5 * (lo + hi))
    for _ in range(4):
        V = eng.radius_sq(A, alpha_q)
        VA = eng.radius_sq_growth(A, alpha_q)
        A = A - (V - rho2_safe) / VA
    A = np.clip(A, 0.0, A_lim)
    b, total, wp = eng.build_sweep(A)
    s = np.clip(eng.warp_s(alpha_q, wp), -1.0, 1.0)
    phi_q = clenshaw(b, s) / (4.0 * total)
    t = np.select(
        [k == 0, k == 1, k == 2, k == 3],
        [phi_q, 0.5 - phi_q, 0.5 + phi_q, 1.0 - phi_q],
    )
    u = A / np.pi
    th = 2.0 * np.pi * t
    q = np.where(interior, np.sqrt(u) * np.cos(th), 0.0)
    p = np.where(interior, np.sqrt(u) * np.sin(th), 0.0)
    return _restore(q, shape), _restore(p, shape)


def sigma_jacobian(q, p, params: PackingParams):
    """Jacobian of `sigma`, in closed form.

    Returns
    -------
    J : ndarray, shape (..., 2, 2)
        ``J[..., 0, :] = (dQ/dq, dQ/dp)`` and ``J[..., 1, :] = (dP/dq,
        dP/dp)``.  At the center the map is smooth and the Jacobian is the
        identity.

    Notes
    -----
    Assembled from exact derivatives of the schedule and the level-curve
    radius, plus the derivative of the solved sweep angle obtained by
    differentiating the sweep equation implicitly.  No finite differences
    are involved, so the determinant is 1 up to quadrature roundoff even
    in regions where the curve shape changes on a scale far below any
    sensible finite-difference step.
    """
    (qf, pf), shape = _flatten(q, p)
    u = qf * qf + pf * pf
    _check_in_ball(u, params.r)
    eng = _engine(params)
    A = np.pi * u
    t = np.arctan2(pf, qf) / (2.0 * np.pi)
    t = np.where(t < 0.0, t + 1.0, t)
    _, tau4, s4, sq, sp = _fold_angle(t)
    interior = u > 0.0
    A_safe = np.where(interior, A, eng.area_max * 1e-8)

    b, total, bA, totalA, wp = eng.build_sweep_pair(A_safe)
    alpha, s = eng.solve_angle(b, total, wp, tau4)
    phiA = clenshaw(bA, s)
    V, V_A, V_AA, V_al = eng.radius_sq_jet(A_safe, alpha)
    R = np.sqrt(V)
    ca, sa = np.cos(alpha), np.sin(alpha)

    # implicit differentiation of  Phi(A, alpha) = tau4 * total(A)
    al_A = (tau4 * totalA - phiA) / V_A
    al_t = total / V_A
    X_A = sq * (ca * (V_A + V_al * al_A) / (2.0 * R) - R * sa * al_A)
    X_t = sq * al_t * (ca * V_al / (2.0 * R) - R * sa)
    Y_A = sp * (sa * (V_A + V_al * al_A) / (2.0 * R) + R * ca * al_A)
    Y_t = sp * al_t * (sa * V_al / (2.0 * R) + R * ca)

    A_q, A_p = 2.0 * np.pi * qf, 2.0 * np.pi * pf
    with np.errstate(divide="ignore", invalid="ignore"):
        t_q = -pf / (2.0 * np.pi * u)
        t_p = qf / (2.0 * np.pi * u)
    tau_q, tau_p = 4.0 * s4 * t_q, 4.0 * s4 * t_p

    J = np.empty((qf.size, 2, 2))
    J[:, 0, 0] = np.where(interior, X_A * A_q + X_t * tau_q, 1.0)
    J[:, 0, 1] = np.where(interior, X_A * A_p + X_t * tau_p, 0.0)
    J[:, 1, 0] = np.where(interior, Y_A * A_q + Y_t * tau_q, 0.0)
    J[:, 1, 1] = np.where(interior, Y_A * A_p + Y_t * tau_p, 1.0)
    if shape == ():
        return J[0]
    return J.reshape(shape + (2, 2))


def _curve_polyline(eng, A, nvert):
    """Closed polyline on the level curve with corner-clustered vertices.

    ``nvert`` must be a multiple of 4; vertices in each quadrant follow the
    sinh warp used by the quadrature, which concentrates them where the
    curve bends fastest.
    """
    wp = eng.warp_params(np.asarray([A]))
    s = np.linspace(-1.0, 1.0, nvert // 4 + 1)
    wp_col = tuple(x[:, None] for x in wp)
    al = np.clip(eng.warp_alpha(s[None, :], wp_col), 0.0, np.pi / 2.0)[0]
    R = np.sqrt(eng.radius_sq(np.full_like(al, A), al))
    xq, yq = R * np.cos(al), R * np.sin(al)
    x = np.concatenate([xq[:-1], -xq[::-1][:-1], -xq[:-1], xq[::-1][:-1]])
    y = np.concatenate([yq[:-1], yq[::-1][:-1], -yq[:-1], -yq[::-1][:-1]])
    return x, y


def _shoelace(x, y):
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def enclosed_area(A, params: PackingParams) -> float:
    """Independently measure the area enclosed by the level curve at ``A``.

    Polygonal (shoelace) area of a corner-clustered polyline, Richardson
    extrapolated over a doubling ladder of vertex counts.  This shares no
    code path with the sweep quadrature inside `sigma`, which is what makes
    it useful as an oracle: agreement with ``A`` certifies the curve family
    itself, independent of the map built on top of it.

    Raises
    ------
    QuadratureNonConvergent
        If consecutive Richardson extrapolants disagree by more than
        ``1e-7 * A``.
    ValueError
        If ``A`` is outside ``(0, pi*r**2)``.
    """
    A = float(A)
    if not 0.0 < A < params.area_max:
        raise ValueError(f"area must lie in (0, {params.area_max!r})")
    eng = _engine(params)
    areas = []
    for nvert in (2048, 4096, 8192):
        x, y = _curve_polyline(eng, A, nvert)
        areas.append(_shoelace(x, y))
    rich1 = (4.0 * areas[1] - areas[0]) / 3.0
    rich2 = (4.0 * areas[2] - areas[1]) / 3.0
    if abs(rich2 - rich1) > 1e-7 * A:
        raise QuadratureNonConvergent(
            f"polyline area ladder for A={A!r} left residual "
            f"{abs(rich2 - rich1):.3e}"
        )
    return float(rich2)


def phi(coords, params: PackingParams):
    """Product map: apply `sigma` to each complex factor of the ball.

    Parameters
    ----------
    coords : array_like, shape (..., 2n)
        Ball coordinates ordered ``(q1, p1, q2, p2, ..., qn, pn)`` with
        ``sum_i (q_i**2 + p_i**2) < r**2`` strictly.
    params : PackingParams

    Returns
    -------
    ndarray, shape (..., 2n)
        Rectangle coordinates ``(Q1, P1, ..., Qn, Pn)``.
    """
    coords = np.asarray(coords, dtype=float)
    n = params.n
    if coords.shape[-1] != 2 * n:
        raise ValueError(f"expected trailing dimension {2 * n}, got {coords.shape}")
    u_total = np.sum(coords**2, axis=-1)
    _check_in_ball(u_total, params.r, what="sum of q_i**2 + p_i**2")
    out = np.empty_like(coords)
    for i in range(n):
        Q, P = sigma(coords[..., 2 * i], coords[..., 2 * i + 1], params)
        out[..., 2 * i] = Q
        out[..., 2 * i + 1] = P
    return out


def property_margins(coords, params: PackingParams):
    """Slack of every packing inequality at the given ball points.

    For each factor the image must satisfy the band bound
    ``|P_i - c| <= u_i/2 + epsilon`` and the box bound ``0 < Q_i < pi``;
    globally the actions must satisfy ``sum_i P_i < 1``.  All margins are
    positive for a correct construction.

    Returns
    -------
    dict
        ``"band_upper"``, ``"band_lower"``: shape (..., n), the slack of
        ``P_i - c <= u_i/2 + epsilon`` and ``c - P_i <= u_i/2 + epsilon``;
        ``"box"``: shape (..., n), distance of ``Q_i`` to the nearer wall;
        ``"action_floor"``: shape (..., n), just ``P_i``;
        ``"simplex"``: shape (...), the slack ``1 - sum_i P_i``;
        ``"worst"``: float, minimum over everything.
    """
    coords = np.asarray(coords, dtype=float)
    n = params.n
    image = phi(coords, params)
    Q = image[..., 0::2]
    P = image[..., 1::2]
    u = coords[..., 0::2] ** 2 + coords[..., 1::2] ** 2
    halfband = u / 2.0 + params.epsilon
    band_upper = halfband - (P - params.c)
    band_lower = halfband - (params.c - P)
    box = np.minimum(Q, np.pi - Q)
    simplex = 1.0 - np.sum(P, axis=-1)
    worst = min(
        float(band_upper.min()),
        float(band_lower.min()),
        float(box.min()),
        float(P.min()),
        float(simplex.min()),
    )
    return {
        "band_upper": band_upper,
        "band_lower": band_lower,
        "box": box,
        "action_floor": P,
        "simplex": simplex,
        "worst": worst,
    }
