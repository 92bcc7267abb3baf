"""Nested family of level curves filling an open rectangle.

Each positive area ``A < pi*r**2`` is assigned a closed convex curve in the
``(Q, P)`` rectangle ``(0, pi) x (0, 2c)``, centered at ``(pi/2, c)`` and
symmetric under reflection in both center lines.  The curve with parameter
``A`` encloses area exactly ``A``, the family is strictly nested, and the
curve's height obeys ``|P - c| <= A/(2*pi) + epsilon/2``, half a collar
inside the band the packing estimates require.

The curves are generalized ellipses: in centered coordinates
``(x, y) = (Q - pi/2, P - c)`` the curve is ``|x/a|**m + |y/h|**m = 1``,
where the half-width ``a``, half-height ``h`` and exponent ``m`` follow a
smooth schedule in ``A``.  Small curves are round (``m = 2``); as ``A`` grows
the exponent rises so that the width can approach ``pi/2`` while the height
stays pinned near ``A/(2*pi)``, keeping the enclosed area equal to ``A``
without leaving the band.

Everything downstream (the area-preserving disc map, its Jacobian, and the
area oracle) consumes this module through a per-parameter engine holding the
fitted schedule and Chebyshev quadrature nodes.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.fft import dct
from scipy.optimize import brentq
from scipy.special import digamma, gammaln, polygamma

from .errors import ScheduleInfeasible
from .params import PackingParams

__all__ = [
    "LevelCurve",
    "area_factor",
    "shape_schedule",
    "level_curve",
]

# Sharpness of the smooth minimum blending the round-regime height ``rho``
# with the band cap; also the largest exponent the schedule may request.
_BLEND_K = 6.0
_M_MAX = 512.0


def area_factor(m):
    """Area of ``|x|**m + |y|**m <= 1`` divided by 4.

    Equals ``Gamma(1+1/m)**2 / Gamma(1+2/m)``, so a curve with half-axes
    ``(a, h)`` and exponent ``m`` encloses area ``4*a*h*area_factor(m)``.
    Increases from ``pi/4`` at ``m = 2`` toward 1 as ``m -> inf``.
    """
    m = np.asarray(m, dtype=float)
    return np.exp(2.0 * gammaln(1.0 + 1.0 / m) - gammaln(1.0 + 2.0 / m))


def _dlog_area_factor(m):
    m = np.asarray(m, dtype=float)
    return (2.0 / m**2) * (digamma(1.0 + 2.0 / m) - digamma(1.0 + 1.0 / m))


def _d2log_area_factor(m):
    m = np.asarray(m, dtype=float)
    p1, p2 = 1.0 + 1.0 / m, 1.0 + 2.0 / m
    return (
        -(4.0 / m**3) * (digamma(p2) - digamma(p1))
        - (2.0 / m**4) * (2.0 * polygamma(1, p2) - polygamma(1, p1))
    )


def _smoothstep(x):
    """C^3 monotone step on [0, 1] (septic polynomial, flat at both ends)."""
    return x**4 * (35.0 - 84.0 * x + 70.0 * x**2 - 20.0 * x**3)


def _smoothstep_d1(x):
    return 140.0 * x**3 * (1.0 - x) ** 3


def _smoothstep_d2(x):
    return 420.0 * x**2 * (1.0 - x) ** 2 * (1.0 - 2.0 * x)


# ---------------------------------------------------------------------------
# Chebyshev helpers (Lobatto grid, first-kind series)
# ---------------------------------------------------------------------------


def cheb_coeffs(F):
    """Chebyshev coefficients from values at Lobatto nodes.

    Parameters
    ----------
    F : ndarray, shape (..., M+1)
        Values at ``x_j = cos(pi*j/M)``, ordered from ``x=1`` down to
        ``x=-1``.

    Returns
    -------
    c : ndarray, shape (..., M+1)
        Coefficients with ``f(x) = sum_k c[k] * T_k(x)``.
    """
    M = F.shape[-1] - 1
    y = dct(F, type=1, axis=-1)
    c = y / M
    c[..., 0] *= 0.5
    c[..., -1] *= 0.5
    return c


def cheb_antideriv(c):
    """Coefficients of ``x -> integral of f from -1 to x``, same basis."""
    M = c.shape[-1] - 1
    b = np.zeros(c.shape[:-1] + (M + 2,))
    # b_k = (c_{k-1} - c_{k+1}) / (2k) for k >= 1; c_0 enters doubled because
    # the series convention above stores it halved.
    cm1 = c[..., 0 : M + 1].copy()
    cm1[..., 0] *= 2.0
    cp1 = np.zeros_like(cm1)
    cp1[..., 0 : M - 1] = c[..., 2 : M + 1]
    k = np.arange(1, M + 2)
    b[..., 1:] = (cm1 - cp1) / (2.0 * k)
    sign = (-1.0) ** k
    b[..., 0] = -np.sum(b[..., 1:] * sign, axis=-1)
    return b


def clenshaw(c, x):
    """Evaluate ``sum_k c[...,k] * T_k(x)`` with Clenshaw recurrence."""
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for k in range(c.shape[-1] - 1, 0, -1):
        b1, b2 = c[..., k] + 2.0 * x * b1 - b2, b1
    return c[..., 0] + x * b1 - b2


def clenshaw_der(c, x):
    """Evaluate the derivative of the series in `clenshaw`.

    Uses ``d/dx T_k = k * U_{k-1}`` and the second-kind recurrence.
    """
    K = c.shape[-1]
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for k in range(K - 1, 1, -1):
        b1, b2 = k * c[..., k] + 2.0 * x * b1 - b2, b1
    return c[..., 1] + 2.0 * x * b1 - b2


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


class _CurveEngine:
    """Fitted schedule plus quadrature data for one parameter set.

    Holds everything that depends only on ``(n, r, epsilon)``: the endpoint
    exponent fit, the Chebyshev node count, and the node abscissae.  All
    methods are vectorized over 1-d arrays of areas.
    """

    def __init__(self, params: PackingParams):
        self.c = params.c
        self.eps = params.epsilon
        self.area_max = params.area_max
        # corner margin: the widest curve stops short of the rectangle's
        # vertical walls by at least this much
        self.delta_q = min(0.05, np.pi * self.eps / 2.0)

        h_end = self._height(np.asarray(self.area_max))
        a_target = np.pi / 2.0 - 1.1 * self.delta_q
        g_end = self.area_max / (4.0 * h_end * a_target)
        if g_end <= area_factor(2.0):
            self.m_end = 2.0
        elif g_end >= area_factor(_M_MAX):
            raise ScheduleInfeasible(
                f"outermost curve needs area factor {g_end:.9f}, beyond the "
                f"exponent cap {_M_MAX:g}; epsilon={self.eps!r} is too small"
            )
        else:
            self.m_end = brentq(
                lambda m: area_factor(m) - g_end, 2.0, _M_MAX, xtol=1e-12
            )
        lam_end = self.area_max / (self.area_max + np.pi * self.eps)
        self.m_scale = 2.0 + (self.m_end - 2.0) / _smoothstep(lam_end)
        self.ncheb = int(max(192, 2.5 * self.m_end + 48))
        j = np.arange(self.ncheb + 1)
        self.xnodes = np.cos(np.pi * j / self.ncheb)  # 1 .. -1
        self._validate()

    def _height(self, A):
        rho = 0.5 * (np.log(A) - np.log(np.pi))
        cap = np.log(A / (2.0 * np.pi) + self.eps / 2.0)
        k = _BLEND_K
        return np.exp(-np.logaddexp(-k * rho, -k * cap) / k)

    def _validate(self):
        """Check monotonicity and band containment on a dense area grid."""
        A = np.concatenate(
            [
                np.geomspace(1e-8 * self.area_max, self.area_max, 400),
                np.linspace(0.9 * self.area_max, self.area_max, 100),
            ]
        )
        h, a, m, hp, ap, mp = self.schedule_rates(A)
        cap = A / (2.0 * np.pi) + self.eps / 2.0
        problems = []
        if not np.all(ap > 0.0):
            problems.append("half-width not strictly increasing")
        if not np.all(hp > 0.0):
            problems.append("half-height not strictly increasing")
        if not np.all(h < cap):
            problems.append("half-height exceeds band cap")
        if not a.max() < np.pi / 2.0 - self.delta_q:
            problems.append("half-width reaches the wall margin")
        alpha = np.linspace(0.0, np.pi / 2.0, 101)
        VA = self.radius_sq_growth(A[:, None], alpha[None, :])
        if not VA.min() > 0.0:
            problems.append("level curves not strictly nested")
        if problems:
            raise ScheduleInfeasible("; ".join(problems))

    # -- schedule -----------------------------------------------------------

    def schedule(self, A):
        """Half-height, half-width, exponent at each area."""
        A = np.asarray(A, dtype=float)
        rho = np.sqrt(A / np.pi)
        cap = A / (2.0 * np.pi) + self.eps / 2.0
        k = _BLEND_K
        lr, lc = np.log(rho), np.log(cap)
        h = np.exp(-np.logaddexp(-k * lr, -k * lc) / k)
        lam = A / (A + np.pi * self.eps)
        m = 2.0 + (self.m_scale - 2.0) * _smoothstep(lam)
        a = A / (4.0 * h * area_factor(m))
        return h, a, m

    def schedule_rates(self, A):
        """Schedule values plus first derivatives in ``A``."""
        A = np.asarray(A, dtype=float)
        rho = np.sqrt(A / np.pi)
        cap = A / (2.0 * np.pi) + self.eps / 2.0
        k = _BLEND_K
        lr, lc = np.log(rho), np.log(cap)
        h = np.exp(-np.logaddexp(-k * lr, -k * lc) / k)
        w = 1.0 / (1.0 + np.exp(k * (lr - lc)))
        lam = A / (A + np.pi * self.eps)
        m = 2.0 + (self.m_scale - 2.0) * _smoothstep(lam)
        g = area_factor(m)
        a = A / (4.0 * h * g)
        lnhp = w * (0.5 / A) + (1.0 - w) * (0.5 / np.pi) / cap
        hp = h * lnhp
        lamp = np.pi * self.eps / (A + np.pi * self.eps) ** 2
        mp = (self.m_scale - 2.0) * _smoothstep_d1(lam) * lamp
        ap = a * (1.0 / A - lnhp - _dlog_area_factor(m) * mp)
        return h, a, m, hp, ap, mp

    def schedule_jet(self, A):
        """Schedule values with first and second ``A``-derivatives."""
        A = np.asarray(A, dtype=float)
        k = _BLEND_K
        rho = np.sqrt(A / np.pi)
        cap = A / (2.0 * np.pi) + self.eps / 2.0
        lr, lc = np.log(rho), np.log(cap)
        h = np.exp(-np.logaddexp(-k * lr, -k * lc) / k)
        w = 1.0 / (1.0 + np.exp(k * (lr - lc)))
        lrp = 0.5 / A
        lrpp = -0.5 / A**2
        lcp = (0.5 / np.pi) / cap
        lcpp = -lcp * lcp
        wp = -k * w * (1.0 - w) * (lrp - lcp)
        lnhp = w * lrp + (1.0 - w) * lcp
        lnhpp = w * lrpp + (1.0 - w) * lcpp + wp * (lrp - lcp)
        hp = h * lnhp
        hpp = h * (lnhpp + lnhp**2)
        B = np.pi * self.eps
        lam = A / (A + B)
        lamp = B / (A + B) ** 2
        lampp = -2.0 * B / (A + B) ** 3
        m = 2.0 + (self.m_scale - 2.0) * _smoothstep(lam)
        mp = (self.m_scale - 2.0) * _smoothstep_d1(lam) * lamp
        mpp = (self.m_scale - 2.0) * (
            _smoothstep_d2(lam) * lamp**2 + _smoothstep_d1(lam) * lampp
        )
        g1 = _dlog_area_factor(m)
        g2 = _d2log_area_factor(m)
        a = A / (4.0 * h * area_factor(m))
        lnap = 1.0 / A - lnhp - g1 * mp
        lnapp = -1.0 / A**2 - lnhpp - (g2 * mp**2 + g1 * mpp)
        ap = a * lnap
        app = a * (lnapp + lnap**2)
        return h, hp, hpp, a, ap, app, m, mp, mpp

    # -- curve geometry -----------------------------------------------------

    def radius_sq(self, A, alpha):
        """Squared distance from the center at quarter angle ``alpha``.

        ``alpha`` is measured in the first quadrant of centered coordinates;
        the full curve follows by reflecting in both axes.
        """
        h, a, m = self.schedule(A)
        ca, sa = np.cos(alpha), np.sin(alpha)
        with np.errstate(divide="ignore"):
            l1 = m * (np.log(ca) - np.log(a))
            l2 = m * (np.log(sa) - np.log(h))
        lnT = np.logaddexp(l1, l2)
        return np.exp(-(2.0 / m) * lnT)

    def radius_sq_growth(self, A, alpha):
        """d(radius_sq)/dA at fixed angle; positive iff curves are nested."""
        h, a, m, hp, ap, mp = self.schedule_rates(A)
        ca, sa = np.cos(alpha), np.sin(alpha)
        with np.errstate(divide="ignore"):
            l1 = m * (np.log(ca) - np.log(a))
            l2 = m * (np.log(sa) - np.log(h))
        lnT = np.logaddexp(l1, l2)
        V = np.exp(-(2.0 / m) * lnT)
        e1 = np.exp(l1 - lnT)
        e2 = np.exp(l2 - lnT)
        dV_da = (2.0 / a) * e1 * V
        dV_dh = (2.0 / h) * e2 * V
        # e_i * l_i with the 0 * (-inf) corner cleaned up
        s1 = np.where(np.isneginf(l1), 0.0, e1 * np.where(np.isfinite(l1), l1, 0.0))
        s2 = np.where(np.isneginf(l2), 0.0, e2 * np.where(np.isfinite(l2), l2, 0.0))
        dV_dm = V * (2.0 / m**2) * (lnT - (s1 + s2))
        return dV_da * ap + dV_dh * hp + dV_dm * mp

    def radius_sq_jet(self, A, alpha):
        """Radius-squared with A- and angle-derivatives: (V, V_A, V_AA, V_alpha)."""
        h, hp, hpp, a, ap, app, m, mp, mpp = self.schedule_jet(A)
        with np.errstate(divide="ignore"):
            lnca, lnsa = np.log(np.cos(alpha)), np.log(np.sin(alpha))
        el1 = lnca - np.log(a)
        el2 = lnsa - np.log(h)
        l1, l2 = m * el1, m * el2
        lnT = np.logaddexp(l1, l2)
        V = np.exp(-(2.0 / m) * lnT)
        w1 = np.exp(l1 - lnT)
        w2 = np.exp(l2 - lnT)
        w12 = w1 * w2

        def mprod(wgt, val):
            # wgt * val with val possibly infinite where wgt vanishes
            return np.where(wgt == 0.0, 0.0, wgt * np.where(np.isfinite(val), val, 0.0))

        L = lnT
        L_a = -(m / a) * w1
        L_h = -(m / h) * w2
        L_m = mprod(w1, el1) + mprod(w2, el2)
        dl = el1 - el2
        L_aa = (m / a**2) * w1 + (m**2 / a**2) * w12
        L_hh = (m / h**2) * w2 + (m**2 / h**2) * w12
        L_ah = -(m**2 / (a * h)) * w12
        L_am = -(1.0 / a) * w1 - (m / a) * mprod(w12, dl)
        L_hm = -(1.0 / h) * w2 + (m / h) * mprod(w12, dl)
        L_mm = mprod(w12, np.where(np.isfinite(dl), dl, 0.0) ** 2)
        Ld = L_a * ap + L_h * hp + L_m * mp
        Ldd = (
            L_aa * ap**2
            + L_hh * hp**2
            + L_mm * mp**2
            + 2.0 * (L_ah * ap * hp + L_am * ap * mp + L_hm * hp * mp)
            + L_a * app
            + L_h * hpp
            + L_m * mpp
        )
        N_A = (2.0 / m**2) * mp * L - (2.0 / m) * Ld
        N_AA = (
            (-4.0 / m**3) * mp**2 * L
            + (2.0 / m**2) * mpp * L
            + (4.0 / m**2) * mp * Ld
            - (2.0 / m) * Ldd
        )
        V_A = V * N_A
        V_AA = V * (N_A**2 + N_AA)
        # angle derivative, assembled in log space to survive the axes
        w2cot = np.exp((m - 1.0) * lnsa - m * np.log(h) + lnca - lnT)
        w1tan = np.exp((m - 1.0) * lnca - m * np.log(a) + lnsa - lnT)
        V_al = V * (-2.0) * (w2cot - w1tan)
        return V, V_A, V_AA, V_al

    # -- warped quadrature contour -------------------------------------------

    def warp_params(self, A):
        """Parameters of the sinh map packing nodes near the curve corner."""
        h, a, m = self.schedule(A)
        alpha_c = np.arctan2(h, a)
        w = np.clip(3.0 * np.sin(alpha_c) * np.cos(alpha_c) / m, 1e-4, 0.5)
        beta = 0.5 * (
            np.arcsinh((np.pi / 2.0 - alpha_c) / w) + np.arcsinh(alpha_c / w)
        )
        s_c = -1.0 + np.arcsinh(alpha_c / w) / beta
        return alpha_c, w, beta, s_c

    @staticmethod
    def warp_alpha(s, wp):
        alpha_c, w, beta, s_c = wp
        return alpha_c + w * np.sinh(beta * (s - s_c))

    @staticmethod
    def warp_dalpha(s, wp):
        alpha_c, w, beta, s_c = wp
        return w * beta * np.cosh(beta * (s - s_c))

    @staticmethod
    def warp_s(alpha, wp):
        alpha_c, w, beta, s_c = wp
        return s_c + np.arcsinh((alpha - alpha_c) / w) / beta

    # -- area sweep ----------------------------------------------------------

    def build_sweep(self, A):
        """Antiderivative of the angular area-sweep density for each A.

        Returns ``(b, total, wp)``: Chebyshev coefficients of
        ``s -> integral_0^alpha(s) dV/dA``, its value at ``alpha = pi/2``,
        and the warp parameters.  Since the enclosed area equals twice the
        integral of radius_sq over a quarter period, ``total`` is exactly
        1/2; the computed value is kept as the normalizer so that quadrature
        error cancels from the sweep fraction.
        """
        A = np.asarray(A, dtype=float)
        wp = self.warp_params(A)
        s = self.xnodes[None, :]
        wp_col = tuple(x[:, None] for x in wp)
        al = np.clip(self.warp_alpha(s, wp_col), 0.0, np.pi / 2.0)
        F = self.radius_sq_growth(A[:, None], al) * self.warp_dalpha(s, wp_col)
        b = cheb_antideriv(cheb_coeffs(F))
        total = clenshaw(b, np.ones_like(A))
        return b, total, wp

    def build_sweep_pair(self, A):
        """Sweep antiderivative plus its A-derivative series, in one pass.

        Returns ``(b, total, bA, totalA, wp)`` where ``bA`` integrates the
        second A-derivative of radius_sq over the same warped contour (needed
        by the closed-form Jacobian).
        """
        A = np.asarray(A, dtype=float)
        wp = self.warp_params(A)
        s = self.xnodes[None, :]
        wp_col = tuple(x[:, None] for x in wp)
        al = np.clip(self.warp_alpha(s, wp_col), 0.0, np.pi / 2.0)
        _, V_A, V_AA, _ = self.radius_sq_jet(A[:, None], al)
        dal = self.warp_dalpha(s, wp_col)
        b = cheb_antideriv(cheb_coeffs(V_A * dal))
        bA = cheb_antideriv(cheb_coeffs(V_AA * dal))
        one = np.ones_like(A)
        return b, clenshaw(b, one), bA, clenshaw(bA, one), wp

    def solve_angle(self, b, total, wp, tau4):
        """Invert the quarter sweep: find alpha with Phi(alpha)/total = tau4.

        Bisection bracketing followed by safeguarded Newton in the warped
        variable.  Exact hits are latched so a converged iterate is never
        displaced by a stale bracket.
        """
        target = tau4 * total
        lo = np.full_like(target, -1.0)
        hi = np.full_like(target, 1.0)
        for _ in range(10):
            mid = 0.5 * (lo + hi)
            val = clenshaw(b, mid) - target
            hi = np.where(val >= 0.0, mid, hi)
            lo = np.where(val < 0.0, mid, lo)
        s = 0.5 * (lo + hi)
        for _ in range(12):
            val = clenshaw(b, s) - target
            der = clenshaw_der(b, s)
            hi = np.where(val > 0.0, s, hi)
            lo = np.where(val < 0.0, s, lo)
            with np.errstate(divide="ignore", invalid="ignore"):
                s_new = s - val / der
            ok = np.isfinite(s_new) & (der > 0.0)
            # clamp overshoots onto the bracket: a root within an ulp of an
            # endpoint must be landed on, not bisected toward forever
            s_new = np.where(ok, np.clip(s_new, lo, hi), 0.5 * (lo + hi))
            s = np.where(val == 0.0, s, s_new)
        alpha = np.clip(self.warp_alpha(s, wp), 0.0, np.pi / 2.0)
        alpha = np.where(tau4 <= 0.0, 0.0, np.where(tau4 >= 1.0, np.pi / 2.0, alpha))
        s = np.where(tau4 <= 0.0, -1.0, np.where(tau4 >= 1.0, 1.0, s))
        return alpha, s


@functools.lru_cache(maxsize=16)
def _engine(params: PackingParams) -> _CurveEngine:
    return _CurveEngine(params)


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelCurve:
    """Shape data of one level curve.

    Attributes
    ----------
    A : float
        Enclosed area.
    halfheight, halfwidth, exponent : float
        The ``(h, a, m)`` schedule values at this area.
    center : tuple of float
        Common center ``(pi/2, c)`` of the family.
    """

    A: float
    halfheight: float
    halfwidth: float
    exponent: float
    center: tuple[float, float]


def shape_schedule(A, params: PackingParams):
    """Half-height, half-width and exponent of the level curve at area ``A``.

    Parameters
    ----------
    A : float or ndarray
        Enclosed area(s), each in ``(0, pi*r**2)``.
    params : PackingParams

    Returns
    -------
    h, a, m : float or ndarray
        Half-height, half-width, exponent.  ``h < A/(2*pi) + epsilon/2``
        and ``a < pi/2`` hold throughout, and all three grow strictly
        with ``A``.

    Raises
    ------
    ScheduleInfeasible
        If no admissible schedule exists for these parameters.
    ValueError
        If some ``A`` lies outside ``(0, pi*r**2)``.
    """
    eng = _engine(params)
    A_arr = np.asarray(A, dtype=float)
    if np.any(A_arr <= 0.0) or np.any(A_arr >= params.area_max):
        raise ValueError(f"area must lie in (0, {params.area_max!r})")
    h, a, m = eng.schedule(A_arr)
    if np.isscalar(A) or np.ndim(A) == 0:
        return float(h), float(a), float(m)
    return h, a, m


def level_curve(A: float, params: PackingParams) -> LevelCurve:
    """Bundle the schedule at one area into a `LevelCurve` record."""
    h, a, m = shape_schedule(float(A), params)
    return LevelCurve(
        A=float(A),
        halfheight=h,
        halfwidth=a,
        exponent=m,
        center=(np.pi / 2.0, params.c),
    )
