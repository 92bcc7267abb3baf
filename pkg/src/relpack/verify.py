"""Deterministic sampling and aggregation of the packing invariant checks.

Every numbered guarantee of the construction (determinant one, band bounds,
midline behavior, containment, injectivity, curve areas, chart
symplecticity, torus preimage, sharpness arithmetic) is evaluated here over
seeded sample pools and folded into a `VerificationReport`.  All
aggregation uses max/min reductions only, so results are independent of
sample ordering and of how work is chunked across threads; reports are
bit-identical for a fixed seed.

The map under test is injectable (`MapSet`), which lets the test suite
prove each check can fail by wiring in deliberately broken maps.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import discmap
from .chart import chart_j, chart_symplectic_check
from .errors import QuadratureNonConvergent
from .params import PackingParams, max_epsilon

__all__ = [
    "SampleSpec",
    "MapSet",
    "CheckRecord",
    "VerificationReport",
    "sample",
    "default_maps",
    "check_area_preservation",
    "check_containment",
    "check_midline",
    "check_band_margins",
    "check_round_trip",
    "check_curve_areas",
    "check_chart_symplectic",
    "check_lagrangian_preimage",
    "check_sharpness_identity",
    "run_all",
]

DEFAULT_TOLERANCES = {
    "area_preservation": 1e-6,
    "containment": 0.0,
    "midline": 1e-12,
    "band_margins": 0.0,
    "round_trip": 1e-9,
    "curve_areas": 1e-6,
    "chart_symplectic": 1e-6,
    "lagrangian_preimage": 1e-12,
    "sharpness_identity": 1e-15,
}

_CHUNK = 16384


@dataclass(frozen=True)
class SampleSpec:
    """One sampling request: strategy name, point count, and RNG seed."""

    strategy: str
    count: int
    seed: int


@dataclass(frozen=True)
class MapSet:
    """The disc-map callables a verification run exercises.

    Each callable has the corresponding `relpack.discmap` signature.  The
    default set wires in the real implementation; tests substitute broken
    maps to demonstrate that checks are able to fail.
    """

    sigma: object
    sigma_inv: object
    sigma_jacobian: object


def default_maps() -> MapSet:
    return MapSet(
        sigma=discmap.sigma,
        sigma_inv=discmap.sigma_inv,
        sigma_jacobian=discmap.sigma_jacobian,
    )


@dataclass
class CheckRecord:
    """Outcome of one check.

    ``worst_margin`` is the minimal slack encountered: the distance to
    failure, positive iff the check passed.  For tolerance-style checks it
    is ``tolerance - worst_error``; for strict inequalities it is the raw
    slack and the tolerance field is 0.
    """

    name: str
    passed: bool
    worst_margin: float
    tolerance: float
    samples_used: int
    worst_point: tuple | None = None


@dataclass
class VerificationReport:
    """Parameter echo, per-check records, and the overall verdict."""

    n: int
    r: float
    epsilon: float
    seed: int
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        """Serialize with stable key order and full-precision floats.

        Floats are emitted with `repr`, whose shortest round-trip form
        preserves every bit of the value (at most 17 significant digits).
        """

        def f(x):
            return repr(float(x))

        lines = ["{"]
        lines.append(
            f'  "params": {{"n": {self.n}, "r": {f(self.r)}, '
            f'"epsilon": {f(self.epsilon)}, "seed": {self.seed}}},'
        )
        lines.append('  "checks": [')
        for i, c in enumerate(self.checks):
            comma = "," if i + 1 < len(self.checks) else ""
            lines.append(
                f'    {{"name": "{c.name}", '
                f'"passed": {"true" if c.passed else "false"}, '
                f'"worst_margin": {f(c.worst_margin)}, '
                f'"tolerance": {f(c.tolerance)}, '
                f'"samples": {c.samples_used}}}{comma}'
            )
        lines.append("  ],")
        lines.append(f'  "overall": {"true" if self.overall else "false"}')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())


def resolve_threads(threads=None) -> int:
    """Worker count: explicit argument, else RELPACK_THREADS, else 1."""
    if threads is None:
        threads = os.environ.get("RELPACK_THREADS", "1")
    nt = int(threads)
    if nt < 1:
        raise ValueError("thread count must be >= 1")
    return min(nt, 64)


def _run_chunks(fn, arrays, nthreads):
    """Apply ``fn`` to fixed-size row chunks; concatenate in input order.

    Chunk boundaries do not depend on the worker count, and callers only
    ever reduce the result with max/min, so the outcome is independent of
    threading.
    """
    N = arrays[0].shape[0]
    slices = [slice(i, min(i + _CHUNK, N)) for i in range(0, N, _CHUNK)]

    def one(sl):
        return fn(*[a[sl] for a in arrays])

    if nthreads <= 1 or len(slices) == 1:
        parts = [one(sl) for sl in slices]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            parts = list(ex.map(one, slices))
    if isinstance(parts[0], tuple):
        return tuple(
            np.concatenate([p[i] for p in parts]) for i in range(len(parts[0]))
        )
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample(spec: SampleSpec, params: PackingParams):
    """Draw a deterministic pool of ball points.

    Strategies
    ----------
    ``grid``
        Square lattice on the first disc factor (other factors zero),
        masked to the open disc.  May return fewer than ``count`` points.
    ``uniform-ball``
        Uniform on the open ball in R^{2n}.
    ``boundary-biased``
        Uniform directions with ``sum u_i`` between ``0.99 r**2`` and
        ``r**2 * (1 - 1e-6)``, log-uniform in the gap.
    ``midline``
        Ball points whose momenta are tiny but nonzero (log-uniform
        magnitudes in ``[1e-9, 1e-3] * r``, random signs), for sign checks
        across the midline.
    ``diameter-only``
        All momenta exactly zero, positions uniform in the radius-``r``
        ball of R^n.

    Returns
    -------
    ndarray, shape (count, 2n)
        Rows ``(q1, p1, ..., qn, pn)``, each strictly inside the ball.
    """
    if spec.count <= 0:
        raise ValueError("count must be positive")
    n, r = params.n, params.r
    dim = 2 * n
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))

    if spec.strategy == "grid":
        side = max(2, int(np.ceil(np.sqrt(spec.count))))
        ax = np.linspace(-r, r, side)
        qq, pp = np.meshgrid(ax, ax)
        keep = (qq**2 + pp**2) < r**2 * (1.0 - 1e-9)
        out = np.zeros((int(keep.sum()), dim))
        out[:, 0] = qq[keep]
        out[:, 1] = pp[keep]
        return out

    if spec.strategy == "uniform-ball":
        x = rng.standard_normal((spec.count, dim))
        nrm = np.linalg.norm(x, axis=1)
        nrm[nrm == 0.0] = 1.0
        rad = r * (1.0 - 1e-9) * rng.random(spec.count) ** (1.0 / dim)
        return x * (rad / nrm)[:, None]

    if spec.strategy == "boundary-biased":
        x = rng.standard_normal((spec.count, dim))
        nrm = np.linalg.norm(x, axis=1)
        nrm[nrm == 0.0] = 1.0
        gap = 10.0 ** rng.uniform(-6.0, -2.0, spec.count)
        rad = r * np.sqrt(1.0 - gap)
        return x * (rad / nrm)[:, None]

    if spec.strategy == "midline":
        x = rng.standard_normal((spec.count, n))
        nrm = np.linalg.norm(x, axis=1)
        nrm[nrm == 0.0] = 1.0
        rad = r * (1.0 - 1e-4) * rng.random(spec.count) ** (1.0 / n)
        q = x * (rad / nrm)[:, None]
        mag = r * 10.0 ** rng.uniform(-9.0, -3.0, (spec.count, n))
        sgn = rng.choice([-1.0, 1.0], size=(spec.count, n))
        out = np.empty((spec.count, dim))
        out[:, 0::2] = q
        out[:, 1::2] = sgn * mag
        return out

    if spec.strategy == "diameter-only":
        x = rng.standard_normal((spec.count, n))
        nrm = np.linalg.norm(x, axis=1)
        nrm[nrm == 0.0] = 1.0
        rad = r * (1.0 - 1e-9) * rng.random(spec.count) ** (1.0 / n)
        out = np.zeros((spec.count, dim))
        out[:, 0::2] = x * (rad / nrm)[:, None]
        return out

    raise ValueError(f"unknown sampling strategy {spec.strategy!r}")


def _product_images(pool, params, maps, nthreads):
    """Apply the factor map to every factor of every pooled point."""

    def fn(block):
        out = np.empty_like(block)
        for i in range(params.n):
            Q, P = maps.sigma(block[:, 2 * i], block[:, 2 * i + 1], params)
            out[:, 2 * i] = Q
            out[:, 2 * i + 1] = P
        return out

    return _run_chunks(fn, [pool], nthreads)


def _factor_points(pool, n):
    return pool.reshape(-1, 2 * n).reshape(-1, 2)


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def check_area_preservation(samples, params, tol=1e-6, maps=None, threads=None):
    """Determinant of the factor-map Jacobian within ``tol`` of 1."""
    maps = maps or default_maps()
    nthreads = resolve_threads(threads)
    fp = _factor_points(np.asarray(samples, dtype=float), params.n)

    def fn(q, p):
        J = maps.sigma_jacobian(q, p, params)
        return np.abs(J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0] - 1.0)

    err = _run_chunks(fn, [fp[:, 0], fp[:, 1]], nthreads)
    i = int(np.argmax(err))
    margin = tol - float(err[i])
    return CheckRecord(
        name="area_preservation",
        passed=margin > 0.0,
        worst_margin=margin,
        tolerance=tol,
        samples_used=fp.shape[0],
        worst_point=(float(fp[i, 0]), float(fp[i, 1])),
    )


def check_containment(samples, params, floor=0.0, maps=None, threads=None,
                      images=None):
    """Images inside the open box/simplex; margin is the minimal slack.

    ``floor`` raises the bar: the check passes only if the minimal slack
    strictly exceeds it (default 0, the open-constraint requirement).
    """
    maps = maps or default_maps()
    samples = np.asarray(samples, dtype=float)
    if images is None:
        images = _product_images(samples, params, maps, resolve_threads(threads))
    Q = images[:, 0::2]
    P = images[:, 1::2]
    slack = np.minimum(
        np.min(np.minimum(Q, np.pi - Q), axis=1),
        np.minimum(np.min(P, axis=1), 1.0 - np.sum(P, axis=1)),
    )
    i = int(np.argmin(slack))
    margin = float(slack[i])
    return CheckRecord(
        name="containment",
        passed=margin > floor,
        worst_margin=margin,
        tolerance=floor,
        samples_used=samples.shape[0],
        worst_point=tuple(float(v) for v in samples[i]),
    )


def check_band_margins(samples, params, floor=0.0, maps=None, threads=None,
                       images=None):
    """Two-sided band: ``|P_i - c| <= u_i/2 + epsilon`` for every factor."""
    maps = maps or default_maps()
    samples = np.asarray(samples, dtype=float)
    if images is None:
        images = _product_images(samples, params, maps, resolve_threads(threads))
    P = images[:, 1::2]
    u = samples[:, 0::2] ** 2 + samples[:, 1::2] ** 2
    halfband = u / 2.0 + params.epsilon
    slack = np.min(halfband - np.abs(P - params.c), axis=1)
    i = int(np.argmin(slack))
    margin = float(slack[i])
    return CheckRecord(
        name="band_margins",
        passed=margin > floor,
        worst_margin=margin,
        tolerance=floor,
        samples_used=samples.shape[0],
        worst_point=tuple(float(v) for v in samples[i]),
    )


def check_midline(diam_samples, mid_samples, params, tol=1e-12, maps=None,
                  threads=None):
    """Diameter points land on ``P = c``; the sign of ``P - c`` follows ``p``."""
    maps = maps or default_maps()
    nthreads = resolve_threads(threads)
    n = params.n
    dfp = _factor_points(np.asarray(diam_samples, dtype=float), n)
    mfp = _factor_points(np.asarray(mid_samples, dtype=float), n)

    def img(q, p):
        Q, P = maps.sigma(q, p, params)
        return P

    P_d = _run_chunks(img, [dfp[:, 0], dfp[:, 1]], nthreads)
    err_d = np.abs(P_d - params.c)
    i_d = int(np.argmax(err_d))
    margin_d = tol - float(err_d[i_d])

    P_m = _run_chunks(img, [mfp[:, 0], mfp[:, 1]], nthreads)
    signed = (P_m - params.c) * np.sign(mfp[:, 1])
    i_m = int(np.argmin(signed))
    margin_m = float(signed[i_m])

    if margin_d <= margin_m:
        margin, point = margin_d, (float(dfp[i_d, 0]), float(dfp[i_d, 1]))
    else:
        margin, point = margin_m, (float(mfp[i_m, 0]), float(mfp[i_m, 1]))
    return CheckRecord(
        name="midline",
        passed=margin > 0.0,
        worst_margin=margin,
        tolerance=tol,
        samples_used=dfp.shape[0] + mfp.shape[0],
        worst_point=point,
    )


def check_round_trip(samples, params, tol=1e-9, maps=None, threads=None,
                     limit=30000):
    """``sigma_inv(sigma(x)) == x`` within ``tol`` per coordinate."""
    maps = maps or default_maps()
    nthreads = resolve_threads(threads)
    fp = _factor_points(np.asarray(samples, dtype=float), params.n)
    if limit is not None:
        fp = fp[:limit]

    def fn(q, p):
        Q, P = maps.sigma(q, p, params)
        q2, p2 = maps.sigma_inv(Q, P, params)
        return np.maximum(np.abs(q2 - q), np.abs(p2 - p))

    err = _run_chunks(fn, [fp[:, 0], fp[:, 1]], nthreads)
    i = int(np.argmax(err))
    margin = tol - float(err[i])
    return CheckRecord(
        name="round_trip",
        passed=margin > 0.0,
        worst_margin=margin,
        tolerance=tol,
        samples_used=fp.shape[0],
        worst_point=(float(fp[i, 0]), float(fp[i, 1])),
    )


def check_curve_areas(params, tol=1e-6, count=32):
    """Enclosed-area oracle agrees with the defining area on a grid."""
    grid = np.geomspace(1e-4 * params.area_max, (1.0 - 1e-9) * params.area_max,
                        count)
    worst = -np.inf
    worst_A = grid[0]
    for A in grid:
        try:
            rel = abs(discmap.enclosed_area(A, params) - A) / A
        except QuadratureNonConvergent:
            # sentinel: a non-convergent ladder fails the check outright
            rel = 1.0
        if rel > worst:
            worst, worst_A = rel, A
    margin = tol - worst
    return CheckRecord(
        name="curve_areas",
        passed=margin > 0.0,
        worst_margin=margin,
        tolerance=tol,
        samples_used=count,
        worst_point=(float(worst_A),),
    )


def check_chart_symplectic(images, tol=1e-6, limit=None):
    """Pullback defect of the chart at mapped points.

    The spot tolerance is ``tol`` where all actions are healthy and 1e-4
    where some action drops below 1e-3 (finite-difference conditioning,
    not a property failure).
    """
    pts = np.asarray(images, dtype=float)
    if limit is not None:
        pts = pts[:limit]
    defect = chart_symplectic_check(pts)
    P = pts[:, 1::2]
    tiered = np.where(np.any(P < 1e-3, axis=1), 1e-4, tol)
    slack = tiered - defect
    i = int(np.argmin(slack))
    return CheckRecord(
        name="chart_symplectic",
        passed=float(slack[i]) > 0.0,
        worst_margin=float(slack[i]),
        tolerance=tol,
        samples_used=pts.shape[0],
        worst_point=tuple(float(v) for v in pts[i]),
    )


def check_lagrangian_preimage(params, diam_samples=None, mid_samples=None,
                              tol=1e-12, maps=None, threads=None, seed=0):
    """Real slice lands on the torus; off-slice points leave it, signed.

    Diameter samples must embed with action distance below ``tol`` from
    the level ``c`` in every factor; near-midline samples must satisfy
    ``sign(|z_i|**2 - c) = sign(p_i)`` with strictly positive offset.
    """
    maps = maps or default_maps()
    nthreads = resolve_threads(threads)
    if diam_samples is None:
        diam_samples = sample(SampleSpec("diameter-only", 1000, seed), params)
    if mid_samples is None:
        mid_samples = sample(SampleSpec("midline", 1000, seed + 1), params)
    diam_samples = np.asarray(diam_samples, dtype=float)
    mid_samples = np.asarray(mid_samples, dtype=float)

    img_d = _product_images(diam_samples, params, maps, nthreads)
    act_d = (np.abs(chart_j(img_d)) ** 2)
    dist_d = np.max(np.abs(act_d - params.c), axis=1)
    i_d = int(np.argmax(dist_d))
    margin_d = tol - float(dist_d[i_d])

    img_m = _product_images(mid_samples, params, maps, nthreads)
    act_m = (np.abs(chart_j(img_m)) ** 2)
    signed = np.min((act_m - params.c) * np.sign(mid_samples[:, 1::2]), axis=1)
    i_m = int(np.argmin(signed))
    margin_m = float(signed[i_m])

    if margin_d <= margin_m:
        margin, point = margin_d, tuple(float(v) for v in diam_samples[i_d])
    else:
        margin, point = margin_m, tuple(float(v) for v in mid_samples[i_m])
    return CheckRecord(
        name="lagrangian_preimage",
        passed=margin > 0.0,
        worst_margin=margin,
        tolerance=tol,
        samples_used=diam_samples.shape[0] + mid_samples.shape[0],
        worst_point=point,
    )


def check_sharpness_identity(params, tol=1e-15):
    """``n*c + r**2/2 + n*epsilon_default == 1`` and the vanishing limit.

    Also evaluates the default collar width at ``r**2 = 2/(n+1) - 1e-9``
    and requires it below 1e-9 (the collar must vanish at the bound).
    """
    n = params.n
    eps_def = max_epsilon(n, params.r)
    defect = abs(n * params.c + params.r**2 / 2.0 + n * eps_def - 1.0)
    r2_near = 2.0 / (n + 1) - 1e-9
    eps_near = (1.0 / (n + 1) - r2_near / 2.0) / n
    margin = min(tol - defect, 1e-9 - eps_near)
    return CheckRecord(
        name="sharpness_identity",
        passed=margin > 0.0,
        worst_margin=margin,
        tolerance=tol,
        samples_used=2,
        worst_point=None,
    )


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


def run_all(params: PackingParams, spec: SampleSpec | None = None,
            tolerances=None, maps=None, threads=None) -> VerificationReport:
    """Run every check over seeded pools and aggregate into a report.

    Parameters
    ----------
    params : PackingParams
    spec : SampleSpec, optional
        The primary uniform pool; defaults to ``uniform-ball`` with 1e5
        points and seed 42.  Auxiliary pools (boundary-biased, diameter,
        near-midline) get counts and seeds derived from it.
    tolerances : dict, optional
        Per-check overrides of `DEFAULT_TOLERANCES`.
    maps : MapSet, optional
        Map implementations to verify (tests inject faulty ones here).
    threads : int, optional
        Worker threads; defaults to the RELPACK_THREADS env var, else 1.
    """
    if spec is None:
        spec = SampleSpec("uniform-ball", 100000, 42)
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ValueError(f"unknown check names: {sorted(unknown)}")
        tol.update(tolerances)
    maps = maps or default_maps()
    nthreads = resolve_threads(threads)

    aux_seeds = np.random.SeedSequence(spec.seed).generate_state(3)
    pool_uni = sample(spec, params)
    pool_bnd = sample(
        SampleSpec("boundary-biased", max(spec.count // 10, 100),
                   int(aux_seeds[0])), params)
    pool_diam = sample(
        SampleSpec("diameter-only", max(spec.count // 100, 1000),
                   int(aux_seeds[1])), params)
    pool_mid = sample(SampleSpec("midline", 1000, int(aux_seeds[2])), params)

    main_pool = np.concatenate([pool_uni, pool_bnd], axis=0)
    images = _product_images(main_pool, params, maps, nthreads)
    chart_pts = np.concatenate(
        [images[: min(1000, len(pool_uni))],
         images[len(pool_uni) : len(pool_uni) + 200]], axis=0)

    checks = [
        check_area_preservation(main_pool, params, tol["area_preservation"],
                                maps=maps, threads=nthreads),
        check_containment(main_pool, params, tol["containment"],
                          maps=maps, images=images),
        check_midline(pool_diam, pool_mid, params, tol["midline"],
                      maps=maps, threads=nthreads),
        check_band_margins(main_pool, params, tol["band_margins"],
                           maps=maps, images=images),
        check_round_trip(main_pool, params, tol["round_trip"], maps=maps,
                         threads=nthreads),
        check_curve_areas(params, tol["curve_areas"]),
        check_chart_symplectic(chart_pts, tol["chart_symplectic"]),
        check_lagrangian_preimage(params, pool_diam, pool_mid,
                                  tol["lagrangian_preimage"], maps=maps,
                                  threads=nthreads),
        check_sharpness_identity(params, tol["sharpness_identity"]),
    ]
    return VerificationReport(
        n=params.n, r=params.r, epsilon=params.epsilon, seed=spec.seed,
        checks=checks,
    )
