"""Sampling pools, check records, report schema, and fault injection."""

import json

import numpy as np
import pytest

from relpack import make_params
from relpack.verify import (
    DEFAULT_TOLERANCES,
    SampleSpec,
    check_area_preservation,
    check_curve_areas,
    check_round_trip,
    check_sharpness_identity,
    resolve_threads,
    run_all,
    sample,
)

from _faulty import stretched_maps


# ---------------------------------------------------------------------------
# sampling


def test_sampling_is_deterministic(p28):
    for strategy in ("uniform-ball", "boundary-biased", "midline", "diameter-only"):
        a = sample(SampleSpec(strategy, 500, 11), p28)
        b = sample(SampleSpec(strategy, 500, 11), p28)
        assert np.array_equal(a, b)
        c = sample(SampleSpec(strategy, 500, 12), p28)
        assert not np.array_equal(a, c)


def test_all_strategies_stay_inside_ball(p28):
    for strategy in (
        "grid",
        "uniform-ball",
        "boundary-biased",
        "midline",
        "diameter-only",
    ):
        pts = sample(SampleSpec(strategy, 400, 5), p28)
        assert pts.shape[1] == 2 * p28.n
        assert np.all(np.einsum("ij,ij->i", pts, pts) < p28.r**2)


def test_diameter_pool_has_zero_momenta(p28):
    pts = sample(SampleSpec("diameter-only", 300, 9), p28)
    assert np.all(pts[:, 1::2] == 0.0)
    assert np.any(pts[:, 0::2] != 0.0)


def test_boundary_pool_hugs_the_sphere(p28):
    pts = sample(SampleSpec("boundary-biased", 300, 9), p28)
    total = np.einsum("ij,ij->i", pts, pts)
    assert np.all(total > 0.98 * p28.r**2)
    assert np.all(total < p28.r**2)


def test_midline_pool_momenta_small_but_nonzero(p28):
    pts = sample(SampleSpec("midline", 300, 9), p28)
    p = pts[:, 1::2]
    assert np.all(p != 0.0)
    assert np.max(np.abs(p)) <= 1e-3 * p28.r
    assert np.min(np.abs(p)) >= 1e-9 * p28.r * 0.999


def test_uniform_ball_mean_action(p37):
    # for the uniform law on the ball, E[sum u_i] = r^2 * n/(n+1)
    pts = sample(SampleSpec("uniform-ball", 40000, 3), p37)
    total = np.einsum("ij,ij->i", pts, pts)
    nn = p37.n
    mean = p37.r**2 * nn / (nn + 1.0)
    var = p37.r**4 * nn / ((nn + 1.0) ** 2 * (nn + 2.0))
    se = np.sqrt(var / total.size)
    assert abs(total.mean() - mean) < 3.0 * se


def test_unknown_strategy_rejected(p28):
    with pytest.raises(ValueError):
        sample(SampleSpec("hexagonal", 10, 0), p28)
    with pytest.raises(ValueError):
        sample(SampleSpec("uniform-ball", 0, 0), p28)


# ---------------------------------------------------------------------------
# threads


def test_resolve_threads_env(monkeypatch):
    monkeypatch.delenv("RELPACK_THREADS", raising=False)
    assert resolve_threads() == 1
    monkeypatch.setenv("RELPACK_THREADS", "4")
    assert resolve_threads() == 4
    assert resolve_threads(2) == 2  # explicit argument wins
    monkeypatch.setenv("RELPACK_THREADS", "1000")
    assert resolve_threads() == 64  # capped


def test_threaded_run_is_bit_identical(p28):
    spec = SampleSpec("uniform-ball", 3000, 21)
    r1 = run_all(p28, spec, threads=1)
    r4 = run_all(p28, spec, threads=4)
    assert r1.to_json() == r4.to_json()


# ---------------------------------------------------------------------------
# reports


def test_report_schema_and_determinism(p28):
    spec = SampleSpec("uniform-ball", 2000, 13)
    rep = run_all(p28, spec)
    text = rep.to_json()
    assert text == run_all(p28, spec).to_json()
    doc = json.loads(text)
    assert set(doc) == {"params", "checks", "overall"}
    assert doc["params"] == {
        "n": 2,
        "r": 0.8,
        "epsilon": p28.epsilon,
        "seed": 13,
    }
    names = [c["name"] for c in doc["checks"]]
    assert names == [
        "area_preservation",
        "containment",
        "midline",
        "band_margins",
        "round_trip",
        "curve_areas",
        "chart_symplectic",
        "lagrangian_preimage",
        "sharpness_identity",
    ]
    for c in doc["checks"]:
        assert set(c) == {"name", "passed", "worst_margin", "tolerance", "samples"}
        assert isinstance(c["passed"], bool)
    assert doc["overall"] is True
    # floats survive the round trip exactly (full precision serialization)
    assert doc["params"]["r"] == 0.8
    assert doc["params"]["epsilon"] == p28.epsilon


def test_report_save(tmp_path, p28):
    rep = run_all(p28, SampleSpec("uniform-ball", 1000, 2))
    out = tmp_path / "report.json"
    rep.save(out)
    assert json.loads(out.read_text())["overall"] is True


def test_near_bound_run_passes():
    p = make_params(2, 0.81)
    rep = run_all(p, SampleSpec("uniform-ball", 4000, 7))
    assert rep.overall


def test_unknown_tolerance_name_rejected(p28):
    with pytest.raises(ValueError):
        run_all(p28, SampleSpec("uniform-ball", 100, 0), tolerances={"nope": 1.0})


def test_tightened_tolerance_fails_cleanly(p28):
    rep = run_all(
        p28,
        SampleSpec("uniform-ball", 1000, 4),
        tolerances={"round_trip": 1e-18},
    )
    assert not rep.overall
    rec = {c.name: c for c in rep.checks}["round_trip"]
    assert not rec.passed and rec.worst_margin < 0.0
    assert rec.tolerance == 1e-18


# ---------------------------------------------------------------------------
# individual checks against the grid pool


def test_grid_area_check(p28):
    # lattice restricted to the first factor, differenced determinant
    pts = sample(SampleSpec("grid", 10000, 0), p28)
    rec = check_area_preservation(pts, p28)
    assert rec.passed
    assert rec.worst_margin > 0.0
    assert rec.tolerance == DEFAULT_TOLERANCES["area_preservation"]


def test_sharpness_record(p28):
    rec = check_sharpness_identity(p28)
    assert rec.passed and rec.name == "sharpness_identity"
    assert rec.tolerance == 1e-15


def test_curve_area_record(p37):
    rec = check_curve_areas(p37, count=8)
    assert rec.passed and rec.samples_used == 8


# ---------------------------------------------------------------------------
# fault injection


def test_broken_maps_fail_area_only_spotcheck(p28):
    maps = stretched_maps()
    pts = sample(SampleSpec("uniform-ball", 2000, 17), p28)
    bad = check_area_preservation(pts, p28, maps=maps)
    assert not bad.passed
    # the stretch misses the true determinant by exactly one percent
    assert bad.worst_margin == pytest.approx(
        DEFAULT_TOLERANCES["area_preservation"] - 0.01, abs=1e-6
    )
    # while the self-consistent round trip still closes
    good = check_round_trip(pts, p28, maps=maps)
    assert good.passed
