import numpy as np
import pytest

from epwlab.exactlin import GF, intersect, seeded_rng
from epwlab.exterior import cone_point, epw_frame, kummer_frame
from epwlab.epw import (
    _random_proj,
    collect_rank2_points,
    cone_dims,
    epw_report,
    fiber_check_K4,
    fiber_check_M2,
    fiber_lagrangian_K4,
    fiber_lagrangian_M2,
    interpolate_quartic,
    random_admissible_lagrangian,
    ruling_roots,
    scan_cone,
    tangent_cone_check,
    validate_quartic,
    vertex_rank,
)

F7, F11, F101 = GF(7), GF(11), GF(101)


def seeded_abar(seed, f=F7):
    return random_admissible_lagrangian(f, seeded_rng(seed, "epw", f.p))[1]


@pytest.fixture(scope="module")
def profile_seed3():
    abar = seeded_abar(3)
    return abar, scan_cone(abar)


def test_random_lagrangian_lives_in_the_reduced_frame():
    abar = seeded_abar(0)
    assert abar.dim == 9 and epw_frame(F7).is_lagrangian(abar.space)


def test_scan_profile_seed3(profile_seed3):
    abar, prof = profile_seed3
    assert prof.r3 == 0
    assert prof.vertex_dim == 0 and vertex_rank(abar) == 0
    assert prof.r1 > 0 and prof.r2 > 0
    assert len(prof.points) == (7 * 7 + 7 + 1) ** 2 * 7


def test_batched_ranks_match_subspace_intersection(profile_seed3):
    abar, prof = profile_seed3
    rng = seeded_rng(0, "cone-oracle")
    chosen = list(prof.samples(2)[:5]) + list(prof.samples(1)[:5])
    chosen += [prof.points[rng.randrange(len(prof.points))] for _ in range(10)]
    for pt in chosen:
        pt = [int(c) for c in pt]
        cp = cone_point(F7, pt[0], pt[1:4], pt[4:7])
        direct = intersect(abar.space, cp.tbar).dim
        assert direct == int(cone_dims(abar, np.array([pt]))[0])


def test_ruling_roots(profile_seed3):
    abar, prof = profile_seed3
    rng = seeded_rng(1, "rulings")
    for _ in range(20):
        x, y = _random_proj(rng, 7, 3), _random_proj(rng, 7, 3)
        res = ruling_roots(abar, x, y)
        assert len(res["roots"]) <= 4 or res["line_in_quartic"]
        scaled = ruling_roots(abar, [3 * c % 7 for c in x], [5 * c % 7 for c in y])
        # rescaling x and y rescales t by the product of the scalars
        assert sorted(t * 15 % 7 for t in res["roots"]) == scaled["roots"]
    for pt in prof.samples(2)[:10]:
        pt = [int(c) for c in pt]
        assert pt[0] in ruling_roots(abar, pt[1:4], pt[4:7])["roots"]


def test_surface_count_order_of_magnitude_at_p11():
    prof = scan_cone(seeded_abar(0, F11))
    assert 0.2 <= prof.r2 / 11**2 <= 5


@pytest.fixture(scope="module")
def section101():
    rng = seeded_rng(0, "epw-interp", 101)
    _, abar = random_admissible_lagrangian(F101, rng)
    return abar, interpolate_quartic(abar, rng), rng


def test_interpolation_at_p101(section101):
    abar, section, rng = section101
    assert section.nullity == 1
    assert any(section.block(4))
    res = validate_quartic(abar, section, rng, fresh=400)
    assert res["mismatches"] == 0 and res["on_locus"] >= 200


def test_tangent_cones_at_p11():
    rng = seeded_rng(0, "tangent-cones", 11)
    _, abar = random_admissible_lagrangian(F11, rng)
    section = interpolate_quartic(abar, rng)
    checks = tangent_cone_check(section, collect_rank2_points(abar, 8, rng))
    assert len(checks) == 8
    for c in checks:
        assert c["value"] == 0 and c["gradient_zero"] and c["hessian_rank"] == 3


def test_fiber_lagrangians_are_lagrangian():
    abar = seeded_abar(0)
    frame = kummer_frame(F7)
    rng = seeded_rng(0, "fiber-lag")
    for _ in range(3):
        k4 = fiber_lagrangian_K4(abar, _random_proj(rng, 7, 3))
        m2 = fiber_lagrangian_M2(abar, _random_proj(rng, 7, 3))
        for lag in (k4, m2):
            assert lag.dim == 6 and frame.is_lagrangian(lag.space)


def test_fiber_checks_against_global_section(profile_seed3):
    abar, prof = profile_seed3
    section = interpolate_quartic(abar, points=prof.points[prof.dims >= 1])
    rng = seeded_rng(3, "fiber-checks")
    for _ in range(2):
        m2 = fiber_check_M2(abar, _random_proj(rng, 7, 3), section)
        k4 = fiber_check_K4(abar, _random_proj(rng, 7, 3), section)
        for res in (m2, k4):
            assert res["zero_set_mismatches"] == 0
            assert res["nodes_match_rank2"] and res["restriction_proportional"]
            assert res["fiber_nodes"] <= 16


def test_report_shape():
    rep = epw_report(7, 3, fibers=1)
    assert rep["rank_counts"]["r3"] == 0 and rep["interp_nullity"] == 1
    assert {c["kind"] for c in rep["fiber_checks"]} == {"M2", "K4"}
