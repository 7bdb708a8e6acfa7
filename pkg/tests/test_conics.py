import pytest

from epwlab.conics import (
    baby_net_checks,
    baby_pipeline,
    branch_conics,
    e_system_rank,
    involution_check,
    main_pipeline,
    net_checks_pass,
    pencil_images,
    predicate_rank,
    psi,
    random_verra_data,
    same_ruling_check,
    sample_conic,
    verra_data,
)
from epwlab.epw import ruling_roots
from epwlab.exactlin import Matrix, rank, seeded_rng
from epwlab.exterior import cone_point, wedge2u_space
from epwlab.kummer import kummer_from_lagrangian, node_scan, split_fixture

P = 101


@pytest.fixture(scope="module", params=["main", "baby"])
def data(request):
    return random_verra_data(P, 0, request.param)


@pytest.fixture(scope="module")
def samples(data):
    rng = seeded_rng(0, "test-conics", data.flavor)
    return [sample_conic(data, rng) for _ in range(3)]


def _quad(f, m, v):
    acc = f.zero
    for i, vi in enumerate(v):
        for j, vj in enumerate(v):
            acc = f.add(acc, f.mul(f.mul(vi, m[i, j]), vj))
    return acc


def _ambient_point(sample, z, s):
    f = sample.field
    coords = [z, s[0][0], s[0][1], s[1][0], s[1][1]]
    out = [f.zero] * len(sample.pencil.ambient[0])
    for c, row in zip(coords, sample.pencil.ambient):
        out = [f.add(o, f.mul(c, r)) for o, r in zip(out, row)]
    return out


def test_segre_member_is_root_at_infinity(samples):
    for s in samples:
        pen = s.pencil
        assert pen.quintic[5] == 0
        assert any(c != 0 for c in pen.quintic)
        assert rank(pen.segre) < 5
        assert s.meta["root"] in pen.roots()
        assert rank(pen.member(s.meta["root"])) == 4


def test_sample_points_lie_on_y(samples):
    for s in samples:
        f = s.field
        equations = [s.data.verra_quadric(f)] + s.data.minor_quadrics(f)
        for z, mat in s.points:
            v = _ambient_point(s, z, mat)
            assert any(c != 0 for c in v)
            assert all(_quad(f, q, v) == 0 for q in equations)


def test_normal_form_constants_agree(samples):
    for s in samples:
        assert len(set(s.constants)) == 1


def _meet_by_rank(f, lag_rows, other_rows):
    stacked = Matrix(f, [list(r) for r in lag_rows] + [list(r) for r in other_rows])
    return len(lag_rows) + len(other_rows) - rank(stacked)


def test_predicate_rank_matches_stacked_rank(samples):
    for s in samples:
        f, data = s.field, s.data
        image = psi(s)
        prank = predicate_rank(data, f, image)
        assert prank >= 1
        lag = data.lagrangian_over(f).space.rows()
        if data.flavor == "main":
            other = cone_point(f, image[0], list(image[1:4]), list(image[4:7])).tbar.rows()
        else:
            other = wedge2u_space(f, list(image)).rows()
        assert _meet_by_rank(f, lag, other) == prank


def test_e_system(samples):
    for s in samples:
        assert e_system_rank(s) == {"rank": 2, "e1_zero": True}


def test_involution_and_same_ruling(samples):
    rng = seeded_rng(1, "test-involution")
    for s in samples:
        inv = involution_check(s, rng)
        assert inv == {"meet_dim": 2, "in_member": True, "psi_equal": True, "fresh_psi_equal": True}
        rul = same_ruling_check(s, rng)
        assert rul == {"found": True, "psi_equal": True}


def test_baby_images_on_kummer_quartic():
    data = random_verra_data(P, 0, "baby")
    quartic = kummer_from_lagrangian(data.lagrangian, "wedge2U")
    rng = seeded_rng(2, "test-baby")
    for _ in range(3):
        s = sample_conic(data, rng)
        assert quartic.form.over(s.field)(list(psi(s))) == 0


def test_baby_net_checks():
    data = random_verra_data(P, 1, "baby")
    rng = seeded_rng(3, "test-nets")
    checks = [baby_net_checks(sample_conic(data, rng), rng) for _ in range(3)]
    assert all(net_checks_pass(c) for c in checks)


def test_net_checks_reject_main_flavor():
    data = random_verra_data(P, 0, "main")
    rng = seeded_rng(4)
    with pytest.raises(ValueError):
        baby_net_checks(sample_conic(data, rng), rng)


def test_pencil_t_values_match_ruling_roots():
    data = random_verra_data(P, 2, "main")
    rng = seeded_rng(5, "test-rulings")
    compared = 0
    for _ in range(3):
        x = [1, rng.randrange(P), rng.randrange(P)]
        y = [1, rng.randrange(P), rng.randrange(P)]
        from_cone = ruling_roots(data.lagrangian, x, y)["roots"]
        assert pencil_images(data, (x, y), rng)["t_values"] == from_cone
        compared += len(from_cone)
    assert compared >= 1


def test_branch_conics_over_fixture_nodes():
    data = verra_data(split_fixture(11), "baby")
    quartic = kummer_from_lagrangian(data.lagrangian, "wedge2U")
    nodes = node_scan(data.lagrangian, data.field, quartic, flavor="wedge2U").points
    rng = seeded_rng(6, "test-branch")
    smooth = 0
    for node in [u for u in nodes if any(u[:3])][:4]:
        out = branch_conics(data, list(node[:3]), rng)
        if not out["smooth"]:
            continue
        smooth += 1
        assert out["z_zero"] and out["distinct"] and out["involution_fixed"]
        assert out["shared_image"]
        assert out["predicate_rank"] >= 2
        assert out["e_ranks"] == [1, 1]
    assert smooth >= 1


def test_pipelines_small_runs():
    main = main_pipeline(random_verra_data(P, 3, "main"), 4, 0)
    assert all(v == 0 for v in main["failures"].values())
    baby = baby_pipeline(random_verra_data(P, 3, "baby"), 4, 0)
    assert all(v == 0 for v in baby["failures"].values())
    assert all(net_checks_pass(n) for n in baby["net_checks"])


def test_pipelines_reject_wrong_flavor():
    with pytest.raises(ValueError):
        main_pipeline(random_verra_data(P, 0, "baby"), 1, 0)
    with pytest.raises(ValueError):
        baby_pipeline(random_verra_data(P, 0, "main"), 1, 0)
    with pytest.raises(ValueError):
        pencil_images(random_verra_data(P, 0, "baby"), [1, 0, 0], seeded_rng(0))
