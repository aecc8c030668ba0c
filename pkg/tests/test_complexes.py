"""Threshold complexes, the distance-formula sandwich, and the path estimate."""

import random

import pytest

from quasitrees.axes import AxesConfig, all_primitive_axes, select_preferred_axes
from quasitrees.complexes import (
    ComplexConfig,
    EstimateConfig,
    build_complex,
    complex_distance,
    sample_vertex_pairs,
    verify_distance_formula,
    verify_main_estimate,
)
from quasitrees.embedding import greedy_color
from quasitrees.groups import cayley_ball
from quasitrees.projections import materialize_family, synthetic_family, verify_axioms


@pytest.fixture(scope="module")
def f2_setup(f2):
    ball = cayley_ball(f2, 6)
    preferred = select_preferred_axes(f2, all_primitive_axes(f2, 3), AxesConfig(L=3, R=1))
    fam = materialize_family(preferred, ball, 1)
    report = verify_axioms(fam)
    cfg = ComplexConfig(K=4 * report.xi, policy="4xi")
    cplx = build_complex(fam, cfg, report)
    return f2, ball, preferred, fam, report, cfg, cplx


def test_policy_requires_4xi(f2_setup):
    _, _, _, fam, report, _, _ = f2_setup
    bad = ComplexConfig(K=4 * report.xi - 1, policy="4xi")
    with pytest.raises(ValueError, match="threshold under 4xi"):
        build_complex(fam, bad, report)


def test_explicit_policy_allows_any_K(f2_setup):
    _, _, _, fam, report, _, _ = f2_setup
    c = build_complex(fam, ComplexConfig(K=1000, policy="explicit"), report)
    # enormous K blocks nothing, so every materialized pair gets cross edges
    assert len(c.cross_edges) > 0


def test_disjoint_synthetic_lines_all_cross_edges():
    fam = synthetic_family(seed=1, n=4, spread=0)
    report = verify_axioms(fam)
    c = build_complex(fam, ComplexConfig(K=max(4 * report.xi, 1), policy="4xi"), report)
    crossed = {(a[0], b[0]) for a, b in c.cross_edges}
    for x in range(4):
        for z in range(4):
            if x != z:
                assert (x, z) in crossed or (z, x) in crossed


def test_complex_vertices_keep_member_identity(f2_setup):
    _, _, _, fam, _, _, cplx = f2_setup
    # the same group word appearing on two members stays two vertices
    names = [cplx.vertex_label(v) for v in cplx.graph.vertices]
    assert len(names) == len(set(names))
    assert len(cplx) == sum(len(w) for w in fam.member_params)


def test_cross_edge_distance_one(f2_setup):
    _, _, _, fam, _, _, cplx = f2_setup
    (x, z) = cplx.cross_edges[0]
    assert complex_distance(cplx, x, z) == 1


def test_axis_distance_is_upper_bound(f2_setup):
    """Subgraph inequality: the complex can only be shorter than one member."""
    _, _, _, fam, _, _, cplx = f2_setup
    mi = 0
    window = fam.member_params[mi]
    x, z = (mi, window[0]), (mi, window[-1])
    assert complex_distance(cplx, x, z) <= window[-1] - window[0]


def test_complex_distance_unreachable_message():
    fam = synthetic_family(seed=2, n=4, spread=0)
    report = verify_axioms(fam)
    c = build_complex(fam, ComplexConfig(K=max(4 * report.xi, 1), policy="4xi"), report)
    with pytest.raises(ValueError, match="vertex not in graph"):
        complex_distance(c, (0, 0), (9, 9))


def test_sample_vertex_pairs_deterministic_and_stratified(f2_setup):
    _, _, _, fam, _, _, cplx = f2_setup
    a = sample_vertex_pairs(cplx, 40, seed=9)
    b = sample_vertex_pairs(cplx, 40, seed=9)
    assert a == b
    assert len(a) == 40
    mi, window = 0, fam.member_params[0]
    assert a[0] == ((mi, window[0]), (mi, window[-1]))


def test_distance_formula_holds_on_f2(f2_setup):
    _, _, _, fam, report, cfg, cplx = f2_setup
    pairs = sample_vertex_pairs(cplx, 120, seed=4)
    out = verify_distance_formula(cplx, fam, cfg, pairs)
    assert out.passed
    assert out.violations == []
    assert out.checked == 120


def test_distance_formula_lower_side_nonvacuous(f2):
    """A window as wide as K survives the threshold and forces the bound."""
    from quasitrees.axes import AxisCollection, build_axis

    ball = cayley_ball(f2, 8)
    fam = materialize_family(AxisCollection(f2, (build_axis(f2, "a"),)), ball, 0)
    report = verify_axioms(fam)
    cfg = ComplexConfig(K=16, policy="4xi")
    cplx = build_complex(fam, cfg, report)
    window = fam.member_params[0]
    out = verify_distance_formula(
        cplx, fam, cfg, [((0, window[0]), (0, window[-1]))])
    assert out.passed
    assert out.lower_ratio_max == 0.25


def test_distance_formula_integer_rows(f2_setup):
    _, _, _, fam, report, cfg, cplx = f2_setup
    pairs = sample_vertex_pairs(cplx, 20, seed=11)
    out = verify_distance_formula(cplx, fam, cfg, pairs)
    for row in out.rows:
        assert isinstance(row["distance"], int)
        assert isinstance(row["sum"], int)


def test_main_estimate_trivial_pair(f2_setup):
    f2, ball, preferred, fam, report, cfg, _ = f2_setup
    ecfg = EstimateConfig(K=cfg.K, L=3, R=1)
    out = verify_main_estimate(f2, preferred, fam, ecfg, [("a", "a")])
    assert out.passed
    assert out.min_margin >= ecfg.L + 2 * ecfg.R


def test_main_estimate_single_axis_dominates(f2_setup):
    """x = 1, y = a^6: the axis(a) term carries the whole distance."""
    f2, ball, preferred, fam, report, cfg, _ = f2_setup
    ecfg = EstimateConfig(K=cfg.K, L=24, R=1)
    out = verify_main_estimate(f2, preferred, fam, ecfg, [("", "aaaaaa")])
    assert out.passed
    assert out.violations == []


def test_main_estimate_honest_failure_when_underpadded(f2_setup):
    """L too small for the threshold regime is reported, not silently fixed."""
    f2, ball, preferred, fam, report, cfg, _ = f2_setup
    rng = random.Random(0)
    verts = ball.vertices
    pairs = [(verts[rng.randrange(len(verts))], verts[rng.randrange(len(verts))])
             for _ in range(40)]
    ecfg = EstimateConfig(K=cfg.K, L=1, R=0)
    out = verify_main_estimate(f2, preferred, fam, ecfg, pairs)
    assert not out.passed
    assert out.violations


def test_main_estimate_colored_run(f2_setup):
    f2, ball, preferred, fam, report, cfg, _ = f2_setup
    colors = greedy_color(preferred, fam, theta=1)
    rng = random.Random(7)
    verts = ball.vertices
    pairs = [(verts[rng.randrange(len(verts))], verts[rng.randrange(len(verts))])
             for _ in range(30)]
    ecfg = EstimateConfig(K=cfg.K, L=24, R=1)
    out = verify_main_estimate(f2, preferred, fam, ecfg, pairs, colors)
    assert out.passed
    assert out.skipped == 0
