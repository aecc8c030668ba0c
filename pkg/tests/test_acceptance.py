"""Acceptance checks for the whole artifact at desk scale.

Each test certifies one headline property and prints a single PASS/FAIL
line with the tightest observed numbers, so a full run reads as a
checklist.  Everything is seeded; the two demo configs shipped with the
repository are exercised as-is except for the output directory.
"""

import json
import pathlib
import time

import pytest

from quasitrees.axes import AxesConfig, all_primitive_axes, build_axis, \
    double_coset_scan, select_preferred_axes
from quasitrees.cli import PipelineConfig, run_pipeline
from quasitrees.complexes import ComplexConfig, build_complex, \
    sample_vertex_pairs, verify_distance_formula
from quasitrees.embedding import greedy_color
from quasitrees.graphs import bottleneck_check, estimate_hyperbolicity
from quasitrees.groups import cayley_ball
from quasitrees.projections import materialize_family, synthetic_family, \
    verify_axioms

REPO = pathlib.Path(__file__).resolve().parent.parent


def report(capsys, num, name, ok, detail):
    with capsys.disabled():
        print(f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.fixture(scope="module")
def f2_stack(f2):
    """Demo-shaped families at truncation radii 8 and 10, built once."""
    preferred = select_preferred_axes(f2, all_primitive_axes(f2, 3),
                                      AxesConfig(L=3, R=1))
    stack = {}
    for radius in (8, 10):
        ball = cayley_ball(f2, radius)
        fam = materialize_family(preferred, ball, 2)
        rep = verify_axioms(fam)
        colors = greedy_color(preferred, fam, 1)
        ccfg = ComplexConfig(K=max(4 * rep.xi, 1), policy="4xi")
        stack[radius] = (ball, fam, rep, colors, ccfg)
    return stack


@pytest.fixture(scope="module")
def f2_demo_run(tmp_path_factory):
    """One run of the shipped free-group demo config."""
    out = tmp_path_factory.mktemp("f2demo")
    cfg = PipelineConfig.from_file(str(REPO / "configs" / "f2_demo.json"),
                                   out=str(out))
    code = run_pipeline(cfg)
    summary = json.loads((out / "summary.json").read_text())
    return code, out, cfg, summary


def test_criterion_01_tree_exactness(f2, capsys):
    t0 = time.perf_counter()
    ball = cayley_ball(f2, 8)
    quads = 10_000
    delta = estimate_hyperbolicity(ball.graph, seed=0, samples=quads)
    elapsed = time.perf_counter() - t0
    ok = delta == 0.0 and elapsed < 10.0
    report(capsys, 1, "tree exactness", ok,
           f"four-point delta {delta} over {quads} quadruples, {elapsed:.1f}s")
    assert delta == 0.0
    assert elapsed < 10.0


def test_criterion_02_axiom_certification(f2, capsys):
    t0 = time.perf_counter()
    candidates = all_primitive_axes(f2, 6)
    preferred = select_preferred_axes(f2, candidates, AxesConfig(L=3, R=1))
    reports = {}
    for radius in (8, 10):
        fam = materialize_family(preferred, cayley_ball(f2, radius), 2)
        reports[radius] = verify_axioms(fam)
    elapsed = time.perf_counter() - t0
    r8, r10 = reports[8], reports[10]
    stable = r8.p2_profile == r10.p2_profile
    ok = (r8.xi >= 0 and not r8.p1_violations and not r10.p1_violations
          and stable and elapsed < 60.0)
    report(capsys, 2, "axiom certification", ok,
           f"xi {r8.xi}, P1 violations 0, P2 profile of {len(r8.p2_profile)} "
           f"pairs stable r8 vs r10, {elapsed:.1f}s")
    assert r8.xi >= 0
    assert r8.p1_violations == [] and r10.p1_violations == []
    assert stable
    assert elapsed < 60.0


def test_criterion_03_distance_formula(f2_stack, capsys):
    """Sandwich with K = 4xi, exact integer comparisons on both sides."""
    ball, fam, rep, colors, ccfg = f2_stack[8]
    whole = build_complex(fam, ccfg, rep)
    pairs = sample_vertex_pairs(whole, 160, 20260814)
    formula = verify_distance_formula(whole, fam, ccfg, pairs)
    exact = all(isinstance(row["distance"], int) and isinstance(row["sum"], int)
                for row in formula.rows)
    resandwich = all(row["sum"] <= 4 * row["distance"]
                     and row["distance"] <= 2 * row["sum"] + 3 * ccfg.K
                     for row in formula.rows)
    ok = (formula.checked >= 100 and not formula.violations
          and exact and resandwich)
    report(capsys, 3, "distance formula", ok,
           f"K {ccfg.K}, checked {formula.checked}, violations "
           f"{len(formula.violations)}, integer rows, "
           f"max lower ratio {formula.lower_ratio_max}")
    assert formula.checked >= 100
    assert formula.violations == []
    assert exact and resandwich


def test_criterion_04_bottleneck_stability(f2_stack, capsys):
    deltas = {}
    for radius in (8, 10):
        ball, fam, rep, colors, ccfg = f2_stack[radius]
        per_class = []
        for ci, cls in enumerate(colors.classes):
            factor = build_complex(fam.subfamily(cls), ccfg, rep)
            passed, delta = bottleneck_check(factor.graph, seed=101 + ci,
                                             samples=50)
            assert passed
            per_class.append(delta)
        deltas[radius] = per_class
    same_m = len(deltas[8]) == len(deltas[10])
    monotone = same_m and all(d10 <= d8 for d8, d10 in
                              zip(deltas[8], deltas[10]))
    report(capsys, 4, "quasi-tree bottleneck", monotone,
           f"per-class delta r8 {deltas[8]} vs r10 {deltas[10]}, "
           f"50 pairs each")
    assert monotone


def test_criterion_05_main_estimate_genus2(tmp_path, capsys):
    t0 = time.perf_counter()
    cfg = PipelineConfig.from_file(str(REPO / "configs" / "genus2_demo.json"),
                                   out=str(tmp_path / "out"))
    code = run_pipeline(cfg)
    elapsed = time.perf_counter() - t0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    est = summary["stages"]["estimate"]
    ok = (code == 0 and est["checked"] == 50 and est["passed"]
          and est["min_margin"] >= 0 and elapsed < 300.0)
    report(capsys, 5, "main estimate, genus 2", ok,
           f"radius {cfg.radius}, L {cfg.L}, R {cfg.R}, checked "
           f"{est['checked']}, min margin {est['min_margin']}, {elapsed:.0f}s")
    assert code == 0
    assert est["checked"] == 50 and est["passed"]
    assert est["min_margin"] >= 0
    assert elapsed < 300.0


def test_criterion_06_qi_embedding(f2_demo_run, capsys):
    code, out, cfg, summary = f2_demo_run
    emb = summary["stages"]["embedding"]
    covers_ball = emb["rows"] == summary["stages"]["ball"]["vertices"]
    ok = (emb["passed"] and covers_ball
          and not emb["lower_violations"] and not emb["upper_violations"])
    report(capsys, 6, "qi embedding", ok,
           f"all {emb['rows']} ball elements, c_up {emb['c_up']}, "
           f"min ratio {emb['min_ratio']}, violations 0")
    assert covers_ball
    assert emb["lower_violations"] == []
    assert emb["upper_violations"] == []


def test_criterion_07_coloring_validity(f2_demo_run, capsys):
    code, out, cfg, summary = f2_demo_run
    col = summary["stages"]["coloring"]
    theta = summary["stages"]["embedding"]["theta"]
    ok = (col["valid"] and col["verified_max_width"] <= theta
          and isinstance(col["m"], int) and col["m"] >= 1)
    report(capsys, 7, "coloring validity", ok,
           f"m {col['m']}, exhaustive max within-class width "
           f"{col['verified_max_width']} <= theta {theta}")
    assert col["valid"]
    assert col["verified_max_width"] <= theta
    assert col["m"] >= 1


def test_criterion_08_double_coset_finiteness(f2, capsys):
    axis = build_axis(f2, "a")
    keys_10 = {key for key, _ in double_coset_scan(axis, 10, 2)}
    keys_12 = {key for key, _ in double_coset_scan(axis, 12, 2)}
    ok = keys_10 == keys_12
    report(capsys, 8, "double-coset finiteness", ok,
           f"{len(keys_10)} cosets over theta 2 at radius 10, "
           f"{len(keys_12)} at radius 12, sets equal")
    assert keys_10 == keys_12


def test_criterion_09_negative_controls(tmp_path, capsys):
    fam = synthetic_family(seed=3, n=9, spread=4, planted=2)
    rep = verify_axioms(fam, xi=fam.declared_xi)
    flagged = sorted(tuple(v) for v in rep.p1_violations)
    planted = sorted(fam.planted)
    cfg = PipelineConfig.from_file(
        str(REPO / "configs" / "synthetic_planted.json"),
        out=str(tmp_path / "out"))
    code = run_pipeline(cfg)
    ok = flagged == planted and len(flagged) == 2 and code != 0
    report(capsys, 9, "negative controls", ok,
           f"{len(flagged)} planted violations flagged exactly, "
           f"pipeline exit {code}")
    assert flagged == planted
    assert code != 0


def test_criterion_10_determinism(f2_demo_run, capsys):
    code, out, cfg, summary = f2_demo_run
    names = ("summary.json", "axioms.json", "family.csv", "embedding.csv")
    before = {name: (out / name).read_bytes() for name in names}
    rerun_code = run_pipeline(cfg)
    identical = [name for name in names
                 if (out / name).read_bytes() == before[name]]
    ok = code == 0 and rerun_code == 0 and len(identical) == len(names)
    report(capsys, 10, "determinism", ok,
           f"{len(identical)}/{len(names)} JSON and CSV reports "
           f"byte-identical across reruns")
    assert code == 0 and rerun_code == 0
    for name in names:
        assert (out / name).read_bytes() == before[name], name
