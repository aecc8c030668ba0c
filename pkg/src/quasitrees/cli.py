"""Config-driven pipeline: ball, axes, family, axioms, complexes, product.

One JSON config drives the whole run.  Every stage appends its report to a
summary dictionary; the exit status is zero exactly when no stage reported
a violation.  All sampling derives from the single configured seed and no
report carries a timestamp, so identical config and seed give byte-identical
JSON and CSV output.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import warnings
from dataclasses import dataclass, field

from .axes import AxesConfig, AxisCollection, all_primitive_axes, \
    coverage_gaps, double_coset_scan, select_preferred_axes
from .complexes import ComplexConfig, EstimateConfig, build_complex, \
    sample_vertex_pairs, verify_distance_formula, verify_main_estimate
from .embedding import CertifyConfig, ProductSpace, default_basepoint, \
    greedy_color, qi_certify, verify_coloring
from .graphs import bottleneck_check, estimate_hyperbolicity
from .groups import Presentation, cayley_ball
from .projections import materialize_family, synthetic_family, verify_axioms

_DEFAULT_SAMPLES = {
    "quadruples": 2000,
    "formula_pairs": 160,
    "estimate_pairs": 50,
    "bottleneck_pairs": 50,
}


@dataclass
class PipelineConfig:
    """Everything a run needs; mirrors the JSON config file."""

    presentation: str | None = None
    radius: int = 6
    L_cand: int = 2
    L: int = 3
    R: int = 1
    theta: object = "auto"
    K: object = "4xi"
    translate_radius: int = 2
    scan_radius: int | None = None
    samples: dict = field(default_factory=lambda: dict(_DEFAULT_SAMPLES))
    seed: int = 0
    out: str = "out"
    synthetic: dict | None = None

    def __post_init__(self):
        if self.radius < 2 * self.L_cand:
            raise ValueError("radius must be at least twice L_cand")
        if self.synthetic is None and self.presentation is None:
            raise ValueError("config needs a presentation path or a synthetic block")
        if isinstance(self.theta, str) and self.theta != "auto":
            raise ValueError(f"theta must be a number or 'auto', got {self.theta!r}")
        if isinstance(self.K, str) and self.K != "4xi":
            raise ValueError(f"K must be a number or '4xi', got {self.K!r}")
        merged = dict(_DEFAULT_SAMPLES)
        merged.update(self.samples)
        self.samples = merged

    @classmethod
    def from_file(cls, path: str, **overrides) -> "PipelineConfig":
        with open(path) as fh:
            raw = json.load(fh)
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)

    def to_dict(self) -> dict:
        return {
            "presentation": self.presentation, "radius": self.radius,
            "L_cand": self.L_cand, "L": self.L, "R": self.R,
            "theta": self.theta, "K": self.K,
            "translate_radius": self.translate_radius,
            "scan_radius": self.scan_radius,
            "samples": dict(sorted(self.samples.items())),
            "seed": self.seed, "out": self.out,
            "synthetic": self.synthetic,
        }


class StageFailure(Exception):
    """A pipeline stage could not complete; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage} failed: {message}")
        self.stage = stage


def _fmt_dist(value) -> str:
    number = float(value)
    if number.is_integer():
        return str(int(number))
    return f"{number:.2f}"


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_family_csv(path: str, fam) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "beta", "proj_vertices"])
        for a in range(len(fam)):
            for b in range(len(fam)):
                if a == b:
                    continue
                if fam.axes is not None:
                    cells = [w or "1" for w in fam.proj_vertices(b, a)]
                else:
                    cells = [str(t) for t in fam.proj_params(b, a)]
                writer.writerow([fam.labels[a], fam.labels[b], " ".join(cells)])


def _write_embedding_csv(path: str, report) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "|h|", "dist"])
        for row in report.rows:
            writer.writerow([row["h"], row["len"], _fmt_dist(row["dist"])])


def _write_scatter(path: str, report, seed: int) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = str(seed)
    xs = [row["len"] for row in report.rows]
    ys = [float(row["dist"]) for row in report.rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(xs, ys, s=9, alpha=0.35, linewidths=0)
    ax.set_xlabel("word length")
    ax.set_ylabel("product distance (exact or certified floor)")
    ax.set_title("orbit growth in the product")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run_pipeline(cfg: PipelineConfig) -> int:
    """Execute all stages, write the report bundle, return the exit code."""
    os.makedirs(cfg.out, exist_ok=True)
    summary: dict = {"config": cfg.to_dict(), "stages": {}}
    failures: list[str] = []
    try:
        if cfg.synthetic is not None:
            exit_code = _run_synthetic(cfg, summary, failures)
        else:
            exit_code = _run_group(cfg, summary, failures)
    except StageFailure as exc:
        summary["error"] = str(exc)
        summary["passed"] = False
        _write_json(os.path.join(cfg.out, "summary.json"), summary)
        print(str(exc), file=sys.stderr)
        return 1
    summary["passed"] = not failures
    summary["failures"] = failures
    _write_json(os.path.join(cfg.out, "summary.json"), summary)
    for line in _explain_lines(summary):
        print(line)
    return exit_code


def _run_synthetic(cfg: PipelineConfig, summary: dict, failures: list) -> int:
    spec = dict(cfg.synthetic)
    fam = synthetic_family(
        seed=int(spec.get("seed", cfg.seed)),
        n=int(spec.get("n", 8)),
        spread=int(spec.get("spread", 3)),
        planted=int(spec.get("planted", 0)),
    )
    report = verify_axioms(fam, xi=fam.declared_xi)
    summary["stages"]["axioms"] = report.to_dict()
    summary["stages"]["axioms"]["planted"] = [list(t) for t in fam.planted]
    _write_json(os.path.join(cfg.out, "axioms.json"), report.to_dict())
    if report.p1_violations:
        failures.append("axioms")
        return 2
    return 0


def _run_group(cfg: PipelineConfig, summary: dict, failures: list) -> int:
    rng = random.Random(cfg.seed)
    stages = summary["stages"]

    if not os.path.exists(cfg.presentation):
        raise StageFailure("load", f"presentation file not found: {cfg.presentation}")
    p = Presentation.from_file(cfg.presentation)

    try:
        ball = cayley_ball(p, cfg.radius)
    except Exception as exc:
        raise StageFailure("ball", str(exc))
    sample_cap = min(cfg.samples["quadruples"], len(ball.vertices) ** 2)
    delta = estimate_hyperbolicity(ball.graph, seed=cfg.seed, samples=sample_cap)
    stages["ball"] = {"radius": cfg.radius, "vertices": len(ball.vertices),
                      "four_point_delta": delta}

    try:
        candidates = all_primitive_axes(p, cfg.L_cand)
        axes_cfg = AxesConfig(L=cfg.L, R=cfg.R)
        preferred = select_preferred_axes(p, candidates, axes_cfg)
        gaps = coverage_gaps(p, preferred, cfg.L, reference=candidates)
    except Exception as exc:
        raise StageFailure("axes", str(exc))
    stages["axes"] = {"candidates": len(candidates), "preferred": preferred.reps(),
                      "coverage_gaps": len(gaps)}
    if gaps:
        failures.append("axes")

    try:
        with warnings.catch_warnings(record=True) as dropped:
            warnings.simplefilter("always")
            fam = materialize_family(preferred, ball, cfg.translate_radius)
    except Exception as exc:
        raise StageFailure("family", str(exc))
    stages["family"] = {"members": len(fam), "unsafe_pairs": len(fam.unsafe),
                        "excluded": len(dropped)}

    report = verify_axioms(fam)
    stages["axioms"] = report.to_dict()
    _write_json(os.path.join(cfg.out, "axioms.json"), report.to_dict())
    _write_family_csv(os.path.join(cfg.out, "family.csv"), fam)
    if report.p1_violations:
        failures.append("axioms")

    theta = cfg.theta
    if theta == "auto":
        scan_radius = cfg.scan_radius or min(cfg.radius, 6)
        if p.cls == "free":
            target = scan_radius
        elif scan_radius >= cfg.radius:
            target = ball
        else:
            target = cayley_ball(p, scan_radius)
        theta = 0
        for base in preferred.axes:
            for _, diam in double_coset_scan(base, target, 0):
                theta = max(theta, diam)
    theta = int(theta)

    colors = greedy_color(preferred, fam, theta)
    color_ok, worst = verify_coloring(fam, colors)
    stages["coloring"] = colors.to_dict()
    stages["coloring"]["verified_max_width"] = worst
    stages["coloring"]["valid"] = color_ok
    if not color_ok:
        failures.append("coloring")

    if cfg.K == "4xi":
        K = max(4 * report.xi, 1)
    else:
        K = int(cfg.K)
    stages["K"] = K
    ccfg = ComplexConfig(K=K, policy="4xi" if cfg.K == "4xi" else "explicit")
    if ccfg.policy == "explicit" and K < 4 * report.xi:
        raise StageFailure("complex", "threshold under 4xi")
    try:
        whole = build_complex(fam, ccfg, report)
    except ValueError as exc:
        raise StageFailure("complex", str(exc))
    stages["complex"] = {"vertices": len(whole), "cross_edges": len(whole.cross_edges),
                         "skipped_cross": whole.skipped_cross}

    pairs = sample_vertex_pairs(whole, cfg.samples["formula_pairs"], rng.randrange(1 << 30))
    formula = verify_distance_formula(whole, fam, ccfg, pairs)
    stages["formula"] = formula.to_dict()
    if not formula.passed:
        failures.append("formula")

    factors = []
    per_class = []
    for ci, cls in enumerate(colors.classes):
        sub = fam.subfamily(cls)
        factor = build_complex(sub, ccfg, report)
        factors.append(factor)
        passed, bdelta = bottleneck_check(
            factor.graph, seed=rng.randrange(1 << 30),
            samples=cfg.samples["bottleneck_pairs"])
        per_class.append({"class": ci, "vertices": len(factor),
                          "passed": passed, "delta": bdelta})
        if not passed:
            failures.append(f"bottleneck[{ci}]")
    stages["bottleneck"] = {"per_class": per_class,
                            "max_delta": max((r["delta"] for r in per_class), default=0)}

    est_pairs = []
    verts = ball.vertices
    for _ in range(cfg.samples["estimate_pairs"]):
        est_pairs.append((verts[rng.randrange(len(verts))],
                          verts[rng.randrange(len(verts))]))
    ecfg = EstimateConfig(K=K, L=cfg.L, R=cfg.R)
    estimate = verify_main_estimate(p, preferred, fam, ecfg, est_pairs, colors)
    stages["estimate"] = estimate.to_dict()
    if not estimate.passed:
        failures.append("estimate")

    sp = ProductSpace(factors, colors)
    x_hat = default_basepoint(sp)
    qcfg = CertifyConfig(K=K, L=cfg.L, R=cfg.R, xi=report.xi)
    embedding = qi_certify(p, sp, x_hat, ball, qcfg)
    stages["embedding"] = embedding.to_dict()
    _write_embedding_csv(os.path.join(cfg.out, "embedding.csv"), embedding)
    _write_scatter(os.path.join(cfg.out, "scatter.svg"), embedding, cfg.seed)
    if not embedding.passed:
        failures.append("embedding")

    return 0 if not failures else 2


_CHECK_NAMES = [
    ("formula", "distance-formula sandwich"),
    ("estimate", "path main estimate"),
    ("embedding", "orbit embedding bounds"),
    ("bottleneck", "quasi-tree bottleneck"),
]


def _explain_lines(summary: dict) -> list[str]:
    stages = summary.get("stages", {})
    lines = []
    for key, name in _CHECK_NAMES:
        if key not in stages:
            continue
        data = stages[key]
        if key == "bottleneck":
            ok = all(r["passed"] for r in data["per_class"])
            detail = f"max delta {data['max_delta']} over {len(data['per_class'])} classes"
        elif key == "formula":
            ok = data["passed"]
            detail = (f"checked {data['checked']}, excluded {data['excluded']}, "
                      f"max lower ratio {data['lower_ratio_max']}, "
                      f"min upper slack {data['upper_slack_min']}")
        elif key == "estimate":
            ok = data["passed"]
            detail = (f"checked {data['checked']}, skipped {data['skipped']}, "
                      f"min margin {data['min_margin']}")
        else:
            ok = data["passed"]
            detail = (f"c_up {data['c_up']}, rows {data['rows']}, "
                      f"min ratio {data['min_ratio']}")
        lines.append(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    if not lines and "axioms" in stages:
        ax = stages["axioms"]
        ok = not ax["p1_violations"]
        lines.append(f"projection axioms: {'PASS' if ok else 'FAIL'} "
                     f"(xi {ax['xi']}, violations {len(ax['p1_violations'])})")
    if not lines:
        lines.append("no checks run")
    return lines


def explain(report_path: str) -> int:
    try:
        with open(report_path) as fh:
            summary = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read report: {exc}", file=sys.stderr)
        return 1
    if not isinstance(summary, dict):
        print("malformed report: expected a JSON object", file=sys.stderr)
        return 1
    for line in _explain_lines(summary):
        print(line)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="quasitrees",
        description="certify projection-complex constructions at desk scale")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run the full pipeline from a JSON config")
    runp.add_argument("--config", required=True)
    runp.add_argument("--radius", type=int, default=None)
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--out", default=None)
    exp = sub.add_parser("explain", help="summarize a written report")
    exp.add_argument("report")
    args = parser.parse_args(argv)
    if args.command == "explain":
        return explain(args.report)
    try:
        cfg = PipelineConfig.from_file(args.config, radius=args.radius,
                                       seed=args.seed, out=args.out)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return run_pipeline(cfg)


if __name__ == "__main__":
    sys.exit(main())
