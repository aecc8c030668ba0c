"""Projection complexes and the two distance inequalities checked on them.

Given a projection family and a threshold K, the complex takes the disjoint
union of the member lines (each contributes a path graph over its
materialized parameter window) and joins the mutual projections of a pair
by unit edges whenever no third member sees the pair at width K or more.
Vertices are (member, parameter) pairs and are never merged, even when two
axes overlap in the ambient Cayley graph.

Two verifiers run over sampled pairs: the four-to-one sandwich between
thresholded projection sums and complex distance, and the path estimate
bounding word distance by twice the thresholded sum plus an additive
constant from the covering and density parameters.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .graphs import MetricGraph
from .projections import ProjectionFamily, threshold


@dataclass(frozen=True)
class ComplexConfig:
    """Edge threshold K and the policy tying it to the measured constant."""

    K: int
    policy: str = "4xi"

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError("threshold needs K > 0")
        if self.policy not in ("4xi", "explicit"):
            raise ValueError(f"unknown threshold policy {self.policy!r}")


@dataclass(frozen=True)
class EstimateConfig:
    """Constants for the path estimate: threshold K, cover length L, density R."""

    K: int
    L: int
    R: int

    def __post_init__(self):
        if self.K <= 0 or self.L < 1 or self.R < 0:
            raise ValueError("estimate constants out of range")


class QuasiTreeComplex:
    """Disjoint union of member paths plus unit cross edges."""

    def __init__(self, fam: ProjectionFamily, cfg: ComplexConfig,
                 cross_edges, skipped_cross: int):
        self.fam = fam
        self.cfg = cfg
        self.cross_edges = tuple(cross_edges)
        self.skipped_cross = skipped_cross
        adjacency: dict = {}
        order = []
        for mi in range(len(fam)):
            window = fam.member_params[mi]
            for t in window:
                order.append((mi, t))
        present = set(order)
        for (mi, t) in order:
            nbrs = set()
            for s in (t - 1, t + 1):
                if (mi, s) in present:
                    nbrs.add((mi, s))
            adjacency[(mi, t)] = nbrs
        for (u, v) in self.cross_edges:
            adjacency[u].add(v)
            adjacency[v].add(u)
        self.graph = MetricGraph(adjacency, order=order)

    def __len__(self) -> int:
        return len(self.graph)

    def vertex_label(self, v) -> str:
        mi, t = v
        name = self.fam.labels[mi]
        if self.fam.axes is not None:
            word = self.fam.axes[mi].point(t)
            return f"{name}/{word or '1'}"
        return f"{name}/{t}"

    def components(self):
        return tuple(self.fam.labels)

    def to_text(self) -> str:
        from .graphs import graph_to_text
        return graph_to_text(self.graph, label=self.vertex_label)


def build_complex(fam: ProjectionFamily, cfg: ComplexConfig,
                  axiom_report=None) -> QuasiTreeComplex:
    """Assemble the complex at threshold cfg.K.

    Under the "4xi" policy an axiom report must be supplied and the
    threshold must be at least four times its constant.
    """
    if fam.member_params is None:
        raise ValueError("family has no materialized windows")
    if cfg.policy == "4xi":
        if axiom_report is None or cfg.K < 4 * axiom_report.xi:
            raise ValueError("threshold under 4xi")
    n = len(fam)
    D = fam.D()
    allowed = D.max(axis=0) < cfg.K
    cross = []
    skipped = 0
    windows = [set(w) for w in fam.member_params]
    for x in range(n):
        for z in range(x + 1, n):
            if not allowed[x, z]:
                continue
            px = [t for t in fam.proj_params(x, z) if t in windows[x]]
            pz = [s for s in fam.proj_params(z, x) if s in windows[z]]
            if not px or not pz:
                skipped += 1
                continue
            for t in px:
                for s in pz:
                    cross.append(((x, t), (z, s)))
    return QuasiTreeComplex(fam, cfg, cross, skipped)


def complex_distance(c: QuasiTreeComplex, x, z) -> int:
    """BFS distance in the combined graph."""
    try:
        return c.graph.distance(x, z)
    except ValueError as exc:
        if "unreachable" in str(exc):
            raise ValueError(
                f"complex disconnected at this truncation: no path "
                f"{c.vertex_label(x)} -> {c.vertex_label(z)}") from exc
        raise


def _endpoint_sum(fam: ProjectionFamily, X, t, Z, s, K):
    """Thresholded projection sum for vertices (X, t) and (Z, s).

    Endpoint members use the point-augmented conventions: on X the term is
    the diameter of {x} together with the projection of Z (internal
    distance when X = Z); elsewhere the plain pair width applies.
    """
    D = fam.D()
    n = len(fam)
    total = 0
    terms = {}
    for y in range(n):
        if X == Z:
            if y == X:
                val = _point_pair_internal(fam, X, t, s)
            else:
                val = int(D[y, X, X])
        elif y == X:
            val = _point_set_diam(fam, X, t, Z)
        elif y == Z:
            val = _point_set_diam(fam, Z, s, X)
        else:
            val = int(D[y, X, Z])
        val = threshold(val, K)
        if val:
            terms[fam.labels[y]] = val
            total += val
    return total, terms


def _point_pair_internal(fam, X, t, s) -> int:
    if fam.kind == "interval":
        return abs(t - s)
    return fam._pd_diam(X, (t,), (s,))


def _point_set_diam(fam, X, t, Z) -> int:
    proj = fam.proj_params(X, Z)
    if fam.kind == "interval":
        return max(max(proj), t) - min(min(proj), t)
    return fam._pd_diam(X, (t,), proj)


def _pair_safe(fam: ProjectionFamily, X, Z) -> bool:
    for y in range(len(fam)):
        if (y, X) in fam.unsafe or (y, Z) in fam.unsafe:
            return False
    if X != Z and ((X, Z) in fam.unsafe or (Z, X) in fam.unsafe):
        return False
    return True


@dataclass
class FormulaReport:
    """Sandwich verification outcome over sampled vertex pairs."""

    K: int
    checked: int
    excluded: int
    violations: list = field(default_factory=list)
    lower_ratio_max: float = 0.0
    upper_slack_min: int | None = None
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.violations

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "checked": self.checked,
            "excluded": self.excluded,
            "violations": self.violations,
            "lower_ratio_max": round(self.lower_ratio_max, 6),
            "upper_slack_min": self.upper_slack_min,
            "passed": self.passed,
        }


def sample_vertex_pairs(c: QuasiTreeComplex, count: int, seed: int) -> list:
    """Deterministic sample of distinct vertex pairs of the complex.

    The window-extreme pair of every member comes first so the sample always
    exercises the internal-distance convention at full materialized length;
    the rest is seeded uniform sampling.
    """
    rng = random.Random(seed)
    verts = list(c.graph.vertices)
    if len(verts) < 2:
        raise ValueError("empty projection input")
    pairs = []
    for mi, window in enumerate(c.fam.member_params):
        if len(pairs) * 2 >= count:
            break
        if len(window) > 1:
            pairs.append(((mi, min(window)), (mi, max(window))))
    while len(pairs) < count:
        x = verts[rng.randrange(len(verts))]
        z = verts[rng.randrange(len(verts))]
        while z == x:
            z = verts[rng.randrange(len(verts))]
        pairs.append((x, z))
    return pairs


def verify_distance_formula(c: QuasiTreeComplex, fam: ProjectionFamily,
                            cfg: ComplexConfig, samples) -> FormulaReport:
    """Check 4*sum >= distance and distance <= 2*sum + 3K per sampled pair.

    All arithmetic is integer; truncation-unsafe pairs are excluded and
    counted.  Disconnected pairs count as excluded too: on a truncation a
    missing route says nothing about the inequality.
    """
    rep = FormulaReport(K=cfg.K, checked=0, excluded=0)
    for (x, z) in samples:
        X, t = x
        Z, s = z
        if not _pair_safe(fam, X, Z):
            rep.excluded += 1
            continue
        try:
            d = complex_distance(c, x, z)
        except ValueError:
            rep.excluded += 1
            continue
        total, terms = _endpoint_sum(fam, X, t, Z, s, cfg.K)
        lower_ok = total <= 4 * d
        upper_ok = d <= 2 * total + 3 * cfg.K
        rep.checked += 1
        if d:
            rep.lower_ratio_max = max(rep.lower_ratio_max, total / (4 * d))
        slack = 2 * total + 3 * cfg.K - d
        rep.upper_slack_min = slack if rep.upper_slack_min is None else min(
            rep.upper_slack_min, slack)
        rep.rows.append({
            "x": c.vertex_label(x), "z": c.vertex_label(z),
            "sum": total, "distance": d,
        })
        if not (lower_ok and upper_ok):
            rep.violations.append({
                "x": c.vertex_label(x), "z": c.vertex_label(z),
                "sum": total, "distance": d,
                "side": "lower" if not lower_ok else "upper",
                "terms": terms,
            })
    return rep


@dataclass
class EstimateReport:
    """Path-estimate outcome: word distance vs thresholded sums."""

    K: int
    L: int
    R: int
    checked: int
    skipped: int
    violations: list = field(default_factory=list)
    min_margin: int | None = None
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.violations

    def to_dict(self) -> dict:
        return {
            "K": self.K, "L": self.L, "R": self.R,
            "checked": self.checked, "skipped": self.skipped,
            "violations": self.violations,
            "min_margin": self.min_margin,
            "passed": self.passed,
        }


def verify_main_estimate(p, axes, fam: ProjectionFamily, cfg: EstimateConfig,
                         pairs, colors=None) -> EstimateReport:
    """Check d(x, y) <= 2 * sum of thresholded widths + L + 2R over pairs.

    The sum runs over the materialized family, which only underestimates
    the full system's sum, so a pass here certifies the inequality.  Pairs
    lacking a witness axis within R in some color class are skipped with a
    count; with whole-orbit classes the line through the point itself is a
    distance-zero witness, so nothing is skipped.
    """
    rep = EstimateReport(K=cfg.K, L=cfg.L, R=cfg.R, checked=0, skipped=0)
    split_classes = []
    if colors is not None:
        split_classes = [i for i, whole in enumerate(colors.whole_orbit) if not whole]
    for (x, y) in pairs:
        if split_classes and not _split_witness_ok(fam, colors, split_classes, x, y, cfg.R):
            rep.skipped += 1
            continue
        lhs = p.distance(x, y)
        total = 0
        for gi in range(len(fam)):
            total += threshold(fam.point_width(gi, x, y), cfg.K)
        rhs = 2 * total + cfg.L + 2 * cfg.R
        margin = rhs - lhs
        rep.checked += 1
        rep.min_margin = margin if rep.min_margin is None else min(rep.min_margin, margin)
        rep.rows.append({"x": x or "1", "y": y or "1", "lhs": lhs, "sum": total,
                         "rhs": rhs})
        if lhs > rhs:
            rep.violations.append({"x": x or "1", "y": y or "1",
                                   "lhs": lhs, "rhs": rhs, "sum": total})
    return rep


def _split_witness_ok(fam, colors, split_classes, x, y, R) -> bool:
    """A split class needs a materialized member within R of each endpoint."""
    for ci in split_classes:
        for word in (x, y):
            ok = False
            for label in colors.classes[ci]:
                mi = fam.index_of(label)
                if _member_distance_to(fam, mi, word) <= R:
                    ok = True
                    break
            if not ok:
                return False
    return True


def _member_distance_to(fam, mi, word) -> int:
    ax = fam.axes[mi]
    if fam.presentation.cls == "free":
        return ax.distance_to_word(word)
    row = fam.ball.graph.distances_from(word)
    idx = fam.ball.graph.index
    dists = [row[idx[ax.point(t)]] for t in fam.member_params[mi]]
    finite = [d for d in dists if d >= 0]
    return min(finite) if finite else len(word) + 1
