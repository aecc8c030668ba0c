"""Coloring, the l1 product of class complexes, orbit maps, certification.

The family is partitioned into classes whose internal projections are all
at most theta wide.  Whole orbits (all translates of one representative)
get one color when they are internally conflict-free, since downstream
sums range over entire orbits; a conflicted orbit is split per translate
with a warning.  Each class yields one projection-complex factor, the
product carries the sum metric, and the group moves basepoint tuples
around by translating every coordinate.

Certification walks every ball element h and checks the two-sided bound:
an eighth of |h| minus the additive offset below the product distance,
and the generator maximum times |h| above it.  Where h keeps all
coordinates inside the truncation the distance is the exact graph value;
elsewhere the reported figure is a certified lower bound assembled from
thresholded projection sums (complete for free groups by the long-subword
index) and the fact that a nontrivial element moves every coordinate.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field

from .axes import Axis, AxisCollection, free_cancel_concat
from .groups import Presentation, invert_word
from .projections import ProjectionFamily, threshold


@dataclass(frozen=True)
class ColorClasses:
    """Partition of family labels into bounded-projection classes."""

    theta: int
    classes: tuple
    whole_orbit: tuple
    split_reps: tuple = ()

    @property
    def m(self) -> int:
        return len(self.classes)

    def class_of(self, label: str) -> int:
        for i, cls in enumerate(self.classes):
            if label in cls:
                return i
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "m": self.m,
            "classes": [list(c) for c in self.classes],
            "whole_orbit": list(self.whole_orbit),
            "split_reps": list(self.split_reps),
        }


def _conflict(D, a: int, b: int, theta: int) -> bool:
    return int(D[a, b, b]) > theta or int(D[b, a, a]) > theta


def greedy_color(axes, fam: ProjectionFamily, theta: int) -> ColorClasses:
    """Greedy coloring of the conflict graph, one orbit at a time.

    Orbits are processed in shortlex order of their representatives and
    assigned the least color free of conflicts; an internally conflicted
    orbit is split into singletons with a warning.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    p = fam.presentation
    D = fam.D()
    by_rep: dict = {}
    for i, ax in enumerate(fam.axes):
        by_rep.setdefault(ax.rep, []).append(i)
    order = sorted(by_rep, key=p.shortlex_key)
    color_members: list = []
    color_whole: list = []
    split_reps = []
    for rep in order:
        orbit = sorted(by_rep[rep],
                       key=lambda i: p.shortlex_key(fam.axes[i].translator))
        conflicted = any(_conflict(D, a, b, theta)
                         for k, a in enumerate(orbit) for b in orbit[k + 1:])
        units = [orbit]
        if conflicted:
            warnings.warn(f"orbit of {rep} internally conflicted at theta={theta}; split")
            split_reps.append(rep)
            units = [[i] for i in orbit]
        for unit in units:
            placed = False
            for c, members in enumerate(color_members):
                if conflicted == (not color_whole[c]) and not any(
                        _conflict(D, a, b, theta) for a in unit for b in members):
                    members.extend(unit)
                    placed = True
                    break
            if not placed:
                color_members.append(list(unit))
                color_whole.append(not conflicted)
    classes = tuple(tuple(fam.labels[i] for i in members)
                    for members in color_members)
    return ColorClasses(theta=theta, classes=classes,
                        whole_orbit=tuple(color_whole),
                        split_reps=tuple(split_reps))


def verify_coloring(fam: ProjectionFamily, colors: ColorClasses):
    """Exhaustive within-class width check; returns (ok, worst_width)."""
    D = fam.D()
    worst = 0
    for cls in colors.classes:
        idx = [fam.index_of(l) for l in cls]
        for k, a in enumerate(idx):
            for b in idx[k + 1:]:
                worst = max(worst, int(D[a, b, b]), int(D[b, a, a]))
    return worst <= colors.theta, worst


class ProductSpace:
    """Finite product of class complexes with the sum metric."""

    def __init__(self, factors, colors: ColorClasses):
        if len(factors) != colors.m:
            raise ValueError("one factor per color class required")
        self.factors = tuple(factors)
        self.colors = colors

    def __len__(self) -> int:
        return len(self.factors)

    def product_distance(self, a: "BasepointTuple", b: "BasepointTuple") -> int:
        total = 0
        for i, (factor, u, v) in enumerate(zip(self.factors, a.coords, b.coords)):
            try:
                total += factor.graph.distance(u, v)
            except ValueError as exc:
                raise ValueError(f"factor {i} disconnected: {exc}") from exc
        return total


@dataclass(frozen=True)
class BasepointTuple:
    """One vertex per factor, each a (member, parameter) pair."""

    coords: tuple

    def __len__(self) -> int:
        return len(self.coords)


def default_basepoint(sp: ProductSpace) -> BasepointTuple:
    """Deterministic basepoint: least member of each factor at the
    parameter closest to the identity."""
    coords = []
    for factor in sp.factors:
        fam = factor.fam
        p = fam.presentation
        mi = min(range(len(fam)),
                 key=lambda i: (len(fam.axes[i].translator),
                                p.shortlex_key(fam.axes[i].translator),
                                p.shortlex_key(fam.axes[i].rep)))
        window = fam.member_params[mi]
        t = min(window, key=lambda s: (abs(s), s))
        coords.append((mi, t))
    return BasepointTuple(tuple(coords))


def orbit_map(h: str, x_hat: BasepointTuple, sp: ProductSpace) -> BasepointTuple:
    """Translate every coordinate by h; error if any leaves the truncation."""
    coords = []
    for factor, (mi, t) in zip(sp.factors, x_hat.coords):
        fam = factor.fam
        p = fam.presentation
        ax = fam.axes[mi]
        moved = ax.translate(h)
        label = f"{moved.rep}@{moved.translator or '1'}"
        try:
            mj = fam.index_of(label)
        except KeyError:
            raise ValueError("enlarge ball") from None
        word = p.reduce(h + ax.point(t))
        s = fam.axes[mj].param_of(word)
        if s is None or s not in set(fam.member_params[mj]):
            raise ValueError("enlarge ball")
        coords.append((mj, s))
    return BasepointTuple(tuple(coords))


class _LineIndex:
    """Length-K windows of each representative line, for finding every axis
    translate that shares a K-long subsegment with a given geodesic."""

    def __init__(self, p: Presentation, reps, K: int):
        self.p = p
        self.K = K
        self.table: dict = {}
        for u in reps:
            for pat in (u, invert_word(u)):
                stream = pat * (K // len(pat) + 2)
                for phase in range(len(pat)):
                    window = stream[phase:phase + K]
                    self.table.setdefault(window, []).append((u, pat[:phase]))

    def axes_meeting(self, v: str, w: str) -> list:
        """Axes whose projection width for (v, w) can reach K (free groups)."""
        g = free_cancel_concat(invert_word(v), w)
        found: dict = {}
        for j in range(len(g) - self.K + 1):
            for (u, back) in self.table.get(g[j:j + self.K], ()):
                start = free_cancel_concat(v, g[:j])
                tau = free_cancel_concat(start, invert_word(back))
                ax = Axis(self.p, u, tau)
                found.setdefault(ax.key, ax)
        return list(found.values())


@dataclass
class EmbeddingReport:
    """Per-element distances and the two-sided bound outcome."""

    c_up: int
    K: int
    L: int
    R: int
    m: int
    theta: int
    xi: int
    rows: list = field(default_factory=list)
    lower_violations: list = field(default_factory=list)
    upper_violations: list = field(default_factory=list)
    exact_rows: int = 0
    min_ratio: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.lower_violations and not self.upper_violations

    def to_dict(self) -> dict:
        return {
            "c_up": self.c_up, "K": self.K, "L": self.L, "R": self.R,
            "m": self.m, "theta": self.theta, "xi": self.xi,
            "rows": len(self.rows), "exact_rows": self.exact_rows,
            "lower_violations": self.lower_violations,
            "upper_violations": self.upper_violations,
            "min_ratio": round(self.min_ratio, 6),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class CertifyConfig:
    K: int
    L: int
    R: int
    xi: int = 0


def qi_certify(p: Presentation, sp: ProductSpace, x_hat: BasepointTuple,
               ball, cfg: CertifyConfig) -> EmbeddingReport:
    """Two-sided orbit bound over every element of the ball.

    Exact product distances are used while h keeps every coordinate inside
    the truncated factors; beyond that the lower side is certified by
    2*sum >= |h| - L - 2R per factor (eight times the quarter-sums) plus
    the one-step floor, and the upper side by the generator chain.
    """
    c_up = 0
    for g in p.alphabet:
        c_up = max(c_up, sp.product_distance(x_hat, orbit_map(g, x_hat, sp)))
    report = EmbeddingReport(c_up=c_up, K=cfg.K, L=cfg.L, R=cfg.R,
                             m=sp.colors.m, theta=sp.colors.theta, xi=cfg.xi)
    base_words = []
    class_reps: dict = {}
    for i, factor in enumerate(sp.factors):
        mi, t = x_hat.coords[i]
        base_words.append(factor.fam.axes[mi].point(t))
        if sp.colors.whole_orbit[i]:
            for label in sp.colors.classes[i]:
                class_reps.setdefault(factor.fam.axes[factor.fam.index_of(label)].rep, i)
    index = None
    if p.cls == "free" and class_reps:
        index = _LineIndex(p, sorted(class_reps, key=p.shortlex_key), cfg.K)
    offset = cfg.L + 2 * cfg.R
    min_ratio = None
    for h in ball.vertices:
        hlen = len(h)
        if not h:
            report.rows.append({"h": "1", "len": 0, "dist": 0})
            report.exact_rows += 1
            continue
        exact = True
        try:
            moved = orbit_map(h, x_hat, sp)
            dist: float = sp.product_distance(x_hat, moved)
            lower_8x = 8 * dist
        except ValueError:
            exact = False
            sums = _factor_sums(p, sp, index, class_reps, base_words, h,
                                cfg.K, ball)
            lower_8x = sum(max(2 * s, 8) for s in sums)
            dist = sum(max(s / 4.0, 1.0) for s in sums)
        report.rows.append({"h": h, "len": hlen, "dist": dist})
        if exact:
            report.exact_rows += 1
        if hlen - offset > lower_8x:
            report.lower_violations.append({"h": h, "len": hlen, "dist": dist})
        if dist > c_up * hlen:
            report.upper_violations.append({"h": h, "len": hlen, "dist": dist})
        ratio = dist / (hlen + 1)
        min_ratio = ratio if min_ratio is None else min(min_ratio, ratio)
    report.min_ratio = 0.0 if min_ratio is None else min_ratio
    return report


def _factor_sums(p, sp, index, class_reps, base_words, h, K, ball):
    """Per-class thresholded projection sums for the pair (x_i, h x_i)."""
    sums = [0] * sp.colors.m
    if index is not None:
        for i, v in enumerate(base_words):
            if not sp.colors.whole_orbit[i]:
                continue
            w = free_cancel_concat(h, v)
            for ax in index.axes_meeting(v, w):
                if class_reps.get(ax.rep) != i:
                    continue
                width = abs(ax.project_word_param(v) - ax.project_word_param(w))
                sums[i] += threshold(width, K)
        return sums
    for i, factor in enumerate(sp.factors):
        fam = factor.fam
        v = base_words[i]
        w = p.reduce(h + v)
        if fam.ball is not None and (v not in fam.ball or w not in fam.ball):
            continue
        for gi in range(len(fam)):
            sums[i] += threshold(fam.point_width(gi, v, w), K)
    return sums
