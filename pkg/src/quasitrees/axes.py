"""Translation axes of loxodromic elements and their translates.

The axis of a nontrivial, indivisible element is built from its conjugacy
class: pick the canonical cyclically reduced representative ``u``, take the
bi-infinite path whose vertex at integer parameter ``t`` is the length-``t``
prefix of the periodic word ``...uuu...``, and translate the whole picture
by the conjugating element.  For a cyclically reduced input this is exactly
the union of its powers applied to a geodesic from the identity to it, and
axes of an element and of its inverse coincide as vertex sets.

Two translates are identified when they agree as vertex sets, which for the
supported presentation classes happens exactly when the translators lie in
one coset of the cyclic group generated by ``u``.  Parameters along an axis
are the intrinsic coordinates of the periodic path: for free groups the path
is a geodesic line so parameter gaps equal graph distance, and for the
small-cancellation class it is a uniform quasi-geodesic whose parameter gap
is the axis-internal metric used everywhere downstream.

For free groups, nearest-point projections onto axes reduce to longest
common prefix computations against the periodic words of the line, which is
both exact and fast; no ball is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import (
    Presentation,
    conjugacy_witness,
    cyclic_reduce,
    invert_word,
    is_primitive,
    iter_ball_words,
)

_PAD = 16


def _power(word: str, n: int) -> str:
    return word * n if n >= 0 else invert_word(word) * (-n)


def free_cancel_concat(u: str, v: str) -> str:
    """Reduced form of uv for already reduced u, v (free cancellation only)."""
    i = len(u)
    j = 0
    while i > 0 and j < len(v) and u[i - 1] == v[j].swapcase():
        i -= 1
        j += 1
    return u[:i] + v[j:]


def _lcp_periodic(x: str, u: str) -> int:
    """Length of the longest common prefix of x with the infinite word uuu..."""
    n = len(u)
    for i, ch in enumerate(x):
        if ch != u[i % n]:
            return i
    return len(x)


def canonical_coset_rep(p: Presentation, h: str, u: str) -> str:
    """Shortlex-least element of the coset ``h<u>``.

    The exponent window is wide enough that any shorter coset element would
    already appear in it; lengths grow linearly once the exponent leaves it.
    """
    h = p.reduce(h)
    if not u:
        raise ValueError("empty period word")
    span = 2 * (len(h) // len(u) + 2)
    best = h
    acc_pos = h
    acc_neg = h
    inv_u = invert_word(u)
    for _ in range(span):
        acc_pos = p.reduce(acc_pos + u)
        acc_neg = p.reduce(acc_neg + inv_u)
        for cand in (acc_pos, acc_neg):
            if p.shortlex_key(cand) < p.shortlex_key(best):
                best = cand
    return best


class Axis:
    """One translate of the canonical axis of a conjugacy class.

    ``rep`` is the canonical cyclically reduced period word and
    ``translator`` the canonical coset representative moving the base axis
    onto this translate.  Axis objects are equal iff they are equal as
    vertex sets.
    """

    __slots__ = ("presentation", "rep", "translator", "period")

    def __init__(self, presentation: Presentation, rep: str, translator: str = ""):
        self.presentation = presentation
        self.rep = rep
        self.translator = canonical_coset_rep(presentation, translator, rep)
        self.period = len(rep)

    @property
    def key(self) -> tuple[str, str]:
        return (self.rep, self.translator)

    def __eq__(self, other) -> bool:
        return isinstance(other, Axis) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Axis({self.rep!r} @ {self.translator or '1'})"

    def point(self, t: int) -> str:
        q, r = divmod(t, self.period)
        return self.presentation.reduce(self.translator + _power(self.rep, q) + self.rep[:r])

    def base_point(self, t: int) -> str:
        """Vertex at parameter t in base (translator-stripped) coordinates."""
        q, r = divmod(t, self.period)
        if q >= 0:
            return self.rep * q + self.rep[:r]
        return free_cancel_concat(_power(self.rep, q), self.rep[:r])

    def segment(self, lo: int, hi: int) -> list[str]:
        if lo > hi:
            raise ValueError("empty projection input")
        return [self.point(t) for t in range(lo, hi + 1)]

    def translate(self, h: str) -> "Axis":
        return Axis(self.presentation, self.rep, self.presentation.reduce(h + self.translator))

    def param_window(self, radius: int) -> range:
        """Parameter range guaranteed to cover every axis point within the
        given distance of the identity."""
        slack = radius + 2 * len(self.translator) + 2 * self.period + 2
        return range(-slack, slack + 1)

    def params_in_ball(self, ball) -> list[int]:
        """Sorted parameters whose points lie in the given Cayley ball."""
        return [t for t in self.param_window(ball.radius) if self.point(t) in ball]

    def materialize(self, ball) -> list[str]:
        """Axis vertices inside the ball, in parameter order."""
        return [self.point(t) for t in self.params_in_ball(ball)]

    def param_of(self, word: str) -> int | None:
        """Parameter of a vertex on this axis, or None if it is not on it."""
        p = self.presentation
        u = p.reduce(invert_word(self.translator) + p.reduce(word))
        if p.cls == "free":
            m_pos = _lcp_periodic(u, self.rep)
            if m_pos == len(u):
                return m_pos
            m_neg = _lcp_periodic(u, invert_word(self.rep))
            if m_neg == len(u):
                return -m_neg
            return None
        bound = len(u) + self.period + 2
        for t in range(-bound, bound + 1):
            if p.reduce(self.base_point(t)) == u:
                return t
        return None

    # -- tree projection algebra (free groups only) ---------------------------

    def _require_free(self):
        if self.presentation.cls != "free":
            raise ValueError("tree projection algebra needs a free presentation")

    def _project_base(self, x: str) -> int:
        """Parameter of the projection of a base-coordinate reduced word."""
        m_pos = _lcp_periodic(x, self.rep)
        if m_pos:
            return m_pos
        return -_lcp_periodic(x, invert_word(self.rep))

    def project_word_param(self, word: str) -> int:
        """Parameter of the nearest axis point to ``word`` (free groups)."""
        self._require_free()
        x = free_cancel_concat(invert_word(self.translator), self.presentation.reduce(word))
        return self._project_base(x)

    def distance_to_word(self, word: str) -> int:
        """Graph distance from a vertex to this axis (free groups)."""
        self._require_free()
        x = free_cancel_concat(invert_word(self.translator), self.presentation.reduce(word))
        t = self._project_base(x)
        return len(x) - abs(t)

    def project_axis_params(self, other: "Axis") -> tuple[int, int]:
        """Closed parameter interval of the nearest-point projection of
        another axis onto this one (free groups).

        The two ends of the other axis are eventually periodic words; each
        projects to the parameter where it stops following this axis.  The
        projection of the whole line is the interval between the two.
        """
        self._require_free()
        if self.key == other.key:
            raise ValueError("projection of an axis onto itself")
        w = free_cancel_concat(invert_word(self.translator), other.translator)
        return self._project_line(w, other.rep)

    def _project_line(self, w: str, v: str) -> tuple[int, int]:
        """Projection interval of the line with translator w and period v,
        both in base coordinates of this axis."""
        cap = len(w) + 2 * (self.period + len(v)) + _PAD
        ts = []
        for vv in (v, invert_word(v)):
            reps = cap // len(vv) + 2
            end = free_cancel_concat(w, vv * reps)[:cap]
            t = self._project_base(end)
            if abs(t) >= cap - len(w) - _PAD // 2:
                raise RuntimeError("axes share a ray; translates were not distinct")
            ts.append(t)
        return (min(ts), max(ts))


def build_axis(p: Presentation, word: str, ball=None) -> Axis:
    """Axis of a nontrivial indivisible element, canonicalized so that
    conjugate inputs yield translates of one base axis.

    The optional ball is only sanity-checked against the element length;
    materialization happens lazily through the Axis methods.
    """
    p.validate_word(word)
    reduced = p.reduce(word)
    if reduced == "":
        raise ValueError("no axis for identity")
    if not is_primitive(p, word):
        raise ValueError("axis requires indivisible element")
    if ball is not None and ball.radius < 2 * len(reduced):
        raise ValueError("ball too small to materialize this axis")
    rep, sigma, _ = conjugacy_witness(p, word)
    return Axis(p, rep, sigma)


@dataclass(frozen=True)
class AxisCollection:
    """Orbit representatives of an axis family, with translate enumeration."""

    presentation: Presentation
    axes: tuple[Axis, ...]
    tag: str = "all"

    def __post_init__(self):
        reps = [a.rep for a in self.axes]
        if len(set(reps)) != len(reps):
            raise ValueError("duplicate orbit representative in axis collection")

    def __len__(self) -> int:
        return len(self.axes)

    def reps(self) -> list[str]:
        return [a.rep for a in self.axes]

    def translates(self, translate_radius: int) -> list[Axis]:
        """All distinct translates h*axis with |h| <= translate_radius,
        shortlex-sorted by (rep, translator)."""
        p = self.presentation
        seen: dict[tuple[str, str], Axis] = {}
        for h in iter_ball_words(p, translate_radius):
            for base in self.axes:
                ax = Axis(p, base.rep, h)
                seen.setdefault(ax.key, ax)
        return [seen[k] for k in sorted(seen, key=lambda k: (p.shortlex_key(k[0]),
                                                             p.shortlex_key(k[1])))]


@dataclass(frozen=True)
class AxesConfig:
    """Constants for preferred-axis selection and witness search."""

    L: int = 3
    R: int = 1
    lam: float = 1.0
    c: float = 0.0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be at least 1")
        if self.R < 0:
            raise ValueError("R must be nonnegative")


def all_primitive_axes(p: Presentation, max_len: int) -> AxisCollection:
    """Axes of every primitive conjugacy class with a representative of
    length at most max_len."""
    from .groups import conjugacy_representative

    reps: set[str] = set()
    for w in iter_ball_words(p, max_len):
        if w:
            reps.add(conjugacy_representative(p, w))
    axes = []
    for rep in sorted(reps, key=p.shortlex_key):
        if is_primitive(p, rep):
            axes.append(Axis(p, rep))
    return AxisCollection(p, tuple(axes), tag="all")


def _line_subwords(rep: str, max_len: int) -> set[str]:
    """All words of length <= max_len read along the line of ``rep`` in
    either direction."""
    out: set[str] = set()
    for u in (rep, invert_word(rep)):
        reps = (max_len // len(u)) + 2
        stream = u * reps
        for ln in range(1, max_len + 1):
            for i in range(len(u)):
                out.add(stream[i:i + ln])
    return out


def select_preferred_axes(p: Presentation, candidates: AxisCollection,
                          cfg: AxesConfig) -> AxisCollection:
    """Greedy subcover: every word of length <= L readable along some
    candidate axis stays readable along a selected one.

    Candidates are taken in shortlex order of their representatives, and one
    is kept whenever it covers a word no earlier selection covers.
    """
    ordered = sorted(candidates.axes, key=lambda a: p.shortlex_key(a.rep))
    uncovered: set[str] = set()
    for ax in ordered:
        uncovered |= _line_subwords(ax.rep, cfg.L)
    selected = []
    for ax in ordered:
        mine = _line_subwords(ax.rep, cfg.L)
        if mine & uncovered:
            selected.append(ax)
            uncovered -= mine
    return AxisCollection(p, tuple(selected), tag="preferred")


def coverage_gaps(p: Presentation, collection: AxisCollection, L: int,
                  reference: AxisCollection | None = None) -> list[str]:
    """Words of length <= L the collection fails to cover.

    With a ``reference`` collection the scope is every word readable along a
    reference axis (the covering obligation of a preferred subfamily);
    otherwise it is all reduced words, a strictly wider diagnostic that is
    usually nonempty since not every word is readable along a periodic line.
    """
    covered: set[str] = set()
    for ax in collection.axes:
        covered |= _line_subwords(ax.rep, L)
    if reference is not None:
        scope: set[str] = set()
        for ax in reference.axes:
            scope |= _line_subwords(ax.rep, L)
        return sorted(scope - covered, key=p.shortlex_key)
    return [w for w in iter_ball_words(p, L) if w and w not in covered]


def double_coset_scan(axis: Axis, ball_or_radius, theta: int):
    """Translates of an axis whose projection onto it is wider than theta,
    grouped by double coset of the axis stabilizer.

    Returns a sorted list of (coset_key, diam) with one entry per double
    coset; coset_key is the shortlex-least element of the double coset seen
    in the scan.  For free groups the projection width is computed by the
    exact word formula, so no materialization is skipped; for the
    small-cancellation class a ball is required and translates that miss it
    are skipped.
    """
    p = axis.presentation
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    u = axis.rep
    if isinstance(ball_or_radius, int):
        if p.cls != "free":
            raise ValueError("graph-free scan needs a free presentation")
        words = iter_ball_words(p, ball_or_radius)
    else:
        words = ball_or_radius.vertices
    hits: dict[str, int] = {}
    if p.cls == "free":
        inv_u = invert_word(u)
        inv_tr = invert_word(axis.translator)
        for h in words:
            w = free_cancel_concat(inv_tr, h)
            if _is_power_of(w, u, inv_u):
                continue
            lo, hi = axis._project_line(w, u)
            diam = hi - lo
            if diam > theta:
                key = _double_coset_key(p, w, u)
                prev = hits.get(key)
                if prev is None:
                    hits[key] = diam
                elif prev != diam:
                    raise AssertionError("projection width not constant on a double coset")
    else:
        from .graphs import bfs_rows

        ball = ball_or_radius
        params_list = axis.params_in_ball(ball)
        if not params_list:
            raise ValueError("empty projection input")
        base_order = [(axis.point(t), t) for t in params_list]
        rows = bfs_rows(ball.graph, [ball.graph.index[w] for w, _ in base_order])
        seen_keys: set[tuple[str, str]] = set()
        for h in words:
            tr = Axis(p, u, p.reduce(h + axis.translator))
            if tr == axis or tr.key in seen_keys:
                continue
            seen_keys.add(tr.key)
            pts = tr.materialize(ball)
            if not pts:
                continue
            params = set()
            for q in pts:
                col = rows[:, ball.graph.index[q]]
                best = min(d for d in col if d >= 0)
                params.update(t for (_, t), d in zip(base_order, col)
                              if d == best)
            diam = max(params) - min(params)
            if diam > theta:
                key = _double_coset_key(p, h, u)
                hits[key] = max(hits.get(key, 0), diam)
    return sorted(hits.items(), key=lambda kv: p.shortlex_key(kv[0]))


def _is_power_of(h: str, u: str, inv_u: str) -> bool:
    if not h:
        return True
    if len(h) % len(u):
        return False
    k = len(h) // len(u)
    return h == u * k or h == inv_u * k


def _double_coset_key(p: Presentation, h: str, u: str) -> str:
    """Shortlex-least element of <u> h <u> within a safe exponent window."""
    span = 2 * (len(h) // len(u) + 1) + 1
    best = p.reduce(h)
    inv_u = invert_word(u)
    for a in range(-span, span + 1):
        core = p.reduce(_power(u, a) + h)
        acc_pos = core
        acc_neg = core
        if p.shortlex_key(core) < p.shortlex_key(best):
            best = core
        for _ in range(span):
            acc_pos = p.reduce(acc_pos + u)
            acc_neg = p.reduce(acc_neg + inv_u)
            for cand in (acc_pos, acc_neg):
                if p.shortlex_key(cand) < p.shortlex_key(best):
                    best = cand
    return best


def witness_axis(x: str, y: str, candidates: AxisCollection, cfg: AxesConfig,
                 ball) -> tuple[Axis, int]:
    """A translate of a candidate axis passing within R of both points.

    Scans R = 0, 1, ... up to the configured bound and returns the first
    (axis, R) found, so the reported R is minimal for the deterministic scan
    order (near-point, then representative, then phase).
    """
    p = candidates.presentation
    x = p.reduce(x)
    y = p.reduce(y)
    free = p.cls == "free"
    if not free:
        if x not in ball or y not in ball:
            raise ValueError("vertex not in graph")
        dist_x = ball.graph.distances_from(x)
        dist_y = ball.graph.distances_from(y)
        mat_cache: dict[tuple[str, str], list[str]] = {}
    for r_try in range(cfg.R + 1):
        if free:
            near = _free_ball_around(p, x, r_try)
        else:
            near = [v for v in ball.vertices if dist_x[ball.graph.index[v]] <= r_try]
        for q in near:
            for base in candidates.axes:
                u = base.rep
                for t in range(len(u)):
                    sigma = p.reduce(q + invert_word(base.base_point(t)))
                    cand = Axis(p, u, sigma)
                    if free:
                        if cand.distance_to_word(y) <= r_try:
                            return cand, r_try
                    else:
                        pts = mat_cache.get(cand.key)
                        if pts is None:
                            pts = cand.materialize(ball)
                            mat_cache[cand.key] = pts
                        if pts and min(dist_y[ball.graph.index[w]] for w in pts) <= r_try:
                            return cand, r_try
    raise ValueError("witness not found at this truncation")


def _free_ball_around(p: Presentation, center: str, radius: int) -> list[str]:
    seen = {center}
    layer = [center]
    for _ in range(radius):
        nxt = []
        for w in layer:
            for a in p.alphabet:
                v = w[:-1] if w and w[-1] == a.swapcase() else w + a
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        layer = nxt
    return sorted(seen, key=p.shortlex_key)
