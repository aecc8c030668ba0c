"""Words, presentations, and Cayley-ball truncations.

Group elements are plain strings over a one-letter-per-generator alphabet,
with the uppercase letter standing for the inverse (``A`` is the inverse of
``a``).  Two presentation classes are supported: free groups, and metric
small-cancellation presentations where every relator piece is shorter than
one sixth of the relator (checked at load).  For both classes ``reduce``
returns the shortlex-least geodesic word for an element, so word length is
the exact distance from the identity in the Cayley graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import MetricGraph

BALL_CAP = 2_000_000
_CLOSURE_CAP = 65536


def invert_word(word: str) -> str:
    """Inverse of a word: reverse it and swap the case of every letter."""
    return word[::-1].swapcase()


def free_reduce(word: str) -> str:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[str] = []
    for ch in word:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def _cyclic_rotations(word: str) -> list[str]:
    return [word[k:] + word[:k] for k in range(len(word))]


def _common_prefix_len(u: str, v: str) -> int:
    n = min(len(u), len(v))
    for i in range(n):
        if u[i] != v[i]:
            return i
    return n


@dataclass(frozen=True)
class Presentation:
    """A group presentation plus the rewriting tables derived from it.

    ``cls`` is ``"free"`` when there are no relators and ``"dehn"`` when the
    relators pass the small-cancellation piece check.  Anything in between is
    rejected at construction time.
    """

    generators: tuple[str, ...]
    relators: tuple[str, ...] = ()
    cls: str = field(init=False, default="free")
    alphabet: tuple[str, ...] = field(init=False, default=())

    def __post_init__(self) -> None:
        if not self.generators:
            raise ValueError("presentation needs at least one generator")
        for g in self.generators:
            if len(g) != 1 or not g.isalpha() or not g.islower():
                raise ValueError(f"generator must be a single lowercase letter, got {g!r}")
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("duplicate generator")
        alphabet = []
        for g in self.generators:
            alphabet.append(g)
            alphabet.append(g.upper())
        object.__setattr__(self, "alphabet", tuple(alphabet))
        object.__setattr__(self, "_rank", {ch: i for i, ch in enumerate(alphabet)})
        relators = tuple(self.relators)
        for r in relators:
            self.validate_word(r)
            if free_reduce(r) != r:
                raise ValueError(f"relator {r!r} is not freely reduced")
            if not r or (len(r) > 1 and r[0] == r[-1].swapcase()):
                raise ValueError(f"relator {r!r} is not cyclically reduced")
        object.__setattr__(self, "cls", "dehn" if relators else "free")
        object.__setattr__(self, "_nf_cache", {})
        if relators:
            self._build_rewrite_tables()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def free(cls, generators) -> "Presentation":
        return cls(tuple(generators))

    @classmethod
    def from_text(cls, text: str) -> "Presentation":
        """Parse the ``gens:``/``rel:`` file format."""
        gens: tuple[str, ...] | None = None
        rels: list[str] = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("gens:"):
                if gens is not None:
                    raise ValueError("duplicate gens: line")
                gens = tuple(line[len("gens:"):].split())
            elif line.startswith("rel:"):
                rels.append(line[len("rel:"):].strip())
            else:
                raise ValueError(f"unrecognized line {line!r}")
        if gens is None:
            raise ValueError("missing gens: line")
        return cls(gens, tuple(rels))

    @classmethod
    def from_file(cls, path) -> "Presentation":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.generators)]
        lines.extend("rel: " + r for r in self.relators)
        return "\n".join(lines) + "\n"

    def _build_rewrite_tables(self) -> None:
        symmetrized: set[str] = set()
        for r in self.relators:
            for w in (r, invert_word(r)):
                symmetrized.update(_cyclic_rotations(w))
        symm = sorted(symmetrized)
        max_piece = 0
        for i, r1 in enumerate(symm):
            for r2 in symm[i + 1:]:
                max_piece = max(max_piece, _common_prefix_len(r1, r2))
        min_len = min(len(r) for r in self.relators)
        if max_piece * 6 >= min_len:
            raise ValueError(
                f"presentation is not C'(1/6): piece of length {max_piece} "
                f"against relator length {min_len}"
            )
        long_rules: dict[str, str] = {}
        half_rules: dict[str, str] = {}
        for r in symm:
            n = len(r)
            for k in range(n // 2 + 1, n + 1):
                long_rules[r[:k]] = invert_word(r[k:])
            if n % 2 == 0:
                half_rules[r[: n // 2]] = invert_word(r[n // 2:])
        object.__setattr__(self, "_long_rules", long_rules)
        object.__setattr__(self, "_half_rules", half_rules)
        object.__setattr__(
            self, "_long_lengths", sorted({len(k) for k in long_rules}, reverse=True)
        )
        object.__setattr__(self, "_half_lengths", sorted({len(k) for k in half_rules}))

    # -- word utilities -------------------------------------------------------

    def validate_word(self, word: str) -> None:
        for ch in word:
            if ch not in self._rank:
                raise ValueError(f"unknown letter {ch!r} for this presentation")

    def shortlex_key(self, word: str):
        rank = self._rank
        return (len(word), tuple(rank[ch] for ch in word))

    def sort_words(self, words) -> list[str]:
        return sorted(words, key=self.shortlex_key)

    def _shorten_once(self, word: str) -> str | None:
        rules = self._long_rules
        for ln in self._long_lengths:
            if ln > len(word):
                continue
            for i in range(len(word) - ln + 1):
                rep = rules.get(word[i:i + ln])
                if rep is not None:
                    return word[:i] + rep + word[i + ln:]
        return None

    def reduce(self, word: str) -> str:
        """Shortlex-least geodesic representative of the element of ``word``."""
        word = free_reduce(word)
        if self.cls == "free":
            return word
        cache = self._nf_cache
        hit = cache.get(word)
        if hit is not None:
            return hit
        orig = word
        while True:
            # shorten while any window covers more than half a defining cycle
            while True:
                shorter = self._shorten_once(word)
                if shorter is None:
                    break
                word = free_reduce(shorter)
            # explore every equal-length rewrite; restart if one cancels down
            seen = {word}
            stack = [word]
            restart = None
            while stack and restart is None:
                u = stack.pop()
                for ln in self._half_lengths:
                    if ln > len(u):
                        continue
                    for i in range(len(u) - ln + 1):
                        rep = self._half_rules.get(u[i:i + ln])
                        if rep is None:
                            continue
                        v = free_reduce(u[:i] + rep + u[i + ln:])
                        if len(v) < len(u):
                            restart = v
                            break
                        if v not in seen:
                            seen.add(v)
                            stack.append(v)
                            if len(seen) > _CLOSURE_CAP:
                                raise RuntimeError("rewrite closure exploded")
                    if restart is not None:
                        break
            if restart is None:
                best = min(seen, key=self.shortlex_key)
                cache[orig] = best
                cache[best] = best
                return best
            word = restart

    def is_identity(self, word: str) -> bool:
        """Word problem by plain shortening, independent of ``reduce``.

        A nontrivial freely reduced word over a sixth-cancellation
        presentation always exposes a window longer than half a defining
        cycle, so shortening alone decides triviality.
        """
        w = free_reduce(word)
        if self.cls == "free":
            return not w
        while w:
            shorter = self._shorten_once(w)
            if shorter is None:
                return False
            w = free_reduce(shorter)
        return True

    def equal(self, u: str, v: str) -> bool:
        return self.is_identity(invert_word(v) + u)

    def multiply(self, *words: str) -> str:
        return self.reduce("".join(words))

    def word_length(self, word: str) -> int:
        return len(self.reduce(word))

    def distance(self, u: str, v: str) -> int:
        """Word-metric distance between two elements."""
        return len(self.reduce(invert_word(u) + v))


# -- Cayley balls -------------------------------------------------------------


@dataclass(frozen=True)
class CayleyBall:
    """All elements of word length at most ``radius``, as a unit-edge graph.

    Vertices are shortlex normal forms ordered shortlex, so every geodesic
    tie-break downstream is reproducible.  The identity is the empty word.
    """

    presentation: Presentation
    radius: int
    graph: MetricGraph

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices

    def __contains__(self, word: str) -> bool:
        return word in self.graph

    def sphere(self, k: int) -> list[str]:
        return [v for v in self.vertices if len(v) == k]

    def act(self, h: str, v: str) -> str:
        """Left multiplication by ``h``; an isometry of the full Cayley graph."""
        return self.presentation.reduce(h + v)

    def distance(self, u: str, v: str) -> int:
        return self.presentation.distance(u, v)


def cayley_ball(p: Presentation, radius: int, cap: int = BALL_CAP) -> CayleyBall:
    """Breadth-first truncation of the Cayley graph at the given radius."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    free = p.cls == "free"
    known: set[str] = {""}
    layer = [""]
    while layer:
        nxt: set[str] = set()
        for w in layer:
            for x in p.alphabet:
                if free:
                    v = w[:-1] if w and w[-1] == x.swapcase() else w + x
                else:
                    v = p.reduce(w + x)
                if len(v) <= radius and v not in known:
                    nxt.add(v)
        if len(known) + len(nxt) > cap:
            raise ValueError(f"ball too large: over {cap} vertices at radius {radius}")
        known.update(nxt)
        layer = p.sort_words(nxt)
    vertices = p.sort_words(known)
    adjacency = {}
    for w in vertices:
        nbrs = set()
        for x in p.alphabet:
            if free:
                v = w[:-1] if w and w[-1] == x.swapcase() else w + x
            else:
                v = p.reduce(w + x)
            if v in known and v != w:
                nbrs.add(v)
        adjacency[w] = nbrs
    return CayleyBall(p, radius, MetricGraph(adjacency, order=vertices))


def iter_ball_words(p: Presentation, radius: int):
    """Yield all normal forms of length <= radius in shortlex-layer order.

    Unlike cayley_ball this builds no graph, so it stays cheap at radii where
    the vertex count runs into the millions.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    yield ""
    if p.cls == "free":
        layer = [""]
        for _ in range(radius):
            nxt = []
            for w in layer:
                last = w[-1].swapcase() if w else None
                for x in p.alphabet:
                    if x != last:
                        nxt.append(w + x)
            yield from nxt
            layer = nxt
    else:
        known = {""}
        layer = [""]
        for _ in range(radius):
            nxt = set()
            for w in layer:
                for x in p.alphabet:
                    v = p.reduce(w + x)
                    if v not in known and len(v) > len(w):
                        nxt.add(v)
            known.update(nxt)
            layer = p.sort_words(nxt)
            yield from layer


# -- conjugacy and primitivity ------------------------------------------------


def cyclic_reduce(p: Presentation, word: str) -> tuple[str, str]:
    """Return ``(core, conjugator)`` with ``word = conjugator core conjugator^-1``."""
    w = p.reduce(word)
    conj: list[str] = []
    while len(w) > 1 and w[0] == w[-1].swapcase():
        conj.append(w[0])
        w = p.reduce(w[1:-1])
    return w, "".join(conj)


def _conjugacy_states(p: Presentation, word: str):
    """All (representative, conjugator, inverted) states reachable by rotation,
    inversion and rewriting.  ``word = conjugator * rep^(+/-1) * conjugator^-1``."""
    start, c0 = cyclic_reduce(p, word)
    if not start:
        raise ValueError("no axis for identity")
    states: dict[tuple[str, bool], str] = {}
    stack: list[tuple[str, str, bool]] = [
        (start, c0, False),
        (p.reduce(invert_word(start)), c0, True),
    ]
    while stack:
        w, c, inv = stack.pop()
        w2, extra = cyclic_reduce(p, w)
        c = p.reduce(c + extra) if extra else c
        w = w2
        key = (w, inv)
        if key in states:
            continue
        states[key] = c
        if len(w) > 1:
            rotated = p.reduce(w[1:] + w[0])
            stack.append((rotated, p.reduce(c + w[0]), inv))
    return states


def conjugacy_representative(p: Presentation, word: str) -> str:
    """Canonical word for the conjugacy class of ``word``, inversion folded in."""
    states = _conjugacy_states(p, word)
    return min((w for w, _ in states), key=p.shortlex_key)


def conjugacy_witness(p: Presentation, word: str) -> tuple[str, str, bool]:
    """Canonical representative plus a conjugator realizing it.

    Returns ``(rep, sigma, inverted)`` with
    ``word = sigma * rep^(-1 if inverted else 1) * sigma^-1``.
    """
    states = _conjugacy_states(p, word)
    rep = min((w for w, _ in states), key=p.shortlex_key)
    for inv in (False, True):
        if (rep, inv) in states:
            return rep, states[(rep, inv)], inv
    raise AssertionError("conjugacy closure lost its own representative")


def is_primitive(p: Presentation, word: str) -> bool:
    """Whether the element is not a proper power.

    Exact for free groups; for small-cancellation presentations the period
    test is backed by a search for short roots over a ball of half the word
    length, which is exhaustive at the word lengths this library handles.
    """
    w, _ = cyclic_reduce(p, word)
    if not w:
        raise ValueError("identity word has no primitive root")
    n = len(w)
    for d in range(1, n):
        if n % d == 0 and w == w[:d] * (n // d):
            return False
    if p.cls == "dehn":
        target = p.reduce(word)
        ball = cayley_ball(p, max(1, len(w) // 2))
        for h in ball.vertices:
            if not h:
                continue
            acc = h
            for _ in range(2, n + 2):
                acc = p.reduce(acc + h)
                if len(acc) > len(target):
                    break
                if acc == target and p.reduce(h) != target:
                    return False
    return True
