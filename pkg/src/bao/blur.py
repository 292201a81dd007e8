"""Blurs of finite relation algebras and the split structure they induce.

Atoms of the split structure are ``Id`` and triples ``(i, P, W)`` with ``i`` a
natural number, ``P`` a diversity atom of the base algebra and ``W`` a blur
containing ``P``. The block of ``W`` is the set of all ``(i, P, W)``.

Elements of the term algebra meet every block in a finite or cofinite set.
:class:`SplitElement` stores one *line* per ``(W, P)``: the indices ``i`` with
``(i, P, W)`` in the element, kept as a finite set or as a cofinite set given
by its exclusions. Composition is exact over all naturals.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .core import InvalidInput
from .relalg import RAAtomStructure, mat_n

IndexBlur = Callable[[int, int, int], bool]


def index_blur(i: int, j: int, k: int) -> bool:
    """Whether some ordering ``p, q, r`` of the three indices has ``r - q == q - p``."""
    lo, mid, hi = sorted((i, j, k))
    return 2 * mid == lo + hi


def ap_partners(j: int, k: int) -> list[int]:
    """All naturals ``i`` with ``index_blur(i, j, k)``; never more than three."""
    out = {2 * j - k, 2 * k - j}
    if (j + k) % 2 == 0:
        out.add((j + k) // 2)
    return sorted(i for i in out if i >= 0)


def block_key(w: Iterable[str]) -> str:
    return "+".join(sorted(w))


# ---------------------------------------------------------------------------
# blur conditions


SAFE_READINGS = ("contains", "below")


@dataclass(frozen=True)
class BlurSpec:
    """A complex blur ``blurs`` and an index blur ``index``.

    ``safe_reading`` picks the meaning of safe(V, W, T): ``"contains"`` asks
    ``t <= v;w`` for all ``v in V, w in W, t in T``; ``"below"`` asks
    ``v;w <= t`` instead.
    """

    blurs: tuple[frozenset[str], ...]
    index: IndexBlur = index_blur
    safe_reading: str = "contains"

    def __post_init__(self):
        if self.safe_reading not in SAFE_READINGS:
            raise InvalidInput(f"unknown safe reading {self.safe_reading!r}")

    @classmethod
    def of(cls, blurs: Iterable[Iterable[str]], **kwargs) -> BlurSpec:
        return cls(tuple(frozenset(w) for w in blurs), **kwargs)

    def key(self, w: int) -> str:
        return block_key(self.blurs[w])

    def block_index(self, key: str) -> int:
        for k, w in enumerate(self.blurs):
            if block_key(w) == key:
                return k
        raise InvalidInput(f"unknown blur {key!r}")

    def to_json(self) -> list[list[str]]:
        return [sorted(w) for w in self.blurs]


def _check_atoms(ra: RAAtomStructure, spec: BlurSpec) -> None:
    div = set(ra.diversity)
    for w in spec.blurs:
        extra = set(w) - div
        if extra:
            raise InvalidInput(f"blur {block_key(w)!r} names unknown atoms {sorted(extra)}")


def safe(ra: RAAtomStructure, v_set, w_set, t_set, reading: str = "contains") -> bool:
    for v in v_set:
        for w in w_set:
            comp = ra.compose_atoms(v, w)
            if reading == "contains":
                if any(t not in comp for t in t_set):
                    return False
            elif any(comp - {t} for t in t_set):
                return False
    return True


def _compose_sets(ra: RAAtomStructure, xs, ys) -> set[str]:
    out: set[str] = set()
    for x in xs:
        for y in ys:
            out |= ra.compose_atoms(x, y)
    return out


@dataclass
class BlurReport:
    items: dict[str, bool]
    witnesses: dict[str, object] = field(default_factory=dict)
    mode: str = "exact"
    seed: int | None = None
    trials: int | None = None

    @property
    def ok(self) -> bool:
        return all(self.items.values())

    def to_json(self) -> dict:
        out = {"ok": self.ok, "items": dict(self.items), "witnesses": _jsonable(self.witnesses), "mode": self.mode}
        if self.seed is not None:
            out["seed"] = self.seed
            out["trials"] = self.trials
        return out


def _jsonable(x):
    if isinstance(x, Mapping):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (frozenset, set)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _tuples(pool: Sequence, size: int, mode: str, seed: int, trials: int, budget: int):
    """Tuples over ``pool`` for a universally quantified item.

    Repetitions and order never matter for the items checked here, so the
    exact mode walks subsets of size at most ``size``.
    """
    if mode == "exact":
        for s in range(1, size + 1):
            yield from itertools.combinations(pool, s)
        return
    rng = random.Random(seed)
    samples = [tuple(rng.choice(pool) for _ in range(size)) for _ in range(trials)]
    yield from samples


def is_n_blur(
    ra: RAAtomStructure,
    spec: BlurSpec,
    n: int,
    mode: str = "exact",
    *,
    seed: int = 0,
    trials: int = 1000,
    budget: int = 10**6,
    strong: bool = False,
) -> BlurReport:
    """Check the five complex-blur items (the fourth strengthened when ``strong``).

    Item 4 quantifies over ``2n - 1`` blurs; ``mode="exact"`` is honoured while
    ``|J|**(2n-1) <= budget`` and falls back to seeded sampling beyond that.
    """
    if n < 3:
        raise InvalidInput("blur dimension must be at least 3")
    _check_atoms(ra, spec)
    blurs = list(spec.blurs)
    div = ra.diversity
    items: dict[str, bool] = {}
    wit: dict[str, object] = {}
    if mode not in ("exact", "sampled"):
        raise InvalidInput(f"unknown mode {mode!r}")
    if mode == "exact" and len(blurs) ** (2 * n - 1) > budget:
        mode = "sampled"

    empty = [block_key(w) for w in blurs if not w]
    items["1"] = not empty
    if empty:
        wit["1"] = empty[0]

    missing = sorted(set(div) - set().union(*blurs)) if blurs else sorted(div)
    items["2"] = not missing
    if missing:
        wit["2"] = missing[0]

    items["3"] = True
    for p in div:
        for w in blurs:
            comp = _compose_sets(ra, [p], w)
            lack = [a for a in div if a not in comp]
            if lack:
                items["3"] = False
                wit["3"] = {"P": p, "W": block_key(w), "missing": lack[0]}
                break
        if not items["3"]:
            break

    # item 4: per pair (V, W), the blurs T with safe(V, W, T)
    pairs = list(itertools.product(range(len(blurs)), repeat=2))
    safe_for = {
        (v, w): frozenset(t for t in range(len(blurs)) if safe(ra, blurs[v], blurs[w], blurs[t], spec.safe_reading))
        for v, w in pairs
    }
    items["4"] = True
    if strong:
        for v, w in pairs:
            if len(safe_for[(v, w)]) != len(blurs):
                t = min(set(range(len(blurs))) - safe_for[(v, w)])
                items["4"] = False
                wit["4"] = {"V": block_key(blurs[v]), "W": block_key(blurs[w]), "T": block_key(blurs[t])}
                break
    elif blurs:
        for combo in _tuples(pairs, n - 1, mode, seed, trials, budget):
            common = frozenset(range(len(blurs)))
            for pr in combo:
                common &= safe_for[pr]
            if not common:
                items["4"] = False
                wit["4"] = [{"V": block_key(blurs[v]), "W": block_key(blurs[w])} for v, w in combo]
                break

    items["5"] = True
    atom_pairs = list(itertools.product(div, repeat=2))
    comps = {(p, q): ra.compose_atoms(p, q) for p, q in atom_pairs}
    for combo in _tuples(atom_pairs, n - 1, mode, seed + 1, trials, budget):
        meet = set(div)
        for pr in combo:
            meet &= comps[pr]
        bad = next((w for w in blurs if not (meet & w)), None)
        if bad is not None:
            items["5"] = False
            wit["5"] = {"pairs": [list(pr) for pr in combo], "W": block_key(bad)}
            break

    report = BlurReport(items, wit, mode)
    if mode == "sampled":
        report.seed, report.trials = seed, trials
    return report


def is_strong_blur(ra: RAAtomStructure, spec: BlurSpec, n: int, mode: str = "exact", **kwargs) -> BlurReport:
    return is_n_blur(ra, spec, n, mode, strong=True, **kwargs)


# ---------------------------------------------------------------------------
# split atoms


@dataclass(frozen=True, order=True)
class SplitAtom:
    """``Id`` when ``index`` is ``None``, else the triple ``(index, atom, blur)``."""

    index: int | None = None
    atom: str = ""
    blur: int = -1

    @property
    def is_id(self) -> bool:
        return self.index is None

    def name(self, spec: BlurSpec) -> str:
        return "Id" if self.is_id else f"{self.index}:{self.atom}:{spec.key(self.blur)}"

    @classmethod
    def parse(cls, name: str, spec: BlurSpec) -> SplitAtom:
        if name == "Id":
            return cls()
        try:
            i, p, w = name.split(":")
            atom = cls(int(i), p, spec.block_index(w))
        except ValueError:
            raise InvalidInput(f"malformed split atom {name!r}") from None
        atom.check(spec)
        return atom

    def check(self, spec: BlurSpec) -> None:
        if self.is_id:
            return
        if self.index < 0 or not 0 <= self.blur < len(spec.blurs) or self.atom not in spec.blurs[self.blur]:
            raise InvalidInput(f"ill-formed split atom {(self.index, self.atom, self.blur)}")


ID = SplitAtom()


def split_consistent(a: SplitAtom, b: SplitAtom, c: SplitAtom, ra: RAAtomStructure, spec: BlurSpec) -> bool:
    """Consistency of a triple of split atoms.

    With an identity entry the other two must coincide. Otherwise the triple is
    consistent when its blurs are safe, or when its indices are blurred by the
    index blur and its base atoms form a consistent triple.
    """
    if a.is_id or b.is_id or c.is_id:
        if a.is_id:
            return b == c
        if b.is_id:
            return a == c
        return a == b
    if safe(ra, spec.blurs[a.blur], spec.blurs[b.blur], spec.blurs[c.blur], spec.safe_reading):
        return True
    return spec.index(a.index, b.index, c.index) and ra.is_consistent(a.atom, b.atom, c.atom)


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class Line:
    """A set of naturals: ``values`` itself, or its complement when ``cofinite``."""

    cofinite: bool = False
    values: frozenset[int] = frozenset()

    def __contains__(self, i: int) -> bool:
        return (i not in self.values) if self.cofinite else (i in self.values)

    @property
    def empty(self) -> bool:
        return not self.cofinite and not self.values

    def complement(self) -> Line:
        return Line(not self.cofinite, self.values)

    def union(self, other: Line) -> Line:
        if self.cofinite and other.cofinite:
            return Line(True, self.values & other.values)
        if self.cofinite:
            return Line(True, self.values - other.values)
        if other.cofinite:
            return Line(True, other.values - self.values)
        return Line(False, self.values | other.values)

    def intersection(self, other: Line) -> Line:
        return self.complement().union(other.complement()).complement()

    def upto(self, bound: int) -> frozenset[int]:
        return frozenset(i for i in range(bound) if i in self)


FULL = Line(True)
EMPTY = Line()


def ap_line(left: Line, right: Line) -> Line:
    """All ``k`` such that ``index_blur(i, j, k)`` for some ``i`` in ``left``, ``j`` in ``right``."""
    if left.empty or right.empty:
        return EMPTY
    if left.cofinite and right.cofinite:
        return FULL
    if left.cofinite:
        left, right = right, left
    if not right.cofinite:
        out = set()
        for i in left.values:
            for j in right.values:
                lo, hi = min(i, j), max(i, j)
                out.update((2 * lo - hi, 2 * hi - lo))
                if (i + j) % 2 == 0:
                    out.add((i + j) // 2)
        return Line(False, frozenset(k for k in out if k >= 0))
    # finite left, cofinite right: every large k is reached through j = 2k - i
    top = max(right.values, default=0) + max(left.values) + 1
    missing = frozenset(
        k for k in range(top + 1) if not any(j in right for i in left.values for j in ap_partners(i, k))
    )
    return Line(True, missing)


@dataclass(frozen=True)
class SplitElement:
    """An element of the complex algebra given line by line; see the module docstring."""

    has_id: bool
    lines: Mapping[tuple[int, str], Line]

    @staticmethod
    def _norm(spec: BlurSpec, has_id: bool, lines: Mapping[tuple[int, str], Line]) -> SplitElement:
        clean = {}
        for w, blur in enumerate(spec.blurs):
            for p in sorted(blur):
                ln = lines.get((w, p), EMPTY)
                if not ln.empty:
                    clean[(w, p)] = ln
        return SplitElement(has_id, _Frozen(clean))

    @classmethod
    def empty(cls, spec: BlurSpec) -> SplitElement:
        return cls._norm(spec, False, {})

    @classmethod
    def top(cls, spec: BlurSpec) -> SplitElement:
        return cls.empty(spec).complement(spec)

    @classmethod
    def atom(cls, a: SplitAtom, spec: BlurSpec) -> SplitElement:
        a.check(spec)
        if a.is_id:
            return cls._norm(spec, True, {})
        return cls._norm(spec, False, {(a.blur, a.atom): Line(False, frozenset([a.index]))})

    @classmethod
    def block(cls, w: int, spec: BlurSpec) -> SplitElement:
        return cls._norm(spec, False, {(w, p): FULL for p in spec.blurs[w]})

    @classmethod
    def h_set(cls, p: str, spec: BlurSpec) -> SplitElement:
        """All ``(i, p, W)``: the full line of ``p`` in every blur containing it."""
        return cls._norm(spec, False, {(w, p): FULL for w, blur in enumerate(spec.blurs) if p in blur})

    def line(self, w: int, p: str) -> Line:
        return self.lines.get((w, p), EMPTY)

    def contains(self, a: SplitAtom) -> bool:
        return self.has_id if a.is_id else a.index in self.line(a.blur, a.atom)

    def complement(self, spec: BlurSpec) -> SplitElement:
        lines = {(w, p): self.line(w, p).complement() for w, blur in enumerate(spec.blurs) for p in blur}
        return self._norm(spec, not self.has_id, lines)

    def union(self, other: SplitElement, spec: BlurSpec) -> SplitElement:
        keys = set(self.lines) | set(other.lines)
        return self._norm(spec, self.has_id or other.has_id, {k: self.line(*k).union(other.line(*k)) for k in keys})

    def intersection(self, other: SplitElement, spec: BlurSpec) -> SplitElement:
        keys = set(self.lines) & set(other.lines)
        return self._norm(
            spec, self.has_id and other.has_id, {k: self.line(*k).intersection(other.line(*k)) for k in keys}
        )

    def is_empty(self) -> bool:
        return not self.has_id and not self.lines

    def is_term(self, spec: BlurSpec) -> bool:
        """Whether every block is met in a finite or a cofinite set."""
        for w, blur in enumerate(spec.blurs):
            kinds = {self.line(w, p).cofinite for p in blur}
            if len(kinds) > 1:
                return False
        return True

    def atoms_upto(self, bound: int, spec: BlurSpec) -> set[SplitAtom]:
        out = {ID} if self.has_id else set()
        for (w, p), ln in self.lines.items():
            out.update(SplitAtom(i, p, w) for i in ln.upto(bound))
        return out

    def to_json(self, spec: BlurSpec) -> dict:
        blocks = {}
        for w, blur in enumerate(spec.blurs):
            lines = {p: self.line(w, p) for p in sorted(blur)}
            kinds = {ln.cofinite for ln in lines.values()}
            if kinds == {False} and all(ln.empty for ln in lines.values()):
                continue
            if len(kinds) == 1:
                tag = "cofinite_except" if kinds.pop() else "finite"
                blocks[spec.key(w)] = {tag: sorted([i, p] for p, ln in lines.items() for i in ln.values)}
            else:
                blocks[spec.key(w)] = {
                    "lines": {
                        p: {("cofinite_except" if ln.cofinite else "finite"): sorted(ln.values)}
                        for p, ln in lines.items()
                    }
                }
        return {"id": self.has_id, "blocks": blocks}

    @classmethod
    def from_json(cls, data: Mapping, spec: BlurSpec) -> SplitElement:
        try:
            lines: dict[tuple[int, str], Line] = {}
            for key, body in data.get("blocks", {}).items():
                w = spec.block_index(key)
                blur = spec.blurs[w]
                if "lines" in body:
                    for p, spec_line in body["lines"].items():
                        if p not in blur:
                            raise InvalidInput(f"atom {p!r} not in blur {key!r}")
                        cof = "cofinite_except" in spec_line
                        vals = spec_line["cofinite_except" if cof else "finite"]
                        lines[(w, p)] = Line(cof, frozenset(int(i) for i in vals))
                    continue
                cof = "cofinite_except" in body
                if not cof and "finite" not in body:
                    raise InvalidInput(f"block {key!r} needs 'finite' or 'cofinite_except'")
                pairs = body["cofinite_except" if cof else "finite"]
                per = {p: set() for p in blur}
                for i, p in pairs:
                    if p not in blur or int(i) < 0:
                        raise InvalidInput(f"pair {[i, p]} does not belong to blur {key!r}")
                    per[p].add(int(i))
                for p, vals in per.items():
                    lines[(w, p)] = Line(cof, frozenset(vals))
            return cls._norm(spec, bool(data.get("id", False)), lines)
        except (TypeError, ValueError, AttributeError) as exc:
            raise InvalidInput(f"malformed split element: {exc}") from None


class _Frozen(dict):
    """A dict usable inside frozen dataclasses that compare and hash by content."""

    def __hash__(self):
        return hash(frozenset(self.items()))


def split_compose(x: SplitElement, y: SplitElement, ra: RAAtomStructure, spec: BlurSpec) -> SplitElement:
    """Exact composition in the complex algebra of the split structure."""
    out: dict[tuple[int, str], Line] = {}

    def add(key, ln):
        out[key] = out.get(key, EMPTY).union(ln)

    if x.has_id:
        for key, ln in y.lines.items():
            add(key, ln)
    if y.has_id:
        for key, ln in x.lines.items():
            add(key, ln)
    has_id = (x.has_id and y.has_id) or any(
        not x.line(*k).intersection(y.line(*k)).empty for k in x.lines if k in y.lines
    )
    blocks_x = {w for w, _ in x.lines}
    blocks_y = {w for w, _ in y.lines}
    if spec.index is not index_blur and any(ln.cofinite for ln in itertools.chain(x.lines.values(), y.lines.values())):
        raise InvalidInput("exact composition over cofinite lines needs the arithmetic-progression index blur")
    for s in blocks_x:
        for z in blocks_y:
            for w, blur in enumerate(spec.blurs):
                if safe(ra, spec.blurs[s], spec.blurs[z], blur, spec.safe_reading):
                    for r in blur:
                        add((w, r), FULL)
                    continue
                for r in blur:
                    for (s2, p), lx in x.lines.items():
                        if s2 != s:
                            continue
                        for (z2, q), ly in y.lines.items():
                            if z2 != z or not ra.is_consistent(p, q, r):
                                continue
                            if spec.index is index_blur:
                                add((w, r), ap_line(lx, ly))
                            else:
                                ks = {
                                    k
                                    for i in lx.values
                                    for j in ly.values
                                    for k in range(2 * max(i, j) + 1)
                                    if spec.index(i, j, k)
                                }
                                add((w, r), Line(False, frozenset(ks)))
    return SplitElement._norm(spec, has_id, out)


def compose_atoms(a: SplitAtom, b: SplitAtom, ra: RAAtomStructure, spec: BlurSpec) -> SplitElement:
    return split_compose(SplitElement.atom(a, spec), SplitElement.atom(b, spec), ra, spec)


# ---------------------------------------------------------------------------
# truncations


@dataclass(frozen=True)
class TruncatedSplit:
    """The split structure cut down to indices below ``bound``, as a relation-algebra atom structure."""

    ra: RAAtomStructure
    spec: BlurSpec
    bound: int

    @property
    def split_atoms(self) -> list[SplitAtom]:
        return [ID] + [
            SplitAtom(i, p, w) for w, blur in enumerate(self.spec.blurs) for p in sorted(blur) for i in range(self.bound)
        ]

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(a.name(self.spec) for a in self.split_atoms)

    @property
    def identity(self) -> str:
        return "Id"

    @property
    def diversity(self) -> tuple[str, ...]:
        return self.atoms[1:]

    def conv(self, a: str) -> str:
        return a

    def is_consistent(self, a: str, b: str, c: str) -> bool:
        p = SplitAtom.parse
        return split_consistent(p(a, self.spec), p(b, self.spec), p(c, self.spec), self.ra, self.spec)

    def to_ra(self) -> RAAtomStructure:
        atoms = self.split_atoms
        names = [a.name(self.spec) for a in atoms]
        forbidden = frozenset(
            (names[x], names[y], names[z])
            for x, y, z in itertools.product(range(1, len(atoms)), repeat=3)
            if not split_consistent(atoms[x], atoms[y], atoms[z], self.ra, self.spec)
        )
        return RAAtomStructure(tuple(names), "Id", {a: a for a in names}, forbidden)


def split_mat_l(ra: RAAtomStructure, spec: BlurSpec, l: int, bound: int):
    """The CA_l atom structure of basic matrices over split atoms with indices below ``bound``."""
    if l < 3:
        raise InvalidInput("matrix dimension must be at least 3")
    _check_atoms(ra, spec)
    at = mat_n(TruncatedSplit(ra, spec, bound).to_ra(), l)
    at.meta.update({"generator": "split", "bound": bound})
    return at


# ---------------------------------------------------------------------------
# the H-partition


@dataclass
class PartitionReport:
    ok: bool
    bound: int
    checked: int
    counterexample: dict | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "bound": self.bound, "checked": self.checked, "counterexample": self.counterexample}


def hp_union(p: str, q: str, ra: RAAtomStructure, spec: BlurSpec) -> SplitElement:
    """Union of ``H^z`` over base atoms ``z <= p;q``; ``H^Id`` is ``{Id}``."""
    out = SplitElement.empty(spec)
    for z in ra.compose_atoms(p, q):
        part = SplitElement.atom(ID, spec) if z == ra.identity else SplitElement.h_set(z, spec)
        out = out.union(part, spec)
    return out


def hp_partition_check(p: str, q: str, bound: int, ra: RAAtomStructure, spec: BlurSpec) -> PartitionReport:
    """Compare ``H^p ; H^q`` with the union of ``H^z`` for ``z <= p;q`` on indices below ``bound``."""
    if bound < 3:
        raise InvalidInput("truncation must be at least 3")
    _check_atoms(ra, spec)
    for a in (p, q):
        if a not in ra.diversity:
            raise InvalidInput(f"{a!r} is not a diversity atom")
    left = split_compose(SplitElement.h_set(p, spec), SplitElement.h_set(q, spec), ra, spec)
    right = hp_union(p, q, ra, spec)
    universe = [ID] + [
        SplitAtom(i, r, w) for w, blur in enumerate(spec.blurs) for r in sorted(blur) for i in range(bound)
    ]
    for a in universe:
        lhs, rhs = left.contains(a), right.contains(a)
        if lhs != rhs:
            side = "left only" if lhs else "right only"
            return PartitionReport(False, bound, len(universe), {"atom": a.name(spec), "side": side})
    return PartitionReport(True, bound, len(universe))
