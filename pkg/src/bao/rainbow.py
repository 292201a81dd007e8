"""Rainbow atom structures, coloured graphs, the graph form of the atomic game,
and the Ehrenfeucht-Fraisse pebble game on complete irreflexive graphs.

Atoms are surjections from ``n`` onto a coloured graph, with graph nodes
named by first occurrence. Two surjections name the same atom exactly when
this normal form agrees, so no isomorphism search is needed for atoms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .core import AtomStructure, InvalidInput, Signature, bits, diag_name
from .games import FORALL, EXISTS, Move, Network, NetworkGame

YELLOW_MODES = ("single", "full")


# ---------------------------------------------------------------------------
# colours


@dataclass(frozen=True, order=True)
class Colour:
    """Edge colour: ``g`` (g_i, i >= 1), ``g0`` (tint i), ``w`` (white i) or ``r`` (red i->j)."""

    kind: str
    i: int
    j: int = -1
    sup: int = -1

    @property
    def name(self) -> str:
        if self.kind == "g":
            return f"g{self.i}"
        if self.kind == "g0":
            return f"g0.{self.i}"
        if self.kind == "w":
            return f"w{self.i}"
        return f"r{self.i}-{self.j}" + (f"^{self.sup}" if self.sup >= 0 else "")

    @property
    def is_green(self) -> bool:
        return self.kind in ("g", "g0")

    @property
    def is_red(self) -> bool:
        return self.kind == "r"

    def converse(self) -> Colour:
        return Colour("r", self.j, self.i, self.sup) if self.kind == "r" else self

    def unsplit(self) -> Colour:
        return Colour(self.kind, self.i, self.j) if self.sup >= 0 else self


def triangle_fault(a: Colour, b: Colour, c: Colour) -> str | None:
    """Why the triangle x->y = a, y->z = b, x->z = c is forbidden, or None."""
    trio = (a, b, c)
    if all(x.is_green for x in trio):
        return "three greens"
    whites = [x for x in trio if x.kind == "w"]
    if len(whites) == 1:
        w = whites[0]
        if w.i == 0 and sum(x.kind == "g0" for x in trio) == 2:
            return "g0 g0 w0"
        if w.i > 0 and sum(x.kind == "g" and x.i == w.i for x in trio) == 2:
            return f"g{w.i} g{w.i} w{w.i}"
    if all(x.is_red for x in trio):
        if not (a.i == c.i and a.j == b.i and b.j == c.j):
            return "red index mismatch"
    return None


@dataclass(frozen=True)
class Palette:
    greens: int
    reds: int
    n: int
    splits: int = 0

    def __post_init__(self):
        if self.n < 3:
            raise InvalidInput("rainbow structures need n >= 3")
        if self.greens < 1 or self.reds < 1:
            raise InvalidInput("rainbow structures need at least one green tint and one red index")
        if self.splits < 0:
            raise InvalidInput("splits must be >= 0")
        cols = [Colour("g", i) for i in range(1, self.n - 1)]
        cols += [Colour("g0", i) for i in range(self.greens)]
        cols += [Colour("w", i) for i in range(self.n - 1)]
        sups = range(self.splits) if self.splits else [-1]
        cols += [
            Colour("r", i, j, t) for i in range(self.reds) for j in range(self.reds) if i != j for t in sups
        ]
        object.__setattr__(self, "colours", tuple(cols))
        object.__setattr__(self, "index", {c: k for k, c in enumerate(cols)})
        object.__setattr__(self, "by_name", {c.name: k for k, c in enumerate(cols)})
        object.__setattr__(self, "conv", tuple(self.index[c.converse()] for c in cols))

    def __len__(self) -> int:
        return len(self.colours)

    def allowed(self) -> list[list[int]]:
        """table[c][d]: bitmask of colours e with triangle (c, d, e) allowed."""
        cols = self.colours
        return [
            [sum(1 << k for k, e in enumerate(cols) if triangle_fault(c, d, e) is None) for d in cols] for c in cols
        ]


# ---------------------------------------------------------------------------
# coloured graphs


@dataclass(frozen=True)
class ColouredGraph:
    """A complete graph on ``0..size-1``; ``edges[(x, y)]`` for x < y is a palette index.

    ``yellow`` maps ordered tuples of n-1 distinct nodes to a shade (a
    frozenset of tints); it is None when a single shade is used throughout.
    """

    size: int
    edges: Mapping[tuple[int, int], int] = field(hash=False)
    yellow: Mapping[tuple[int, ...], frozenset] | None = field(default=None, hash=False)

    def colour(self, pal: Palette, x: int, y: int) -> int:
        if x < y:
            return self.edges[(x, y)]
        return pal.conv[self.edges[(y, x)]]


def cone_tints(g: ColouredGraph, pal: Palette, base: Sequence[int]) -> set[int]:
    """Tints of the cones over ``base`` (apex z with z->base[0] = g0.i, z->base[j] = g_j)."""
    out = set()
    for z in range(g.size):
        if z in base:
            continue
        first = pal.colours[g.colour(pal, z, base[0])]
        if first.kind != "g0":
            continue
        if all(pal.colours[g.colour(pal, z, base[j])] == Colour("g", j) for j in range(1, len(base))):
            out.add(first.i)
    return out


def yellow_tuples(g: ColouredGraph, pal: Palette) -> list[tuple[int, ...]]:
    """Ordered (n-1)-tuples of distinct nodes with no green edge among them."""
    out = []
    for t in itertools.permutations(range(g.size), pal.n - 1):
        if not any(pal.colours[g.colour(pal, x, y)].is_green for x, y in itertools.combinations(t, 2)):
            out.append(t)
    return out


def graph_faults(g: ColouredGraph, pal: Palette) -> list[tuple]:
    """Every forbidden triangle and yellow-rule violation of a coloured graph."""
    out = []
    for x, y in itertools.combinations(range(g.size), 2):
        if (x, y) not in g.edges or not 0 <= g.edges[(x, y)] < len(pal):
            out.append(("edge", (x, y)))
    if out:
        return out
    cols = pal.colours
    for x, y, z in itertools.combinations(range(g.size), 3):
        why = triangle_fault(cols[g.colour(pal, x, y)], cols[g.colour(pal, y, z)], cols[g.colour(pal, x, z)])
        if why:
            out.append(("triangle", (x, y, z), why))
    if g.yellow is not None:
        need = set(yellow_tuples(g, pal))
        if set(g.yellow) != need:
            out.append(("yellow", "shaded tuples must be exactly the green-free ones"))
        for t in sorted(need & set(g.yellow)):
            shade = g.yellow[t]
            if not shade <= set(range(pal.greens)):
                out.append(("yellow", t, "unknown tint"))
            missing = cone_tints(g, pal, t) - set(shade)
            if missing:
                out.append(("cone", t, min(missing)))
    return out


def _pairs(q: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(q), 2))


def labelled_graphs(pal: Palette, q: int) -> Iterator[tuple[int, ...]]:
    """Valid edge colourings of K_q (no yellow), as tuples over ``_pairs(q)``."""
    pairs = _pairs(q)
    pos = {e: k for k, e in enumerate(pairs)}
    table = pal.allowed()
    conv = pal.conv
    cols = [0] * len(pairs)
    # (x, y) comes after (w, x) and (w, y) for every w < x, closing those triangles
    order = sorted(range(len(pairs)), key=lambda k: (pairs[k][1], pairs[k][0]))

    def col(x, y):
        return cols[pos[(x, y)]] if x < y else conv[cols[pos[(y, x)]]]

    def place(step: int):
        if step == len(order):
            yield tuple(cols)
            return
        k = order[step]
        x, y = pairs[k]
        mask = (1 << len(pal)) - 1
        for w in range(x):
            mask &= table[col(x, w)][col(w, y)]
        for c in bits(mask):
            cols[k] = c
            yield from place(step + 1)

    yield from place(0)


def restricted_growth(n: int, q: int) -> Iterator[tuple[int, ...]]:
    """First-occurrence patterns of surjections from n onto q nodes."""
    def rec(prefix, top):
        if len(prefix) == n:
            if top == q:
                yield tuple(prefix)
            return
        for v in range(min(top + 1, q)):
            yield from rec(prefix + [v], max(top, v + 1))

    yield from rec([], 0)


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class RainbowAtom:
    pattern: tuple[int, ...]
    cols: tuple[int, ...]
    yellow: tuple = ()

    @property
    def size(self) -> int:
        return max(self.pattern) + 1

    def key(self, pal: Palette) -> str:
        body = "".join(map(str, self.pattern)) + "|" + ",".join(pal.colours[c].name for c in self.cols)
        if self.yellow:
            body += "|" + ";".join(
                "".join(map(str, t)) + ":" + "".join(map(str, sorted(s))) for t, s in self.yellow
            )
        return body


def _normal(pal: Palette, seq: Sequence[int], col, yellow: Mapping | None) -> RainbowAtom:
    """Normal form of the atom read off positions ``seq`` of a graph."""
    names: dict[int, int] = {}
    pattern = []
    for v in seq:
        if v not in names:
            names[v] = len(names)
        pattern.append(names[v])
    nodes = sorted(names, key=names.get)
    cols = tuple(col(nodes[a], nodes[b]) for a, b in _pairs(len(nodes)))
    yel: tuple = ()
    if yellow is not None:
        inside = set(nodes)
        yel = tuple(
            sorted(
                ((tuple(names[v] for v in t), frozenset(s)) for t, s in yellow.items() if set(t) <= inside),
                key=lambda e: (e[0], sorted(e[1])),
            )
        )
    return RainbowAtom(tuple(pattern), cols, yel)


def _atoms_graph_first(pal: Palette, yellow: str) -> list[RainbowAtom]:
    out = []
    for q in range(1, pal.n + 1):
        graphs = list(labelled_graphs(pal, q))
        for pattern in restricted_growth(pal.n, q):
            for cols in graphs:
                if yellow == "single":
                    out.append(RainbowAtom(pattern, cols))
                else:
                    for yel in _yellow_labellings(pal, q, cols):
                        out.append(RainbowAtom(pattern, cols, yel))
    return out


def _yellow_labellings(pal: Palette, q: int, cols: tuple[int, ...]) -> Iterator[tuple]:
    g = ColouredGraph(q, dict(zip(_pairs(q), cols)))
    tups = yellow_tuples(g, pal)
    options = []
    for t in tups:
        forced = cone_tints(g, pal, t)
        free = [i for i in range(pal.greens) if i not in forced]
        opts = []
        for r in range(len(free) + 1):
            for extra in itertools.combinations(free, r):
                opts.append(frozenset(forced) | frozenset(extra))
        options.append(sorted(opts, key=sorted))
    for choice in itertools.product(*options):
        yield tuple(sorted(zip(tups, choice)))


def _atoms_orbit(pal: Palette, yellow: str) -> dict[tuple, str]:
    """Independent enumeration: every surjection onto every labelled graph,
    reduced to the least encoding over all node relabellings.

    Returns orbit representative -> atom key.
    """
    reps: dict[tuple, str] = {}
    subsets = [frozenset(c) for r in range(pal.greens + 1) for c in itertools.combinations(range(pal.greens), r)]
    for q in range(1, pal.n + 1):
        pairs = _pairs(q)
        graphs = []
        for cols in itertools.product(range(len(pal)), repeat=len(pairs)):
            g = ColouredGraph(q, dict(zip(pairs, cols)))
            if graph_faults(g, pal):
                continue
            if yellow == "single":
                graphs.append(g)
                continue
            tups = yellow_tuples(g, pal)
            for choice in itertools.product(subsets, repeat=len(tups)):
                gy = ColouredGraph(q, g.edges, dict(zip(tups, choice)))
                if not graph_faults(gy, pal):
                    graphs.append(gy)
        for a in itertools.product(range(q), repeat=pal.n):
            if len(set(a)) != q:
                continue
            for g in graphs:
                best = None
                for perm in itertools.permutations(range(q)):
                    inv = {perm[v]: v for v in range(q)}
                    cand = (
                        tuple(perm[v] for v in a),
                        tuple(g.colour(pal, inv[x], inv[y]) for x, y in pairs),
                        ()
                        if g.yellow is None
                        else tuple(sorted((tuple(perm[v] for v in t), tuple(sorted(s))) for t, s in g.yellow.items())),
                    )
                    if best is None or cand < best:
                        best = cand
                if best not in reps:
                    pa, pc, py = best
                    cmap = dict(zip(pairs, pc))
                    yel = None if g.yellow is None else {t: frozenset(s) for t, s in py}
                    atom = _normal(pal, pa, lambda x, y: cmap[(x, y)] if x < y else pal.conv[cmap[(y, x)]], yel)
                    reps[best] = atom.key(pal)
    return reps


def count_atoms_two_ways(greens: int, reds: int, n: int, splits: int = 0, yellow: str = "single") -> tuple[int, int]:
    """Atom counts from the graph-first generator and the orbit enumeration."""
    pal = Palette(greens, reds, n, splits)
    return len(_atoms_graph_first(pal, yellow)), len(_atoms_orbit(pal, yellow))


def count_full_yellow_atoms(greens: int, reds: int, n: int, splits: int = 0) -> int:
    """Number of atoms with one shade per tuple, counted without enumerating them."""
    pal = Palette(greens, reds, n, splits)
    total = 0
    for q in range(1, n + 1):
        surj = sum(1 for _ in restricted_growth(n, q))
        per_graph = 0
        for cols in labelled_graphs(pal, q):
            g = ColouredGraph(q, dict(zip(_pairs(q), cols)))
            per_graph += math.prod(2 ** (greens - len(cone_tints(g, pal, t))) for t in yellow_tuples(g, pal))
        total += surj * per_graph
    return total


def rainbow_atoms(greens: int, reds: int, n: int, red_splits: int = 0, yellow: str = "single") -> AtomStructure:
    """The rainbow QEA_n atom structure on graphs with at most n nodes.

    ``red_splits = t > 0`` gives every red ``t`` superscripted copies.
    ``yellow = "single"`` uses one shade for every green-free tuple;
    ``"full"`` lets shades range over all tint sets, subject to the cone rule.
    """
    if yellow not in YELLOW_MODES:
        raise InvalidInput(f"yellow mode must be one of {YELLOW_MODES}")
    pal = Palette(greens, reds, n, red_splits)
    atoms = sorted(_atoms_graph_first(pal, yellow), key=lambda a: (a.size, a.pattern, a.cols, _yellow_sort(a.yellow)))
    keys = [a.key(pal) for a in atoms]
    index = {k: i for i, k in enumerate(keys)}
    sig = Signature("QEA", n)
    images: dict[str, list[int]] = {}
    constants: dict[str, int] = {}

    def reader(a: RainbowAtom):
        cmap = dict(zip(_pairs(a.size), a.cols))
        return lambda x, y: cmap[(x, y)] if x < y else pal.conv[cmap[(y, x)]]

    yellows = [None if yellow == "single" else dict(a.yellow) for a in atoms]
    readers = [reader(a) for a in atoms]
    for i in range(n):
        classes: dict[RainbowAtom, int] = {}
        keyed = []
        for k, a in enumerate(atoms):
            seq = [a.pattern[j] for j in range(n) if j != i]
            r = _normal(pal, seq, readers[k], yellows[k])
            keyed.append(r)
            classes[r] = classes.get(r, 0) | (1 << k)
        images[f"T_{i}"] = [classes[r] for r in keyed]
    for i, j in itertools.combinations(range(n), 2):
        constants[diag_name(i, j, n)] = sum(1 << k for k, a in enumerate(atoms) if a.pattern[i] == a.pattern[j])
    maps = []
    for i in range(n):
        for j in range(n):
            if i != j:
                maps.append((f"S_{i}_{j}", [j if x == i else x for x in range(n)]))
    for i, j in itertools.combinations(range(n), 2):
        tau = list(range(n))
        tau[i], tau[j] = j, i
        maps.append((f"Sw_{i}_{j}", tau))
    for name, tau in maps:
        img = [0] * len(atoms)
        for k, a in enumerate(atoms):
            b = _normal(pal, [a.pattern[t] for t in tau], readers[k], yellows[k])
            img[index[b.key(pal)]] |= 1 << k
        images[name] = img
    meta = {
        "generator": "rainbow",
        "greens": greens,
        "reds": reds,
        "n": n,
        "splits": red_splits,
        "yellow": yellow,
    }
    return AtomStructure(sig, keys, images, constants, meta=meta)


def _yellow_sort(yel):
    return tuple((t, tuple(sorted(s))) for t, s in yel)


def palette_of(at: AtomStructure) -> Palette:
    meta = at.meta
    if meta.get("generator") != "rainbow":
        raise InvalidInput("not a rainbow atom structure")
    return Palette(meta["greens"], meta["reds"], meta["n"], meta.get("splits", 0))


def parse_atom(at: AtomStructure, key: str) -> RainbowAtom:
    pal = palette_of(at)
    if key not in at.index:
        raise InvalidInput(f"{key!r} is not an atom of this structure")
    parts = key.split("|")
    pattern = tuple(int(c) for c in parts[0])
    cols = tuple(pal.by_name[c] for c in parts[1].split(",")) if parts[1] else ()
    yel = ()
    if len(parts) > 2 and parts[2]:
        entries = []
        for item in parts[2].split(";"):
            t, s = item.split(":")
            entries.append((tuple(int(c) for c in t), frozenset(int(c) for c in s)))
        yel = tuple(entries)
    return RainbowAtom(pattern, cols, yel)


def atom_graph(at: AtomStructure, key: str) -> ColouredGraph:
    pal = palette_of(at)
    a = parse_atom(at, key)
    yel = dict(a.yellow) if at.meta.get("yellow") == "full" else None
    return ColouredGraph(a.size, dict(zip(_pairs(a.size), a.cols)), yel)


def graph_network(at: AtomStructure, g: ColouredGraph) -> Network:
    """The network whose label at x is the atom read off the graph along x."""
    pal = palette_of(at)
    full = at.meta.get("yellow") == "full"
    labels = {}
    col = lambda x, y: g.colour(pal, x, y)  # noqa: E731
    for t in itertools.product(range(g.size), repeat=pal.n):
        key = _normal(pal, t, col, g.yellow if full else None).key(pal)
        if key not in at.index:
            raise InvalidInput(f"graph contains a non-atom at {t}")
        labels[t] = at.index[key]
    return Network(tuple(range(g.size)), labels)


def network_graph(at: AtomStructure, net: Network) -> ColouredGraph:
    """Read a coloured graph back off a network (inverse of ``graph_network``)."""
    pal = palette_of(at)
    n = pal.n
    nodes = list(net.nodes)
    pos = {v: k for k, v in enumerate(nodes)}
    edges = {}
    for x, y in itertools.combinations(nodes, 2):
        a = parse_atom(at, at.atoms[net.labels[(x,) + (y,) * (n - 1)]])
        if a.pattern != (0,) + (1,) * (n - 1):
            raise InvalidInput(f"nodes {x} and {y} are not distinct in the network")
        edges[(pos[x], pos[y])] = a.cols[0]
    yel = None
    if at.meta.get("yellow") == "full":
        yel = {}
        for t in itertools.permutations(nodes, n - 1):
            a = parse_atom(at, at.atoms[net.labels[t + (t[-1],)]])
            for tt, s in a.yellow:
                if tt == tuple(range(n - 1)):
                    yel[tuple(pos[v] for v in t)] = s
    return ColouredGraph(len(nodes), edges, yel)


def atom_network(at: AtomStructure, key: str) -> Network:
    return graph_network(at, atom_graph(at, key))


# ---------------------------------------------------------------------------
# split reds: copies and the embedding of the unsplit structure


def strip_key(key: str) -> str:
    parts = key.split("|")
    if len(parts) > 1:
        parts[1] = ",".join(c.split("^")[0] for c in parts[1].split(",")) if parts[1] else ""
    return "|".join(parts)


def copy_equiv(at: AtomStructure, a: str, b: str) -> bool:
    """Whether two atoms agree everywhere except possibly on red superscripts."""
    for k in (a, b):
        if k not in at.index:
            raise InvalidInput(f"{k!r} is not an atom of this structure")
    return strip_key(a) == strip_key(b)


def copy_classes(at: AtomStructure) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for k in at.atoms:
        out.setdefault(strip_key(k), []).append(k)
    return out


@dataclass
class ThetaReport:
    ok: bool
    checked: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": dict(sorted(self.checked.items())), "failures": self.failures[:20]}


def theta_embed_check(finite: AtomStructure, split: AtomStructure) -> ThetaReport:
    """Check that sending each atom to the join of its copies preserves the operations.

    Every atom-level instance is checked: injectivity and the partition
    property (which give joins and complements), diagonals, cylindrifiers,
    replacements and transpositions.
    """
    if finite.meta.get("splits", 0) != 0:
        raise InvalidInput("the first structure must be unsplit")
    if split.signature != finite.signature:
        raise InvalidInput("structures have different signatures")
    classes = copy_classes(split)
    theta = []
    failures = []
    checked: dict[str, int] = {}

    def bump(what):
        checked[what] = checked.get(what, 0) + 1

    covered = 0
    for a in finite.atoms:
        mask = sum(1 << split.index[k] for k in classes.get(a, []))
        theta.append(mask)
        bump("injectivity")
        if not mask:
            failures.append({"op": "injectivity", "atom": a})
        if covered & mask:
            failures.append({"op": "partition", "atom": a})
        covered |= mask
    bump("partition")
    if covered != split.full:
        failures.append({"op": "partition", "atom": None})

    def lift_theta(x: int) -> int:
        out = 0
        for k in bits(x):
            out |= theta[k]
        return out

    def lift(img, x):
        out = 0
        for k in bits(x):
            out |= img[k]
        return out

    for name, mask in finite.constants.items():
        bump("diagonal")
        if lift_theta(mask) != split.constants[name]:
            failures.append({"op": name, "atom": None})
    for name, img in finite.images.items():
        simg = split.images[name]
        op = "cylindrifier" if name.startswith("T_") else "substitution"
        for k, a in enumerate(finite.atoms):
            bump(op)
            if lift_theta(img[k]) != lift(simg, theta[k]):
                failures.append({"op": name, "atom": a})
    return ThetaReport(not failures, checked, failures)


def atom_is_cyl_product(at: AtomStructure, key: str) -> bool:
    """Whether the atom equals the meet of its n cylindrifications."""
    k = at.index[key]
    meet = at.full
    for i in range(at.signature.dim):
        meet &= at.images[f"T_{i}"][k]
    return meet == 1 << k


def cyl_product_report(at: AtomStructure) -> dict:
    fails = [k for k in at.atoms if not atom_is_cyl_product(at, k)]
    return {"atoms": at.n_atoms, "holds": at.n_atoms - len(fails), "fails": fails[:20]}


# ---------------------------------------------------------------------------
# Ehrenfeucht-Fraisse game on complete irreflexive graphs


@dataclass(frozen=True)
class EFResult:
    winner: str
    rounds: int | None

    def to_json(self) -> dict:
        return {"winner": self.winner, "rounds": self.rounds}


def _ef_forall_table(pebbles: int, left: int, right: int):
    @lru_cache(maxsize=None)
    def wins(state: tuple[int, ...], r: int) -> bool:
        # state: sorted multiplicities of pebbles on each matched pair
        if r == 0:
            return False
        sources = []
        if sum(state) < pebbles:
            sources.append(state)
        for idx in sorted({state.index(v) for v in state}):
            s = list(state)
            s[idx] -= 1
            sources.append(tuple(sorted(x for x in s if x)))
        for src in sources:
            k = len(src)
            for idx in sorted({src.index(v) for v in src}):
                s = list(src)
                s[idx] += 1
                if wins(tuple(sorted(s)), r - 1):
                    return True
            for mine, theirs in ((left, right), (right, left)):
                if mine > k:
                    if theirs <= k:
                        return True
                    if wins(tuple(sorted(src + (1,))), r - 1):
                        return True
        return False

    return wins


def ef_solve(pebbles: int, rounds: int, left: int, right: int) -> EFResult:
    """Exact winner of the pebble game with ``pebbles`` pairs and ``rounds`` rounds
    on complete irreflexive graphs of sizes ``left`` and ``right``.

    Forall wins report the least number of rounds that suffices.
    """
    if min(pebbles, rounds, left, right) < 0:
        raise InvalidInput("pebble game parameters must be non-negative")
    wins = _ef_forall_table(pebbles, left, right)
    for r in range(1, rounds + 1):
        if wins((), r):
            return EFResult(FORALL, r)
    return EFResult(EXISTS, None)


# ---------------------------------------------------------------------------
# the atomic game played on coloured graphs


@dataclass(frozen=True)
class GraphPos:
    size: int
    col: tuple[int, ...]  # size*size, -1 on the diagonal

    def c(self, x: int, y: int) -> int:
        return self.col[x * self.size + y]


@dataclass(frozen=True)
class GraphMove:
    """Round 0 (``atom`` set) or: new node ``node`` with colours ``cols`` towards ``targets``."""

    atom: int = -1
    targets: tuple[int, ...] = ()
    cols: tuple[int, ...] = ()
    node: int = 0


class RainbowGame:
    """The atomic game on a single-shade rainbow structure, played on coloured graphs.

    Positions are canonicalised under node renaming together with renaming of
    tints and of red indices, both of which preserve every forbidden triangle.
    """

    def __init__(self, at: AtomStructure, nodes: int, reuse: bool, canonical: bool = True):
        if at.meta.get("yellow", "single") != "single":
            raise InvalidInput("the graph backend needs the single-shade structure")
        self.at = at
        self.pal = palette_of(at)
        self.n = self.pal.n
        self.m = nodes
        self.reuse = reuse
        self.canonical = canonical
        self.table = self.pal.allowed()
        self.full_mask = (1 << len(self.pal)) - 1
        cols = self.pal.colours
        # colour classes that survive renaming of tints and red indices
        self._kind = [{"g": c.i, "g0": 100, "w": 200 + c.i, "r": 300}[c.kind] for c in cols]
        # Exists tries whites, then reds, then greens
        rank = {"w": 0, "r": 1, "g0": 2, "g": 3}
        self._preference = sorted(range(len(cols)), key=lambda k: (rank[cols[k].kind], k))
        self._red_index = {(c.i, c.j, c.sup): k for k, c in enumerate(cols) if c.is_red}
        self._tint_index = {c.i: k for k, c in enumerate(cols) if c.kind == "g0"}
        self._green = [1 if c.is_green else 0 for c in cols]
        self._ckind = [1 if c.kind == "g0" else 2 if c.is_red else 0 for c in cols]
        self._ctint = [c.i for c in cols]
        self._cri = [c.i for c in cols]
        self._crj = [c.j for c in cols]
        self._crsup = [c.sup for c in cols]
        self._pair_checks = self._last_round_checks()
        self._local_cache: dict[tuple, bool] = {}
        self._cone_kinds = sorted([100] + list(range(1, self.n - 1)))

    # -- positions ---------------------------------------------------
    def initial(self) -> GraphPos:
        return GraphPos(0, ())

    def _pos_from_atom(self, a: int) -> GraphPos:
        atom = parse_atom(self.at, self.at.atoms[a])
        q = atom.size
        col = [-1] * (q * q)
        for (x, y), c in zip(_pairs(q), atom.cols):
            col[x * q + y] = c
            col[y * q + x] = self.pal.conv[c]
        return GraphPos(q, tuple(col))

    def graph(self, pos: GraphPos) -> ColouredGraph:
        return ColouredGraph(pos.size, {(x, y): pos.c(x, y) for x, y in _pairs(pos.size)})

    def network(self, pos: GraphPos) -> Network:
        return graph_network(self.at, self.graph(pos))

    def key(self, pos: GraphPos) -> tuple:
        p = pos.size
        col = pos.col
        if not self.canonical:
            return (p, col)
        kind = self._kind
        # two rounds of colour refinement split nodes into invariant classes
        inv = [tuple(sorted(kind[col[v * p + w]] for w in range(p) if w != v)) for v in range(p)]
        inv = [
            (inv[v], tuple(sorted((kind[col[v * p + w]], inv[w]) for w in range(p) if w != v)))
            for v in range(p)
        ]
        groups: dict[tuple, list[int]] = {}
        for v in range(p):
            groups.setdefault(inv[v], []).append(v)
        classes = [groups[k] for k in sorted(groups)]
        pairs = _pairs(p)
        ckind, tint, ri, rj, rsup = self._ckind, self._ctint, self._cri, self._crj, self._crsup
        tint_index, red_index = self._tint_index, self._red_index
        best: list[int] | None = None
        for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
            order = [v for c in parts for v in c]
            tints: dict[int, int] = {}
            rmap: dict[int, int] = {}
            seq = []
            tied = best is not None
            for pos_i, (x, y) in enumerate(pairs):
                c = col[order[x] * p + order[y]]
                k = ckind[c]
                if k == 1:
                    t = tints.setdefault(tint[c], len(tints))
                    c = tint_index[t]
                elif k == 2:
                    i = rmap.setdefault(ri[c], len(rmap))
                    j = rmap.setdefault(rj[c], len(rmap))
                    c = red_index[(i, j, rsup[c])]
                if tied:
                    b = best[pos_i]
                    if c > b:
                        break
                    if c < b:
                        tied = False
                seq.append(c)
            else:
                if best is None or not tied:
                    best = seq
        return (p,) + tuple(best or ())

    # -- moves ---------------------------------------------------------
    def _extension_domains(self, pos: GraphPos, targets, cols, drop: int | None):
        others = [w for w in range(pos.size) if w not in targets and w != drop]
        doms = []
        table = self.table
        for w in others:
            mask = self.full_mask
            for u, c in zip(targets, cols):
                mask &= table[c][pos.c(u, w)]
            doms.append(mask)
        return others, doms

    def _used(self, pos: GraphPos) -> tuple[set[int], set[int]]:
        tints, reds = set(), set()
        cols = self.pal.colours
        for c in pos.col:
            if c < 0:
                continue
            colour = cols[c]
            if colour.kind == "g0":
                tints.add(colour.i)
            elif colour.is_red:
                reds.update((colour.i, colour.j))
        return tints, reds

    def _is_representative(self, cols: Sequence[int], used) -> bool:
        # unused tints and red indices are interchangeable: keep only the
        # variant that introduces them in increasing order
        used_t, used_r = used
        free_t = [t for t in range(self.pal.greens) if t not in used_t]
        free_r = [r for r in range(self.pal.reds) if r not in used_r]
        new_t: dict[int, int] = {}
        new_r: dict[int, int] = {}
        for c in cols:
            colour = self.pal.colours[c]
            if colour.kind == "g0" and colour.i not in used_t:
                if colour.i not in new_t:
                    if colour.i != free_t[len(new_t)]:
                        return False
                    new_t[colour.i] = 1
            elif colour.is_red:
                for idx in (colour.i, colour.j):
                    if idx not in used_r and idx not in new_r:
                        if idx != free_r[len(new_r)]:
                            return False
                        new_r[idx] = 1
        return True

    def _colourings(self, pos: GraphPos, targets: Sequence[int]) -> Iterator[tuple[int, ...]]:
        """Colours z->targets whose triangles inside {z} + targets are allowed."""
        table = self.table
        k = len(targets)
        cols = [0] * k

        def rec(i: int):
            if i == k:
                yield tuple(cols)
                return
            mask = self.full_mask
            for j in range(i):
                mask &= table[cols[j]][pos.c(targets[j], targets[i])]
            for c in bits(mask):
                cols[i] = c
                yield from rec(i + 1)

        return rec(0)

    @staticmethod
    def _witnessed(pos: GraphPos, targets, cols) -> bool:
        return any(
            w not in targets and all(pos.c(w, u) == c for u, c in zip(targets, cols)) for w in range(pos.size)
        )

    def _demands(self, pos: GraphPos, avail: Sequence[int], used) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Demands (targets, colours) worth making with targets drawn from ``avail``.

        Demands on fewer than n-1 targets are dropped when some consistent
        demand on n-1 targets extends them: every answer to the larger demand
        answers the smaller one, so Forall loses nothing.
        """
        size = min(self.n - 1, len(avail))
        covered = set()
        for targets in itertools.combinations(avail, size):
            for cols in self._colourings(pos, targets):
                if size > 1:
                    for s in range(1, size):
                        for idx in itertools.combinations(range(size), s):
                            covered.add((tuple(targets[i] for i in idx), tuple(cols[i] for i in idx)))
                if self._is_representative(cols, used) and not self._witnessed(pos, targets, cols):
                    yield targets, cols
        for s in range(1, size):
            for targets in itertools.combinations(avail, s):
                for cols in self._colourings(pos, targets):
                    if (
                        (targets, cols) not in covered
                        and self._is_representative(cols, used)
                        and not self._witnessed(pos, targets, cols)
                    ):
                        yield targets, cols

    def _moves(self, pos: GraphPos, rounds_left: int | None) -> Iterator[tuple]:
        p = pos.size
        used = self._used(pos)
        if p < self.m:
            for targets, cols in self._demands(pos, tuple(range(p)), used):
                yield targets, cols, p
        # with a fresh node available, overwriting cannot beat it in the last round
        if self.reuse and not (rounds_left == 1 and p < self.m):
            for w in range(p):
                avail = tuple(v for v in range(p) if v != w)
                for targets, cols in self._demands(pos, avail, used):
                    yield targets, cols, w

    def forall_moves(self, pos: GraphPos, rounds_left: int | None = None) -> list[GraphMove]:
        if pos.size == 0:
            seen = {}
            for a in range(self.at.n_atoms):
                k = self.key(self._pos_from_atom(a))
                seen.setdefault(k, a)
            # large atoms with few green edges first: they offer Forall cone bases
            order = sorted(seen.values(), key=lambda a: (-self._pos_from_atom(a).size, self._greens(a), a))
            return [GraphMove(atom=a) for a in order]
        p = pos.size
        scored = []
        green = self._green
        for targets, cols, z in self._moves(pos, rounds_left):
            _, doms = self._extension_domains(pos, targets, cols, z if z < p else None)
            score = 1
            for d in doms:
                score *= d.bit_count()
            # cones squeeze Exists towards reds, so they go first, preferring
            # bases that already carry many cones; other green demands follow
            cone = self._is_cone(cols)
            greens = sum(green[c] for c in cols)
            cones = 0
            if cone:
                cones = sum(1 for w in range(p) if w not in targets and w != z and self._is_cone(
                    [pos.c(w, u) for u in targets]))
            scored.append((-cone, -cones, -greens, score, len(scored), GraphMove(-1, targets, cols, z)))
        scored.sort(key=lambda s: s[:5])
        return [mv for *_, mv in scored]

    def _is_cone(self, cols) -> bool:
        """Whether the colours are one tint plus each of g_1 .. g_{n-2} once."""
        kinds = sorted(self._kind[c] for c in cols)
        return len(cols) == self.n - 1 and kinds == self._cone_kinds

    def _greens(self, a: int) -> int:
        return sum(self._green[c] for c in self._pos_from_atom(a).col if c >= 0)

    def wins_in_one(self, pos: GraphPos) -> bool:
        """Whether Forall has a move Exists cannot answer at all."""
        if pos.size == 0:
            return False
        if self.n != 3 or not self._pair_checks:
            return any(
                not self._satisfiable(pos, targets, z, self._extension_domains(pos, targets, cols, z if z < pos.size else None)[1])
                for targets, cols, z in self._moves(pos, 1)
            )
        p = pos.size
        slots = [p] if p < self.m else (list(range(p)) if self.reuse else [])
        for z in slots:
            avail = [v for v in range(p) if v != z]
            if len(avail) < 2:
                if any(
                    not self._satisfiable(pos, t, z, self._extension_domains(pos, t, c, z if z < p else None)[1])
                    for t, c in self._demands(pos, tuple(avail), self._used(pos))
                ):
                    return True
                continue
            for t1, t2 in itertools.combinations(avail, 2):
                others = [w for w in avail if w != t1 and w != t2]
                local = (
                    pos.c(t1, t2),
                    tuple((pos.c(t1, w), pos.c(t2, w)) for w in others),
                    tuple(pos.c(u, w) for u, w in itertools.combinations(others, 2)),
                )
                verdict = self._local_cache.get(local)
                if verdict is None:
                    verdict = self._local_cache[local] = self._local_kill(*local)
                if verdict:
                    return True
        return False

    def _local_kill(self, base: int, spokes: tuple, rim: tuple) -> bool:
        """Whether some demand on a target pair with this neighbourhood has no answer.

        ``base`` colours the pair, ``spokes`` gives each other node's colours
        from the two targets and ``rim`` the colours among the other nodes.
        """
        table = self.table
        conv = self.pal.conv
        k = len(spokes)
        seen = {(conv[a], conv[b]) for a, b in spokes}
        rim_at = {}
        for (u, w), c in zip(itertools.combinations(range(k), 2), rim):
            rim_at[(u, w)] = c
        for cols, stronger in self._pair_checks[base]:
            if cols in seen or any(d not in seen for d in stronger):
                continue
            c1, c2 = cols
            doms = [table[c1][a] & table[c2][b] for a, b in spokes]
            if not all(doms):
                return True
            if not self._rim_satisfiable(doms, rim_at):
                return True
        return False

    def _rim_satisfiable(self, doms: list[int], rim_at: dict) -> bool:
        table = self.table
        k = len(doms)

        def rec(i: int, doms: list[int]) -> bool:
            if i == k:
                return True
            for c in bits(doms[i]):
                nd = doms[:]
                row = table[c]
                for t in range(i + 1, k):
                    nd[t] &= row[rim_at[(i, t)]]
                    if not nd[t]:
                        break
                else:
                    if rec(i + 1, nd):
                        return True
            return False

        return rec(0, doms)

    def _last_round_checks(self):
        """Per base colour, the colour pairs a last-round demand may use, with their dominators.

        A demand is dominated when another legal demand has, target by target,
        colours admitting no more completions; if the dominator cannot be
        answered neither can the weaker one, so only dominators need checking.
        """
        table = self.table
        size = len(table)
        if not all(table[c][d] for c in range(size) for d in range(size)):
            return None
        below = [
            [
                d != c and all(table[c][x] & ~table[d][x] == 0 for x in range(size))
                and (any(table[d][x] & ~table[c][x] for x in range(size)) or c < d)
                for d in range(size)
            ]
            for c in range(size)
        ]
        out = []
        for base in range(size):
            legal = [(c1, c2) for c1 in range(size) for c2 in bits(table[c1][base])]
            legal_set = set(legal)
            entries = []
            for c1, c2 in legal:
                stronger = [
                    (d1, d2)
                    for d1 in range(size)
                    for d2 in range(size)
                    if (d1, d2) != (c1, c2)
                    and (d1, d2) in legal_set
                    and (d1 == c1 or below[d1][c1])
                    and (d2 == c2 or below[d2][c2])
                ]
                entries.append(((c1, c2), tuple(stronger)))
            out.append(entries)
        return out

    def _satisfiable(self, pos: GraphPos, targets, z: int, doms: list[int]) -> bool:
        others = [w for w in range(pos.size) if w not in targets and w != z]
        if not all(doms):
            return False
        table = self.table
        p = pos.size
        col = pos.col

        def rec(k: int, doms: list[int]) -> bool:
            if k == len(others):
                return True
            w = others[k]
            for c in bits(doms[k]):
                nd = doms[:]
                row = table[c]
                for t in range(k + 1, len(others)):
                    nd[t] &= row[col[w * p + others[t]]]
                    if not nd[t]:
                        break
                else:
                    if rec(k + 1, nd):
                        return True
            return False

        return rec(0, doms)

    def responses(self, pos: GraphPos, move: GraphMove) -> Iterator[GraphPos]:
        if move.atom >= 0:
            yield self._pos_from_atom(move.atom)
            return
        p = pos.size
        z = move.node
        drop = z if z < p else None
        others, doms = self._extension_domains(pos, move.targets, move.cols, drop)
        table = self.table
        conv = self.pal.conv
        size = p + 1 if z == p else p
        base = list(pos.col) if z < p else None
        assign = [0] * len(others)

        def build() -> GraphPos:
            col = [-1] * (size * size)
            for x in range(p):
                if x == drop:
                    continue
                for y in range(p):
                    if y != drop and x != y:
                        col[x * size + y] = pos.c(x, y)
            for u, c in zip(move.targets, move.cols):
                col[z * size + u] = c
                col[u * size + z] = conv[c]
            for w, c in zip(others, assign):
                col[z * size + w] = c
                col[w * size + z] = conv[c]
            return GraphPos(size, tuple(col))

        def rec(k: int, doms: list[int]):
            if k == len(others):
                yield build()
                return
            w = others[k]
            dom = doms[k]
            for c in self._preference:
                if not (dom >> c) & 1:
                    continue
                assign[k] = c
                nd = list(doms)
                ok = True
                for t in range(k + 1, len(others)):
                    nd[t] &= table[c][pos.c(w, others[t])]
                    if not nd[t]:
                        ok = False
                        break
                if ok:
                    yield from rec(k + 1, nd)

        if all(doms):
            yield from rec(0, doms)

    def all_forall_moves(self, pos: GraphPos) -> list[tuple[GraphMove, Move]]:
        """Every legal Forall move of the network game, paired with its graph form."""
        if pos.size == 0:
            return [(GraphMove(atom=a), Move(a)) for a in range(self.at.n_atoms)]
        generic = NetworkGame(self.at, self.m, self.reuse, canonical=False)
        return [(self.move_from_network(pos, mv), mv) for mv in generic.forall_moves(self.network(pos))]

    def move_from_network(self, pos: GraphPos, move: Move) -> GraphMove:
        if move.tuple is None:
            return GraphMove(atom=move.atom)
        i, z = move.index, move.node
        target = move.tuple[:i] + (z,) + move.tuple[i + 1 :]
        atom = parse_atom(self.at, self.at.atoms[move.atom])
        block = dict(zip(_pairs(atom.size), atom.cols))
        cols = {}
        for j, u in enumerate(target):
            if u == z:
                continue
            a, b = atom.pattern[i], atom.pattern[j]
            c = block[(a, b)] if a < b else self.pal.conv[block[(b, a)]]
            cols[u] = c
        targets = tuple(sorted(cols))
        return GraphMove(-1, targets, tuple(cols[u] for u in targets), z)

    def network_move(self, pos: GraphPos, move: GraphMove) -> Move:
        if move.atom >= 0:
            return Move(move.atom)
        n = self.n
        targets = list(move.targets)
        x = (targets[0],) + tuple(targets) + (targets[-1],) * (n - 1 - len(targets))
        col = {}
        for u, c in zip(move.targets, move.cols):
            col[u] = c
        seq = (move.node,) + x[1:]

        def reader(a, b):
            if a == b:
                raise AssertionError
            if a == move.node:
                return col[b]
            if b == move.node:
                return self.pal.conv[col[a]]
            return pos.c(a, b)

        atom = _normal(self.pal, seq, reader, None).key(self.pal)
        return Move(self.at.index[atom], x, 0, move.node)
