"""Atom structures, complex algebras, axiom checkers and reducts.

Elements of a complex algebra are Python ints used as bitsets over the atom
indices, so Boolean operations are plain integer bit operations and every
operator is computed by OR-ing the images of the atoms in its argument.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

KINDS = ("Df", "Sc", "CA", "QA", "QEA", "RA")


class InvalidInput(ValueError):
    """Raised for malformed structures, signatures or elements."""


class Unsupported(Exception):
    """An operation that cannot be computed exactly on this representation."""


@dataclass(frozen=True, order=True)
class Signature:
    kind: str
    dim: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown signature kind {self.kind!r}")
        if self.kind != "RA" and self.dim < 1:
            raise InvalidInput("cylindric-like signatures need dimension >= 1")

    @property
    def has_diagonals(self) -> bool:
        return self.kind in ("CA", "QEA")

    @property
    def has_replacements(self) -> bool:
        return self.kind in ("Sc", "QA", "QEA")

    @property
    def has_transpositions(self) -> bool:
        return self.kind in ("QA", "QEA")

    def relation_names(self) -> tuple[str, ...]:
        """Names of the accessibility relations this signature needs."""
        if self.kind == "RA":
            return ("Comp", "Conv", "Id")
        n = self.dim
        names = [f"T_{i}" for i in range(n)]
        if self.has_diagonals:
            names += [diag_name(i, j, n) for i, j in itertools.combinations(range(n), 2)]
        if self.has_replacements:
            names += [f"S_{i}_{j}" for i in range(n) for j in range(n) if i != j]
        if self.has_transpositions:
            names += [f"Sw_{i}_{j}" for i, j in itertools.combinations(range(n), 2)]
        return tuple(names)

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


def diag_name(i: int, j: int, dim: int) -> str:
    i, j = min(i, j), max(i, j)
    return f"E_{i}{j}" if dim <= 10 else f"E_{i}_{j}"


def _parse_diag(name: str, dim: int) -> tuple[int, int]:
    body = name[2:]
    if "_" in body:
        a, b = body.split("_")
        return int(a), int(b)
    if dim > 10 or len(body) != 2:
        raise InvalidInput(f"ambiguous diagonal name {name!r}")
    return int(body[0]), int(body[1])


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class AtomStructure:
    """A finite atom structure.

    Unary relations are stored as ``images[name][b]``: the bitset of atoms ``a``
    with ``R(a, b)``, i.e. the operator applied to the singleton ``{b}``.
    Constants (diagonals, identity) are bitsets; composition is a table
    ``comp[b][c]`` of bitsets.
    """

    def __init__(
        self,
        signature: Signature,
        atoms: Sequence,
        images: Mapping[str, Sequence[int]] | None = None,
        constants: Mapping[str, int] | None = None,
        comp: Sequence[Sequence[int]] | None = None,
        meta: Mapping | None = None,
    ):
        self.signature = signature
        self.atoms = tuple(atoms)
        self.index = {a: k for k, a in enumerate(self.atoms)}
        if len(self.index) != len(self.atoms):
            raise InvalidInput("duplicate atom keys")
        self.images = {k: tuple(v) for k, v in (images or {}).items()}
        self.constants = dict(constants or {})
        self.comp = tuple(tuple(row) for row in comp) if comp is not None else None
        self.meta = dict(meta or {})
        self._preimages: dict[str, tuple[int, ...]] = {}
        self._validate()

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def full(self) -> int:
        return (1 << len(self.atoms)) - 1

    def _validate(self):
        top = self.full
        for name in self.signature.relation_names():
            if name == "Comp":
                if self.comp is None:
                    raise InvalidInput("RA structure needs a composition table")
            elif name == "Id" or name.startswith("E_"):
                if name not in self.constants:
                    raise InvalidInput(f"missing relation {name}")
            elif name not in self.images:
                raise InvalidInput(f"missing relation {name}")
        for name, img in self.images.items():
            if len(img) != len(self.atoms) or any(m & ~top for m in img):
                raise InvalidInput(f"relation {name} refers to unknown atoms")
        for name, m in self.constants.items():
            if m & ~top:
                raise InvalidInput(f"relation {name} refers to unknown atoms")
        if self.signature.kind == "QEA":
            for name in self.images:
                if name.startswith("Sw_"):
                    for m in self.preimage(name):
                        if popcount(m) != 1:
                            raise InvalidInput(f"{name} is not functional")

    def preimage(self, name: str) -> tuple[int, ...]:
        """``preimage(name)[a]`` is the bitset of ``b`` with ``R(a, b)``."""
        if name not in self._preimages:
            img = self.images[name]
            pre = [0] * len(self.atoms)
            for b, m in enumerate(img):
                for a in bits(m):
                    pre[a] |= 1 << b
            self._preimages[name] = tuple(pre)
        return self._preimages[name]

    def diagonal(self, i: int, j: int) -> int:
        if i == j:
            return self.full
        return self.constants[diag_name(i, j, self.signature.dim)]

    # -- serialisation -------------------------------------------------
    @classmethod
    def from_relations(cls, signature: Signature, atoms: Sequence, relations: Mapping, meta=None):
        """Build from relation tuples, JSON style: ``R(a0, a1, ...)`` as a list."""
        index = {a: k for k, a in enumerate(atoms)}

        def idx(a):
            try:
                return index[a]
            except KeyError:
                raise InvalidInput(f"unknown atom {a!r}") from None

        images, constants, comp = {}, {}, None
        n = len(atoms)
        for name, tuples in relations.items():
            if name == "Comp":
                comp = [[0] * n for _ in range(n)]
                for a0, a1, a2 in tuples:
                    comp[idx(a1)][idx(a2)] |= 1 << idx(a0)
            elif name == "Id" or name.startswith("E_"):
                m = 0
                for a in tuples:
                    m |= 1 << idx(a)
                key = name if name == "Id" else diag_name(*_parse_diag(name, signature.dim), signature.dim)
                constants[key] = m
            else:
                img = [0] * n
                for a0, a1 in tuples:
                    img[idx(a1)] |= 1 << idx(a0)
                images[name] = img
        return cls(signature, atoms, images, constants, comp, meta)

    def relations(self) -> dict[str, list]:
        out: dict[str, list] = {}
        at = self.atoms
        for name in self.signature.relation_names():
            if name == "Comp":
                out[name] = [
                    [at[a0], at[b], at[c]]
                    for b in range(len(at))
                    for c in range(len(at))
                    for a0 in bits(self.comp[b][c])
                ]
            elif name == "Id" or name.startswith("E_"):
                out[name] = [at[a] for a in bits(self.constants[name])]
            else:
                img = self.images[name]
                out[name] = [[at[a0], at[b]] for b in range(len(at)) for a0 in bits(img[b])]
        return out

    def to_json(self) -> dict:
        return {
            "signature": self.signature.to_json(),
            "atoms": list(self.atoms),
            "relations": self.relations(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> AtomStructure:
        try:
            sig = Signature(data["signature"]["kind"], int(data["signature"].get("dim", 0)))
            atoms = [_hashable(a) for a in data["atoms"]]
            rels = {k: [_hashable(t) for t in v] for k, v in data["relations"].items()}
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed atom structure: {exc}") from None
        return cls.from_relations(sig, atoms, rels)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _hashable(x):
    if isinstance(x, list):
        return tuple(_hashable(y) for y in x)
    return x


# ---------------------------------------------------------------------------
# complex algebras


class Algebra:
    """The complex algebra of a finite atom structure, or a subuniverse of it.

    ``carrier`` is None for the full powerset; neat reducts carry an explicit
    sorted list. ``dim`` may be smaller than the structure's dimension, which
    hides the operators with larger indices.
    """

    TABLE_LIMIT = 1 << 16

    def __init__(self, at: AtomStructure, signature: Signature | None = None, carrier: Sequence[int] | None = None):
        self.at = at
        self.signature = signature or at.signature
        self.carrier = None if carrier is None else tuple(carrier)
        self._tables: dict[str, list[int]] = {}

    # -- carrier -------------------------------------------------------
    @property
    def top(self) -> int:
        return self.at.full

    @property
    def zero(self) -> int:
        return 0

    @property
    def dim(self) -> int:
        return self.signature.dim

    def size(self) -> int:
        return len(self.carrier) if self.carrier is not None else 1 << self.at.n_atoms

    def elements(self) -> Iterable[int]:
        return self.carrier if self.carrier is not None else range(1 << self.at.n_atoms)

    def contains(self, x: int) -> bool:
        if self.carrier is None:
            return 0 <= x <= self.top
        return x in self._carrier_set()

    def _carrier_set(self):
        if not hasattr(self, "_cset"):
            self._cset = frozenset(self.carrier)
        return self._cset

    def atom(self, key) -> int:
        return 1 << self.at.index[key]

    def element(self, keys: Iterable) -> int:
        x = 0
        for k in keys:
            x |= self.atom(k)
        return x

    def keys(self, x: int) -> list:
        return [self.at.atoms[a] for a in bits(x)]

    # -- Boolean part --------------------------------------------------
    def join(self, x: int, y: int) -> int:
        return x | y

    def meet(self, x: int, y: int) -> int:
        return x & y

    def compl(self, x: int) -> int:
        return self.top & ~x

    def leq(self, x: int, y: int) -> bool:
        return x & ~y == 0

    # -- operators -----------------------------------------------------
    def _lift(self, name: str, x: int) -> int:
        table = self._tables.get(name)
        if table is not None:
            return table[x]
        img = self.at.images[name]
        out = 0
        for a in bits(x):
            out |= img[a]
        return out

    def tabulate(self):
        """Precompute every unary operator on the full powerset (small structures)."""
        if (1 << self.at.n_atoms) > self.TABLE_LIMIT:
            return
        for name, img in self.at.images.items():
            if name in self._tables:
                continue
            size = 1 << self.at.n_atoms
            table = [0] * size
            for x in range(1, size):
                low = x & -x
                table[x] = table[x ^ low] | img[low.bit_length() - 1]
            self._tables[name] = table

    def _need(self, cond: bool, what: str):
        if not cond:
            raise InvalidInput(f"{what} is not in the signature {self.signature.kind}_{self.signature.dim}")

    def cyl(self, i: int, x: int) -> int:
        self._need(self.signature.kind != "RA" and 0 <= i < self.dim, f"c_{i}")
        return self._lift(f"T_{i}", x)

    def diag(self, i: int, j: int) -> int:
        self._need(self.signature.has_diagonals and max(i, j) < self.dim, f"d_{i}{j}")
        return self.at.diagonal(i, j)

    def subst(self, i: int, j: int, x: int) -> int:
        """The replacement substitution s_[i|j]."""
        self._need(self.signature.has_replacements and max(i, j) < self.dim, f"s_[{i}|{j}]")
        if i == j:
            return x
        return self._lift(f"S_{i}_{j}", x)

    def swap(self, i: int, j: int, x: int) -> int:
        """The transposition substitution s_[i,j]."""
        self._need(self.signature.has_transpositions and max(i, j) < self.dim, f"s_[{i},{j}]")
        if i == j:
            return x
        i, j = min(i, j), max(i, j)
        return self._lift(f"Sw_{i}_{j}", x)

    def compose(self, x: int, y: int) -> int:
        self._need(self.signature.kind == "RA", "composition")
        comp = self.at.comp
        out = 0
        ys = list(bits(y))
        for a in bits(x):
            row = comp[a]
            for b in ys:
                out |= row[b]
        return out

    def converse(self, x: int) -> int:
        self._need(self.signature.kind == "RA", "converse")
        return self._lift("Conv", x)

    @property
    def identity(self) -> int:
        self._need(self.signature.kind == "RA", "identity")
        return self.at.constants["Id"]


def cm(at: AtomStructure) -> Algebra:
    """The complex algebra of ``at``: all subsets, operators lifted pointwise."""
    alg = Algebra(at)
    alg.tabulate()
    return alg


def atom_structure_of(alg: Algebra) -> AtomStructure:
    """Recover the atom structure of a full complex algebra from its operators."""
    if alg.carrier is not None:
        raise Unsupported("atoms of a proper subuniverse are not singletons in general")
    at = alg.at
    n = at.n_atoms
    sig = alg.signature
    images, constants, comp = {}, {}, None
    for name in sig.relation_names():
        if name == "Comp":
            comp = [[alg.compose(1 << b, 1 << c) for c in range(n)] for b in range(n)]
        elif name == "Id":
            constants[name] = alg.identity
        elif name.startswith("E_"):
            i, j = _parse_diag(name, sig.dim)
            constants[name] = alg.diag(i, j)
        elif name == "Conv":
            images[name] = [alg.converse(1 << b) for b in range(n)]
        elif name.startswith("T_"):
            images[name] = [alg.cyl(int(name[2:]), 1 << b) for b in range(n)]
        elif name.startswith("Sw_"):
            i, j = map(int, name[3:].split("_"))
            images[name] = [alg.swap(i, j, 1 << b) for b in range(n)]
        elif name.startswith("S_"):
            i, j = map(int, name[2:].split("_"))
            images[name] = [alg.subst(i, j, 1 << b) for b in range(n)]
    return AtomStructure(sig, at.atoms, images, constants, comp)


def same_structure(a: AtomStructure, b: AtomStructure) -> bool:
    """Equality of atom structures under the identity map on atom keys."""
    if a.signature != b.signature or set(a.atoms) != set(b.atoms):
        return False
    ra, rb = a.relations(), b.relations()
    return all(
        {json.dumps(t, sort_keys=True) for t in ra[k]} == {json.dumps(t, sort_keys=True) for t in rb[k]}
        for k in ra
    )


# ---------------------------------------------------------------------------
# concrete structures


def cartesian_atom_structure(n: int, u: int, kind: str = "QEA") -> AtomStructure:
    """Atoms are the points of ``^n U`` for ``U = {0..u-1}``.

    Cylindrifier i relates points agreeing off coordinate i, diagonal ij holds
    the points with equal i and j coordinates, and the substitutions act by
    precomposition with the replacement or transposition map.
    """
    if n < 1 or u < 1:
        raise InvalidInput("cartesian structure needs n >= 1 and u >= 1")
    sig = Signature(kind, n)
    points = list(itertools.product(range(u), repeat=n))
    keys = [".".join(map(str, p)) for p in points]
    index = {p: k for k, p in enumerate(points)}
    images, constants = {}, {}
    for i in range(n):
        img = []
        for p in points:
            m = 0
            for v in range(u):
                m |= 1 << index[p[:i] + (v,) + p[i + 1 :]]
            img.append(m)
        images[f"T_{i}"] = img
    if sig.has_diagonals:
        for i, j in itertools.combinations(range(n), 2):
            constants[diag_name(i, j, n)] = sum(1 << k for k, p in enumerate(points) if p[i] == p[j])
    if sig.has_replacements:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                # s in S(X) iff s o [i|j] in X
                img = [0] * len(points)
                for k, p in enumerate(points):
                    q = p[:i] + (p[j],) + p[i + 1 :]
                    img[index[q]] |= 1 << k
                images[f"S_{i}_{j}"] = img
    if sig.has_transpositions:
        for i, j in itertools.combinations(range(n), 2):
            img = [0] * len(points)
            for k, p in enumerate(points):
                q = list(p)
                q[i], q[j] = q[j], q[i]
                img[index[tuple(q)]] |= 1 << k
            images[f"Sw_{i}_{j}"] = img
    return AtomStructure(sig, keys, images, constants, meta={"generator": "cartesian", "n": n, "u": u})


# ---------------------------------------------------------------------------
# axiom checking


@dataclass
class Violation:
    axiom: str
    indices: tuple
    elements: tuple

    def to_json(self, alg: Algebra) -> dict:
        return {
            "axiom": self.axiom,
            "indices": list(self.indices),
            "elements": [alg.keys(x) for x in self.elements],
        }


@dataclass
class AxiomReport:
    passed: bool
    violations: list[Violation] = field(default_factory=list)
    mode: str = "exhaustive"
    checked: dict[str, int] = field(default_factory=dict)

    @property
    def sampled(self) -> bool:
        return self.mode != "exhaustive"

    def to_json(self, alg: Algebra) -> dict:
        return {
            "passed": self.passed,
            "mode": self.mode if self.mode == "exhaustive" else "sampled, not exhaustive",
            "checked": dict(sorted(self.checked.items())),
            "violations": [v.to_json(alg) for v in self.violations],
        }


class _TestSet:
    """Element tuples to test: everything when small, generators plus samples otherwise."""

    def __init__(self, alg: Algebra, element_limit: int, tuple_limit: int, seed: int, samples: int):
        self.alg = alg
        size = alg.size()
        self.exhaustive = size <= element_limit
        self.tuple_limit = tuple_limit
        self.samples = samples
        self.rng = random.Random(seed)
        if self.exhaustive:
            self.pool = list(alg.elements())
        else:
            n = alg.at.n_atoms
            atoms = [1 << a for a in range(n)]
            pool = {0, alg.top, *atoms}
            for r in (2, 3):
                for combo in itertools.combinations(atoms, r):
                    pool.add(sum(combo))
            self.pool = sorted(x for x in pool if alg.contains(x))
        self.downgraded = not self.exhaustive

    def tuples(self, arity: int) -> Iterable[tuple[int, ...]]:
        if len(self.pool) ** arity <= self.tuple_limit:
            return itertools.product(self.pool, repeat=arity)
        self.downgraded = True
        rng = random.Random(self.rng.random())
        return [tuple(rng.choice(self.pool) for _ in range(arity)) for _ in range(self.samples)]


CA_AXIOMS = ("C1", "C2", "C3", "C4", "C5", "C6", "C7")


def check_ca_axioms(
    alg: Algebra,
    n: int | None = None,
    *,
    element_limit: int = 1 << 20,
    tuple_limit: int = 1 << 22,
    samples: int = 20000,
    seed: int = 0,
    max_violations: int = 20,
) -> AxiomReport:
    """Check C1-C7 (C1-C4 for signatures without diagonals)."""
    n = alg.dim if n is None else n
    if alg.signature.kind == "RA":
        raise InvalidInput("relation algebras have no cylindrifiers")
    diagonals = alg.signature.has_diagonals
    ts = _TestSet(alg, element_limit, tuple_limit, seed, samples)
    viol: list[Violation] = []
    checked: dict[str, int] = {}

    def bad(axiom, idx, els):
        if len(viol) < max_violations:
            viol.append(Violation(axiom, idx, els))

    def count(axiom):
        checked[axiom] = checked.get(axiom, 0) + 1

    top, c = alg.top, alg.cyl
    for i in range(n):
        count("C1")
        if c(i, 0) != 0:
            bad("C1", (i,), (0,))
    for x in ts.tuples(1):
        x = x[0]
        for i in range(n):
            count("C2")
            if not alg.leq(x, c(i, x)):
                bad("C2", (i,), (x,))
            for j in range(n):
                count("C4")
                if c(i, c(j, x)) != c(j, c(i, x)):
                    bad("C4", (i, j), (x,))
    for x, y in ts.tuples(2):
        for i in range(n):
            count("C3")
            cy = c(i, y)
            if c(i, x & cy) != c(i, x) & cy:
                bad("C3", (i,), (x, y))
    if diagonals:
        for i in range(n):
            count("C5")
            if alg.diag(i, i) != top:
                bad("C5", (i,), ())
        for i in range(n):
            for j in range(n):
                for mu in range(n):
                    if i in (j, mu):
                        continue
                    count("C6")
                    if alg.diag(j, mu) != c(i, alg.diag(j, i) & alg.diag(i, mu)):
                        bad("C6", (i, j, mu), ())
        for x in ts.tuples(1):
            x = x[0]
            nx = alg.compl(x)
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    count("C7")
                    d = alg.diag(i, j)
                    if c(i, d & x) & c(i, d & nx):
                        bad("C7", (i, j), (x,))
    mode = "sampled" if ts.downgraded else "exhaustive"
    return AxiomReport(not viol, viol, mode, checked)


RA_LAWS = (
    "associativity",
    "right-distributivity",
    "right-identity",
    "converse-involution",
    "converse-additivity",
    "converse-antitone",
    "triangle",
)


def check_ra_laws(
    alg: Algebra,
    *,
    element_limit: int = 1 << 20,
    tuple_limit: int = 1 << 22,
    samples: int = 20000,
    seed: int = 0,
    max_violations: int = 20,
) -> AxiomReport:
    """Check the finite equational basis listed in ``RA_LAWS``.

    converse-antitone is the law (x;y)^ = y^;x^ and triangle is the Peircean
    inequality x^;-(x;y) <= -y.
    """
    if alg.signature.kind != "RA":
        raise InvalidInput("RA laws need the relation algebra signature")
    ts = _TestSet(alg, element_limit, tuple_limit, seed, samples)
    comp, conv, neg = alg.compose, alg.converse, alg.compl
    ident = alg.identity
    viol: list[Violation] = []
    checked: dict[str, int] = {}

    def record(law, ok, els):
        checked[law] = checked.get(law, 0) + 1
        if not ok and len(viol) < max_violations:
            viol.append(Violation(law, (), els))

    for (x,) in ts.tuples(1):
        record("right-identity", comp(x, ident) == x, (x,))
        record("converse-involution", conv(conv(x)) == x, (x,))
    for x, y in ts.tuples(2):
        record("converse-additivity", conv(x | y) == conv(x) | conv(y), (x, y))
        record("converse-antitone", conv(comp(x, y)) == comp(conv(y), conv(x)), (x, y))
        record("triangle", alg.leq(comp(conv(x), neg(comp(x, y))), neg(y)), (x, y))
    for x, y, z in ts.tuples(3):
        record("associativity", comp(comp(x, y), z) == comp(x, comp(y, z)), (x, y, z))
        record("right-distributivity", comp(x | y, z) == comp(x, z) | comp(y, z), (x, y, z))
    mode = "sampled" if ts.downgraded else "exhaustive"
    return AxiomReport(not viol, viol, mode, checked)


# ---------------------------------------------------------------------------
# reducts


def dimension_set(x: int, alg: Algebra) -> frozenset[int]:
    return frozenset(i for i in range(alg.dim) if alg.cyl(i, x) != x)


def neat_reduct(alg: Algebra, n: int) -> Algebra:
    """Elements whose dimension set lies inside ``{0..n-1}``, with operators of index < n."""
    if n > alg.dim or n < 1:
        raise InvalidInput(f"cannot take the {n}-neat reduct of a {alg.dim}-dimensional algebra")
    if n == alg.dim:
        return alg
    carrier = [x for x in alg.elements() if all(alg.cyl(i, x) == x for i in range(n, alg.dim))]
    red = Algebra(alg.at, Signature(alg.signature.kind, n), carrier)
    red._tables = alg._tables
    _assert_closed(red)
    return red


def _assert_closed(alg: Algebra):
    members = alg._carrier_set()
    sig = alg.signature
    unary: list[Callable[[int], int]] = [lambda x, i=i: alg.cyl(i, x) for i in range(sig.dim)]
    pairs = [(i, j) for i in range(sig.dim) for j in range(sig.dim) if i != j]
    if sig.has_replacements:
        unary += [lambda x, i=i, j=j: alg.subst(i, j, x) for i, j in pairs]
    if sig.has_transpositions:
        unary += [lambda x, i=i, j=j: alg.swap(i, j, x) for i, j in pairs]
    if sig.has_diagonals:
        for i, j in pairs:
            if alg.diag(i, j) not in members:
                raise AssertionError(f"neat reduct misses d_{i}{j}")
    for x in alg.carrier:
        if alg.compl(x) not in members:
            raise AssertionError("neat reduct not closed under complement")
        for f in unary:
            if f(x) not in members:
                raise AssertionError("neat reduct not closed under an operator")


_OPERATORS = {
    "Df": {"c"},
    "Sc": {"c", "s"},
    "CA": {"c", "d"},
    "QA": {"c", "s", "p"},
    "QEA": {"c", "d", "s", "p"},
    "RA": {"comp", "conv", "id"},
}


def operators_of(kind: str) -> frozenset[str]:
    return frozenset(_OPERATORS[kind])


def reduct(alg: Algebra, kind: str) -> Algebra:
    """Forget operators: same carrier, smaller signature."""
    if kind not in _OPERATORS:
        raise InvalidInput(f"unknown signature kind {kind!r}")
    if not _OPERATORS[kind] <= _OPERATORS[alg.signature.kind]:
        raise InvalidInput(f"{alg.signature.kind} has no {kind} reduct")
    out = Algebra(alg.at, Signature(kind, alg.dim), alg.carrier)
    out._tables = alg._tables
    return out
