"""Relation-algebra atom structures given by consistent triples, and basic matrices.

A triple ``(a, b, c)`` is consistent when ``c <= a;b``. Everything here works
against a small protocol (``atoms``, ``identity``, ``conv``, ``is_consistent``)
so that the split structures of :mod:`bao.blur` can reuse the matrix code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import AtomStructure, InvalidInput, Signature, diag_name


def peircean_transforms(t: tuple, conv) -> list[tuple]:
    a, b, c = t
    return [
        (a, b, c),
        (conv(b), conv(a), conv(c)),
        (conv(a), c, b),
        (c, conv(b), a),
        (conv(c), a, conv(b)),
        (b, conv(c), conv(a)),
    ]


@dataclass(frozen=True)
class RAAtomStructure:
    atoms: tuple[str, ...]
    identity: str
    converse: Mapping[str, str]
    forbidden: frozenset[tuple[str, str, str]]
    added: tuple[tuple[str, str, str], ...] = field(default=(), compare=False)

    def conv(self, a: str) -> str:
        return self.converse[a]

    def is_consistent(self, a: str, b: str, c: str) -> bool:
        e = self.identity
        if a == e:
            return b == c
        if b == e:
            return a == c
        if c == e:
            return b == self.converse[a]
        return (a, b, c) not in self.forbidden

    @property
    def diversity(self) -> tuple[str, ...]:
        return tuple(a for a in self.atoms if a != self.identity)

    def compose_atoms(self, a: str, b: str) -> frozenset[str]:
        return frozenset(c for c in self.atoms if self.is_consistent(a, b, c))

    def consistent_triples(self) -> list[tuple[str, str, str]]:
        return [t for t in itertools.product(self.atoms, repeat=3) if self.is_consistent(*t)]

    def is_symmetric(self) -> bool:
        return all(self.converse[a] == a for a in self.atoms)

    def to_atom_structure(self) -> AtomStructure:
        """The RA-signature atom structure whose complex algebra is Cm of this one."""
        idx = {a: k for k, a in enumerate(self.atoms)}
        n = len(self.atoms)
        comp = [[0] * n for _ in range(n)]
        for a, b, c in self.consistent_triples():
            comp[idx[a]][idx[b]] |= 1 << idx[c]
        conv = [1 << idx[self.converse[a]] for a in self.atoms]
        return AtomStructure(
            Signature("RA"),
            self.atoms,
            images={"Conv": conv},
            constants={"Id": 1 << idx[self.identity]},
            comp=comp,
            meta={"generator": "ra"},
        )

    def to_json(self) -> dict:
        return {
            "atoms": list(self.atoms),
            "identity": self.identity,
            "converse": dict(sorted(self.converse.items())),
            "forbidden": sorted(list(t) for t in self.forbidden),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> RAAtomStructure:
        try:
            return ra_from_forbidden(
                data["atoms"], data.get("converse"), [tuple(t) for t in data.get("forbidden", [])], data.get("identity", "Id")
            )
        except KeyError as exc:
            raise InvalidInput(f"malformed relation algebra: missing {exc}") from None


def ra_from_forbidden(
    atoms: Sequence[str],
    converse: Mapping[str, str] | None,
    forbidden: Iterable[tuple[str, str, str]],
    identity: str = "Id",
) -> RAAtomStructure:
    """Normalise a forbidden-triple presentation.

    Triples containing the identity are decided by the identity law and are
    not stored. The remaining forbidden set is closed under the six Peircean
    transforms; triples added by the closure are reported in ``added``.
    """
    atoms = tuple(atoms)
    if identity not in atoms:
        raise InvalidInput(f"identity atom {identity!r} missing")
    conv = dict(converse) if converse else {a: a for a in atoms}
    for a in atoms:
        if conv.get(a) not in atoms or conv[conv[a]] != a:
            raise InvalidInput(f"converse is not an involution at {a!r}")
    if conv[identity] != identity:
        raise InvalidInput("converse must fix the identity")
    given = set()
    for t in forbidden:
        t = tuple(t)
        if any(x not in atoms for x in t):
            raise InvalidInput(f"forbidden triple {t} uses unknown atoms")
        if identity in t:
            a, b, c = t
            required = (a == identity and b == c) or (b == identity and a == c) or (
                c == identity and b == conv[a] and identity not in (a, b)
            )
            if required:
                raise InvalidInput(f"triple {t} is forced consistent by the identity law")
            continue
        given.add(t)
    closed = set()
    for t in given:
        closed.update(peircean_transforms(t, conv.__getitem__))
    added = tuple(sorted(closed - given))
    return RAAtomStructure(atoms, identity, conv, frozenset(closed), added)


def maddux(k: int) -> RAAtomStructure:
    """k symmetric diversity atoms; only monochromatic triangles are forbidden."""
    if k < 1:
        raise InvalidInput("maddux needs k >= 1")
    names = tuple(f"a{i}" for i in range(1, k + 1))
    atoms = ("Id",) + names
    return RAAtomStructure(
        atoms, "Id", {a: a for a in atoms}, frozenset((x, x, x) for x in names)
    )


def redgreen(greens: int, reds: int) -> RAAtomStructure:
    """Atoms Id, g0^i (i < greens) and r_j (1 <= j <= reds), all symmetric.

    Forbidden: every all-green triple and every monochromatic red triple.
    """
    if greens < 1 or reds < 1:
        raise InvalidInput("redgreen needs at least one green and one red")
    gs = tuple(f"g0^{i}" for i in range(greens))
    rs = tuple(f"r{j}" for j in range(1, reds + 1))
    atoms = ("Id",) + gs + rs
    bad = set(itertools.product(gs, repeat=3)) | {(r, r, r) for r in rs}
    return RAAtomStructure(atoms, "Id", {a: a for a in atoms}, frozenset(bad))


# ---------------------------------------------------------------------------
# basic matrices

Matrix = tuple  # row-major tuple of n*n atom names


def matrix_dim(f: Matrix) -> int:
    n = int(round(len(f) ** 0.5))
    if n * n != len(f):
        raise InvalidInput("matrix is not square")
    return n


def matrix_entry(f: Matrix, x: int, y: int) -> str:
    return f[x * matrix_dim(f) + y]


def matrix_key(f: Matrix) -> str:
    n = matrix_dim(f)
    return "|".join(f[x * n + y] for x in range(n) for y in range(x + 1, n)) or "-"


def matrix_from_rows(rows: Sequence[Sequence[str]]) -> Matrix:
    return tuple(a for row in rows for a in row)


def matrix_rows(f: Matrix) -> list[list[str]]:
    n = matrix_dim(f)
    return [list(f[x * n : (x + 1) * n]) for x in range(n)]


def matrix_violation(f: Matrix, ra) -> str | None:
    """Why ``f`` is not a basic matrix over ``ra`` (None when it is)."""
    n = matrix_dim(f)
    for x in range(n):
        if f[x * n + x] != ra.identity:
            return f"f({x},{x}) is not the identity"
        for y in range(n):
            if f[x * n + y] not in ra.atoms:
                return f"f({x},{y}) is not an atom"
    for x, y, z in itertools.product(range(n), repeat=3):
        if not ra.is_consistent(f[x * n + z], f[z * n + y], f[x * n + y]):
            return f"f({x},{y}) is not below f({x},{z});f({z},{y})"
    return None


def basic_matrices(ra, n: int, atoms: Sequence[str] | None = None) -> list[Matrix]:
    """All n by n basic matrices, in lexicographic order of their upper triangle."""
    choices = list(atoms if atoms is not None else ra.atoms)
    pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
    out: list[Matrix] = []
    f = [None] * (n * n)
    for x in range(n):
        f[x * n + x] = ra.identity

    def ok_upto(x: int, y: int) -> bool:
        # every triangle whose three edges are now set and which involves (x, y)
        for z in range(n):
            if z in (x, y):
                continue
            xz, zy = f[x * n + z], f[z * n + y]
            if xz is None or zy is None:
                continue
            for p, q, r in itertools.permutations((x, y, z)):
                if not ra.is_consistent(f[p * n + r], f[r * n + q], f[p * n + q]):
                    return False
        return ra.is_consistent(f[x * n + y], f[y * n + x], ra.identity)

    def place(k: int):
        if k == len(pairs):
            out.append(tuple(f))
            return
        x, y = pairs[k]
        for a in choices:
            f[x * n + y] = a
            f[y * n + x] = ra.conv(a)
            if ok_upto(x, y):
                place(k + 1)
        f[x * n + y] = f[y * n + x] = None

    place(0)
    return out


def _off(f: Matrix, n: int, skip: set[int]) -> tuple:
    return tuple(f[x * n + y] for x in range(n) for y in range(n) if x not in skip and y not in skip)


def matrices_atom_structure(ra, mats: Sequence[Matrix], n: int, kind: str = "CA", meta=None) -> AtomStructure:
    """The CA_n (or QEA_n) atom structure on the given matrices."""
    sig = Signature(kind, n)
    keys = [matrix_key(f) for f in mats]
    index = {f: k for k, f in enumerate(mats)}
    images, constants = {}, {}
    for i in range(n):
        classes: dict[tuple, int] = {}
        for k, f in enumerate(mats):
            key = _off(f, n, {i})
            classes[key] = classes.get(key, 0) | (1 << k)
        images[f"T_{i}"] = [classes[_off(f, n, {i})] for f in mats]
    if sig.has_diagonals:
        for i, j in itertools.combinations(range(n), 2):
            constants[diag_name(i, j, n)] = sum(
                1 << k for k, f in enumerate(mats) if f[i * n + j] == ra.identity
            )

    def compose_map(f, tau):
        return tuple(f[tau[x] * n + tau[y]] for x in range(n) for y in range(n))

    if sig.has_replacements:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                tau = [j if x == i else x for x in range(n)]
                img = [0] * len(mats)
                for k, f in enumerate(mats):
                    img[index[compose_map(f, tau)]] |= 1 << k
                images[f"S_{i}_{j}"] = img
    if sig.has_transpositions:
        for i, j in itertools.combinations(range(n), 2):
            tau = list(range(n))
            tau[i], tau[j] = j, i
            img = [0] * len(mats)
            for k, f in enumerate(mats):
                img[index[compose_map(f, tau)]] |= 1 << k
            images[f"Sw_{i}_{j}"] = img
    info = {"generator": "mat", "n": n, "matrices": {matrix_key(f): f for f in mats}}
    info.update(meta or {})
    return AtomStructure(sig, keys, images, constants, meta=info)


def mat_n(ra, n: int, kind: str = "CA") -> AtomStructure:
    """Mat_n: all n-dimensional basic matrices as a cylindric atom structure."""
    return matrices_atom_structure(ra, basic_matrices(ra, n), n, kind)


@dataclass
class BasisReport:
    ok: bool
    failure: str | None = None
    witness: tuple | None = None

    def to_json(self) -> dict:
        w = self.witness
        if w is not None:
            w = [matrix_rows(x) if isinstance(x, tuple) and len(x) > 3 else x for x in w]
        return {"ok": self.ok, "failure": self.failure, "witness": w}


def is_cylindric_basis(mats: Sequence[Matrix], ra, n: int | None = None) -> BasisReport:
    """Check the triangle-witness and amalgamation properties of a matrix set.

    The first failing triple ``(a, b, c)`` (with ``a <= b;c`` but no matrix
    having ``f(0,1)=a, f(0,2)=b, f(2,1)=c``) is returned, scanning triples in
    sorted order; amalgamation failures return ``(f, g, x, y)``.
    """
    mats = [tuple(f) for f in mats]
    if n is None:
        n = matrix_dim(mats[0]) if mats else 3
    for k, f in enumerate(mats):
        if matrix_dim(f) != n:
            raise InvalidInput(f"matrix {k} has the wrong dimension")
        why = matrix_violation(f, ra)
        if why:
            raise InvalidInput(f"matrix {k} is not a basic matrix: {why}")
    if n < 3:
        raise InvalidInput("cylindric bases need dimension >= 3")
    have = {(f[0 * n + 1], f[0 * n + 2], f[2 * n + 1]) for f in mats}
    for a, b, c in itertools.product(sorted(ra.atoms), repeat=3):
        if ra.is_consistent(b, c, a) and (a, b, c) not in have:
            return BasisReport(False, "triangle", (a, b, c))
    for x, y in itertools.permutations(range(n), 2):
        both = {}
        for f in mats:
            both.setdefault(_off(f, n, {x, y}), []).append(f)
        joins = {(_off(h, n, {x}), _off(h, n, {y})) for h in mats}
        for group in both.values():
            for f in group:
                fx = _off(f, n, {x})
                for g in group:
                    if (fx, _off(g, n, {y})) not in joins:
                        return BasisReport(False, "amalgamation", (f, g, x, y))
    return BasisReport(True)
