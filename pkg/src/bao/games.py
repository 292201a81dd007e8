"""Atomic networks, the bounded atomic games, and basis/hyperbasis checkers.

Positions are networks whose nodes are always ``0..p-1``. Round 0 is the
atom-choice round; every later round is a cylindrifier move ``(x, i, b)``
answered by a network that adds or overwrites one node. A fixed round bound
``k`` counts every round, the atom-choice round included.
"""

from __future__ import annotations

import itertools
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .core import AtomStructure, InvalidInput, bits, diag_name

EXISTS = "Exists"
FORALL = "Forall"
UNDETERMINED = "UndeterminedAtBound"

DEFAULT_BUDGET = 2_000_000


# ---------------------------------------------------------------------------
# networks


@dataclass(frozen=True, eq=True)
class Network:
    """Labels map every n-tuple over ``nodes`` to an atom index."""

    nodes: tuple[int, ...]
    labels: Mapping[tuple[int, ...], int] = field(hash=False)

    @property
    def size(self) -> int:
        return len(self.nodes)

    @classmethod
    def from_keys(cls, at: AtomStructure, nodes: Iterable[int], labels: Mapping[tuple, object]) -> Network:
        out = {}
        for t, key in labels.items():
            if key not in at.index:
                raise InvalidInput(f"label {key!r} at {tuple(t)} is not an atom")
            out[tuple(t)] = at.index[key]
        return cls(tuple(sorted(nodes)), out)

    def to_json(self, at: AtomStructure) -> dict:
        return {
            "nodes": list(self.nodes),
            "labels": [[list(t), at.atoms[a]] for t, a in sorted(self.labels.items())],
        }

    @classmethod
    def from_json(cls, at: AtomStructure, data: Mapping) -> Network:
        try:
            labels = {tuple(t): key for t, key in data["labels"]}
            return cls.from_keys(at, data["nodes"], labels)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed network: {exc}") from None

    def restrict(self, keep: Iterable[int]) -> Network:
        keep = set(keep)
        return Network(
            tuple(v for v in self.nodes if v in keep),
            {t: a for t, a in self.labels.items() if all(v in keep for v in t)},
        )

    def relabel(self, mapping: Mapping[int, int]) -> Network:
        return Network(
            tuple(sorted(mapping[v] for v in self.nodes)),
            {tuple(mapping[v] for v in t): a for t, a in self.labels.items()},
        )


@dataclass
class NetworkCheck:
    ok: bool
    violations: list[tuple] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _diagonal_masks(at: AtomStructure) -> dict[tuple[int, int], int]:
    n = at.signature.dim
    if not at.signature.has_diagonals:
        return {}
    return {(i, j): at.diagonal(i, j) for i, j in itertools.combinations(range(n), 2)}


def _substitution_maps(n: int, sig) -> list[tuple[str, tuple[int, ...]]]:
    """(relation name, tau) pairs; the condition is N(x) <= s_tau N(x o tau)."""
    out = []
    if sig.has_replacements:
        for i in range(n):
            for j in range(n):
                if i != j:
                    out.append((f"S_{i}_{j}", tuple(j if x == i else x for x in range(n))))
    if sig.has_transpositions:
        for i, j in itertools.combinations(range(n), 2):
            tau = list(range(n))
            tau[i], tau[j] = j, i
            out.append((f"Sw_{i}_{j}", tuple(tau)))
    return out


def validate_network(net: Network, at: AtomStructure, weak_diagonals: bool = False) -> NetworkCheck:
    """Check the network conditions that apply to the structure's signature.

    (i) ``N(x) <= d_ij`` iff ``x_i = x_j`` (only the forward direction when
    ``weak_diagonals``); (ii) ``x =_i y`` implies ``N(x) <= c_i N(y)``;
    (iii) the substitution condition for each replacement and transposition.
    """
    n = at.signature.dim
    labels = net.labels
    for t in itertools.product(net.nodes, repeat=n):
        if t not in labels:
            raise InvalidInput(f"network has no label at {t}")
        if not 0 <= labels[t] < at.n_atoms:
            raise InvalidInput(f"label at {t} is not an atom")
    violations: list[tuple] = []
    diags = _diagonal_masks(at)
    for t, a in sorted(labels.items()):
        for (i, j), mask in diags.items():
            below = (mask >> a) & 1 == 1
            equal = t[i] == t[j]
            if (equal and not below) or (below and not equal and not weak_diagonals):
                violations.append(("(i)", t, diag_name(i, j, n)))
        for i in range(n):
            img = at.images[f"T_{i}"]
            for v in net.nodes:
                u = t[:i] + (v,) + t[i + 1 :]
                if not (img[labels[u]] >> a) & 1:
                    violations.append(("(ii)", t, i, u))
        for name, tau in _substitution_maps(n, at.signature):
            u = tuple(t[x] for x in tau)
            if not (at.images[name][labels[u]] >> a) & 1:
                violations.append(("(iii)", t, name, u))
    return NetworkCheck(not violations, violations)


def kernel_tuple(at: AtomStructure, a: int) -> tuple[int, ...]:
    """The first-occurrence node pattern an atom demands of its own tuple."""
    n = at.signature.dim
    if not at.signature.has_diagonals:
        return tuple(range(n))
    out: list[int] = []
    fresh = 0
    for j in range(n):
        for i in range(j):
            if (at.diagonal(i, j) >> a) & 1:
                out.append(out[i])
                break
        else:
            out.append(fresh)
            fresh += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# extension as a constraint problem


class _Plan:
    """Constraint structure for extending nodes ``0..p_old-1`` to ``0..p_new-1``.

    Variables are the tuples that mention a new node. Each constraint is
    stored as ``dom[target] &= table[value of source]``.
    """

    def __init__(self, at: AtomStructure, p_old: int, p_new: int):
        n = at.signature.dim
        self.vars = [t for t in itertools.product(range(p_new), repeat=n) if max(t) >= p_old]
        self.index = {t: k for k, t in enumerate(self.vars)}
        full = at.full
        static = [full] * len(self.vars)
        unary: list[tuple[int, tuple, Sequence[int]]] = []
        adj: list[list[tuple[int, Sequence[int]]]] = [[] for _ in self.vars]
        diags = _diagonal_masks(at)
        subs = _substitution_maps(n, at.signature)

        def self_mask(img):
            return sum(1 << a for a in range(at.n_atoms) if (img[a] >> a) & 1)

        def relate(k, u, img, pre):
            # label(t) in img[label(u)]
            if u == self.vars[k]:
                static[k] &= self_mask(img)
            elif u in self.index:
                ku = self.index[u]
                adj[ku].append((k, img))
                adj[k].append((ku, pre))
            else:
                unary.append((k, u, img))

        for k, t in enumerate(self.vars):
            for (i, j), mask in diags.items():
                static[k] &= mask if t[i] == t[j] else full & ~mask
            for i in range(n):
                name = f"T_{i}"
                img, pre = at.images[name], at.preimage(name)
                for v in range(p_new):
                    if v == t[i]:
                        continue
                    u = t[:i] + (v,) + t[i + 1 :]
                    relate(k, u, img, pre)
                    if u not in self.index:
                        unary.append((k, u, pre))
            for name, tau in subs:
                u = tuple(t[x] for x in tau)
                relate(k, u, at.images[name], at.preimage(name))
        self.static = static
        self.unary = unary
        self.adj = [tuple(a) for a in adj]


def _solutions(dom: list[int], adj) -> Iterator[list[int]]:
    assigned = [False] * len(dom)
    left = len(dom)

    def rec(dom: list[int], left: int):
        if left == 0:
            yield dom
            return
        best, best_count = -1, None
        for k, d in enumerate(dom):
            if not assigned[k]:
                c = d.bit_count()
                if best_count is None or c < best_count:
                    best, best_count = k, c
                    if c <= 1:
                        break
        if best_count == 0:
            return
        assigned[best] = True
        for val in bits(dom[best]):
            new = list(dom)
            new[best] = 1 << val
            ok = True
            for target, table in adj[best]:
                if not assigned[target]:
                    m = new[target] & table[val]
                    if not m:
                        ok = False
                        break
                    new[target] = m
                elif not (new[target] & table[val]):
                    ok = False
                    break
            if ok:
                yield from rec(new, left - 1)
        assigned[best] = False

    if any(d == 0 for d in dom):
        return iter(())
    return rec(list(dom), left)


class Extender:
    """Enumerates every network extension that fixes some new labels."""

    def __init__(self, at: AtomStructure):
        self.at = at
        self._plans: dict[tuple[int, int], _Plan] = {}
        self._lock = threading.Lock()

    def plan(self, p_old: int, p_new: int) -> _Plan:
        key = (p_old, p_new)
        plan = self._plans.get(key)
        if plan is None:
            plan = _Plan(self.at, p_old, p_new)
            with self._lock:
                self._plans.setdefault(key, plan)
        return plan

    def extensions(self, old: Network, p_new: int, fixed: Mapping[tuple, int]) -> Iterator[Network]:
        p_old = len(old.nodes)
        plan = self.plan(p_old, p_new)
        dom = list(plan.static)
        labels = old.labels
        for k, u, table in plan.unary:
            dom[k] &= table[labels[u]]
        for t, b in fixed.items():
            dom[plan.index[t]] &= 1 << b
        nodes = tuple(range(p_new))
        for sol in _solutions(dom, plan.adj):
            new = dict(labels)
            for k, t in enumerate(plan.vars):
                new[t] = sol[k].bit_length() - 1
            yield Network(nodes, new)


# ---------------------------------------------------------------------------
# canonical forms


def network_key(net: Network, n: int, canonical: bool = True, perm_limit: int = 5040) -> tuple:
    """A key equal for isomorphic networks (under node renaming).

    Nodes are partitioned by an invariant and only orderings respecting the
    sorted partition are tried. Beyond ``perm_limit`` orderings a single
    ordering is used: the key stays sound but merges fewer positions.
    """
    p = len(net.nodes)
    labels = net.labels
    tuples = list(itertools.product(range(p), repeat=n))
    if not canonical:
        return (p, tuple(labels[t] for t in tuples))
    inv = {}
    for v in range(p):
        counts: dict[tuple, int] = {}
        for t in tuples:
            if v in t:
                sig = (tuple(x == v for x in t), labels[t])
                counts[sig] = counts.get(sig, 0) + 1
        inv[v] = (labels[(v,) * n], tuple(sorted(counts.items())))
    groups: dict[tuple, list[int]] = {}
    for v in range(p):
        groups.setdefault(inv[v], []).append(v)
    classes = [groups[k] for k in sorted(groups)]
    total = math.prod(math.factorial(len(c)) for c in classes)
    head = tuple(sorted(inv.values()))
    if total > perm_limit:
        order = [v for c in classes for v in c]
        return (p, head, tuple(labels[tuple(order[x] for x in t)] for t in tuples))
    best = None
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for c in parts for v in c]
        seq = tuple(labels[tuple(order[x] for x in t)] for t in tuples)
        if best is None or seq < best:
            best = seq
    return (p, head, best)


# ---------------------------------------------------------------------------
# the generic game


@dataclass(frozen=True)
class Move:
    """A cylindrifier move ``(x, i, b)`` placing the new node at ``node``.

    ``tuple`` is None for the atom-choice round.
    """

    atom: int
    tuple: tuple[int, ...] | None = None
    index: int = 0
    node: int = 0

    def to_json(self, at: AtomStructure) -> dict:
        if self.tuple is None:
            return {"atom": at.atoms[self.atom]}
        return {"tuple": list(self.tuple), "index": self.index, "atom": at.atoms[self.atom], "node": self.node}

    @classmethod
    def from_json(cls, at: AtomStructure, data: Mapping) -> Move:
        if data.get("atom") not in at.index:
            raise InvalidInput(f"move names unknown atom {data.get('atom')!r}")
        a = at.index[data["atom"]]
        if "tuple" not in data:
            return cls(a)
        return cls(a, tuple(data["tuple"]), int(data["index"]), int(data["node"]))


class NetworkGame:
    """The game on atomic networks for any finite atom structure."""

    def __init__(self, at: AtomStructure, nodes: int, reuse: bool, canonical: bool = True):
        self.at = at
        self.n = at.signature.dim
        self.m = nodes
        self.reuse = reuse
        self.canonical = canonical
        self.extender = Extender(at)

    def initial(self) -> Network:
        return Network((), {})

    def key(self, pos: Network) -> tuple:
        return network_key(pos, self.n, self.canonical)

    def forall_moves(self, pos: Network, rounds_left: int | None = None) -> list[Move]:
        at, n = self.at, self.n
        if not pos.nodes:
            return [Move(a) for a in range(at.n_atoms)]
        p = len(pos.nodes)
        labels = pos.labels
        moves: list[Move] = []
        seen = set()
        for x in itertools.product(range(p), repeat=n):
            for i in range(n):
                off = x[:i] + (-1,) + x[i + 1 :]
                img = at.images[f"T_{i}"][labels[x]]
                for b in bits(img):
                    if (off, i, b) in seen:
                        continue
                    seen.add((off, i, b))
                    if any(labels[x[:i] + (w,) + x[i + 1 :]] == b for w in range(p)):
                        continue
                    pinned = {x[j] for j in range(n) if j != i}
                    targets = [p] if p < self.m else []
                    if self.reuse:
                        targets += [w for w in range(p) if w not in pinned]
                    for z in targets:
                        moves.append(Move(b, x, i, z))
        return moves

    def responses(self, pos: Network, move: Move) -> Iterator[Network]:
        at = self.at
        if move.tuple is None:
            kern = kernel_tuple(at, move.atom)
            size = max(kern) + 1
            if size > self.m:
                return iter(())
            return self.extender.extensions(pos, size, {kern: move.atom})
        p = len(pos.nodes)
        z = move.node
        x = move.tuple
        target = x[: move.index] + (z,) + x[move.index + 1 :]
        if z == p:
            return self.extender.extensions(pos, p + 1, {target: move.atom})
        # overwrite node z: move it to the last slot, extend, move it back
        swap = {v: v for v in range(p)}
        swap[z], swap[p - 1] = p - 1, z
        base = pos.restrict(v for v in range(p) if v != z).relabel(swap)
        fixed = {tuple(swap[v] for v in target): move.atom}

        def gen():
            for net in self.extender.extensions(base, p, fixed):
                yield net.relabel(swap)

        return gen()

    def network(self, pos: Network) -> Network:
        return pos

    def network_move(self, pos: Network, move: Move) -> Move:
        return move


# ---------------------------------------------------------------------------
# solver


class BudgetExceeded(Exception):
    pass


class _Stopped(Exception):
    pass


def thread_count(threads: int | None = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    try:
        return max(1, int(os.environ.get("BAO_THREADS", "1")))
    except ValueError:
        return 1


class Solver:
    """Memoised minimax for the bounded game.

    The memo stores, per canonical position, the largest round count known
    to be survivable by Exists and the smallest known to be won by Forall.
    """

    def __init__(self, game, budget: int = DEFAULT_BUDGET):
        self.game = game
        self.budget = budget
        self.level_cap: int | None = None
        self.memo: dict[tuple, list] = {}
        self.explored = 0
        self._lock = threading.Lock()
        self._stop = threading.Event()

    def _tick(self):
        if self._stop.is_set():
            raise _Stopped()
        with self._lock:
            self.explored += 1
            if self.explored > self.budget or (self.level_cap is not None and self.explored > self.level_cap):
                raise BudgetExceeded(self.explored)

    def forall_wins(self, pos, rounds: int) -> bool:
        if rounds <= 0:
            return False
        key = self.game.key(pos)
        entry = self.memo.get(key)
        if entry is not None:
            if rounds <= entry[0]:
                return False
            if entry[1] is not None and rounds >= entry[1]:
                return True
        self._tick()
        if rounds == 1 and hasattr(self.game, "wins_in_one"):
            win = self.game.wins_in_one(pos)
        else:
            win = any(self.move_wins(pos, mv, rounds) for mv in self.game.forall_moves(pos, rounds))
        with self._lock:
            entry = self.memo.setdefault(key, [0, None])
            if win:
                entry[1] = rounds if entry[1] is None else min(entry[1], rounds)
            else:
                entry[0] = max(entry[0], rounds)
        return win

    def move_wins(self, pos, move, rounds: int) -> bool:
        return all(self.forall_wins(nxt, rounds - 1) for nxt in self.game.responses(pos, move))

    def root_wins(self, rounds: int, threads: int = 1) -> bool:
        root = self.game.initial()
        if rounds <= 0:
            return False
        moves = self.game.forall_moves(root, rounds)
        if threads <= 1:
            return any(self.move_wins(root, mv, rounds) for mv in moves)
        self._stop.clear()

        def task(mv):
            try:
                return self.move_wins(root, mv, rounds)
            except _Stopped:
                return None

        try:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [pool.submit(task, mv) for mv in moves]
                for fut in as_completed(futures):
                    if fut.result():
                        # the remaining workers only matter if nothing wins
                        self._stop.set()
                        return True
            return False
        finally:
            self._stop.clear()


@dataclass
class GameOutcome:
    winner: str
    rounds_used: int | None
    nodes: int
    rounds: int
    reuse: bool
    explored: int
    backend: str
    strategy: dict | None = None
    note: str | None = None
    skipped: list[int] = field(default_factory=list)

    def to_json(self, include_strategy: bool = True) -> dict:
        out = {
            "winner": self.winner,
            "rounds_used": self.rounds_used,
            "nodes": self.nodes,
            "rounds": self.rounds,
            "reuse": self.reuse,
            "explored": self.explored,
            "backend": self.backend,
        }
        if self.skipped:
            out["skipped"] = list(self.skipped)
        if self.note:
            out["note"] = self.note
        if include_strategy:
            out["strategy"] = self.strategy
        return out


def make_game(at: AtomStructure, nodes: int, reuse: bool, backend: str = "auto", canonical: bool = True):
    if backend == "auto":
        backend = "rainbow" if at.meta.get("generator") == "rainbow" else "network"
    if backend == "rainbow":
        from .rainbow import RainbowGame

        return RainbowGame(at, nodes, reuse, canonical=canonical), "rainbow"
    if backend == "network":
        return NetworkGame(at, nodes, reuse, canonical=canonical), "network"
    raise InvalidInput(f"unknown game backend {backend!r}")


def solve_game(
    at: AtomStructure,
    nodes: int,
    rounds: int,
    reuse: bool = False,
    *,
    budget: int = DEFAULT_BUDGET,
    level_budget: int | None = None,
    threads: int | None = None,
    canonical: bool = True,
    backend: str = "auto",
    strategy: bool = True,
    strategy_limit: int = 20000,
) -> GameOutcome:
    """Solve the game with ``nodes`` nodes and ``rounds`` rounds by iterative deepening.

    Each round count from 1 up is tried in turn. A round count whose search
    explores more than ``level_budget`` positions is recorded in
    ``skipped`` and deepening moves on; a later Forall win is then exact but
    not known to be the least. ``budget`` caps the whole run.
    """
    if nodes < 0 or rounds < 0:
        raise InvalidInput("node and round bounds must be non-negative")
    game, name = make_game(at, nodes, reuse, backend, canonical)
    solver = Solver(game, budget)
    workers = thread_count(threads)
    winner, used = EXISTS, rounds
    skipped: list[int] = []
    try:
        for k in range(1, rounds + 1):
            solver.level_cap = None if level_budget is None or k == rounds else solver.explored + level_budget
            try:
                won = solver.root_wins(k, workers)
            except BudgetExceeded:
                if solver.level_cap is None or solver.explored > solver.budget:
                    raise
                skipped.append(k)
                continue
            if won:
                winner, used = FORALL, k
                break
    except BudgetExceeded:
        return GameOutcome(UNDETERMINED, None, nodes, rounds, reuse, solver.explored, name,
                           note=f"position budget {budget} exhausted", skipped=skipped)
    finally:
        solver.level_cap = None
    outcome = GameOutcome(winner, used, nodes, rounds, reuse, solver.explored, name, skipped=skipped)
    if skipped and winner == FORALL:
        outcome.note = f"round counts {skipped} exceeded the level budget; {used} may not be least"
    if strategy:
        try:
            outcome.strategy = extract_strategy(solver, winner, used, strategy_limit)
        except _TooLarge:
            outcome.note = _join(outcome.note, f"strategy omitted: more than {strategy_limit} tree nodes")
        except BudgetExceeded:
            outcome.note = _join(outcome.note, "strategy omitted: position budget exhausted during extraction")
    return outcome


def _join(a: str | None, b: str) -> str:
    return f"{a}; {b}" if a else b


def unlimited_node_bound(n: int, rounds: int) -> int:
    """Node budget standing in for unlimited nodes: one fresh node per round."""
    return n * rounds + n


def check_lyndon(at: AtomStructure, m: int, **kwargs) -> bool:
    """Whether Exists survives ``m`` rounds with fresh nodes always available."""
    n = at.signature.dim
    out = solve_game(at, unlimited_node_bound(n, m), m, reuse=False, strategy=False, **kwargs)
    if out.winner == UNDETERMINED:
        raise BudgetExceeded(out.explored)
    return out.winner == EXISTS


# ---------------------------------------------------------------------------
# strategies


class _TooLarge(Exception):
    pass


def extract_strategy(solver: Solver, winner: str, rounds: int, limit: int = 20000) -> dict:
    """A strategy tree for the winner, in network form.

    Forall trees list one move per node and every Exists response under it.
    Exists trees list every Forall move with the chosen response. Ties go to
    the first move in enumeration order and the least canonical response.
    """
    game = solver.game
    at = game.at
    count = [0]

    def bump():
        count[0] += 1
        if count[0] > limit:
            raise _TooLarge()

    def sorted_responses(pos, mv):
        return sorted(game.responses(pos, mv), key=game.key)

    def opposing_moves(pos, r):
        # every legal Forall move, not only those a backend keeps for search
        if hasattr(game, "all_forall_moves"):
            return game.all_forall_moves(pos)
        return [(mv, game.network_move(pos, mv)) for mv in game.forall_moves(pos, r)]

    def forall_tree(pos, r):
        bump()
        for mv in game.forall_moves(pos, r):
            if solver.move_wins(pos, mv, r):
                children = [
                    {"network": game.network(nxt).to_json(at), "then": forall_tree(nxt, r - 1)}
                    for nxt in sorted_responses(pos, mv)
                ]
                return {"move": game.network_move(pos, mv).to_json(at), "responses": children}
        raise AssertionError("no winning move at a won position")

    def exists_tree(pos, r):
        bump()
        if r <= 0:
            return {"moves": []}
        entries = []
        for mv, shown in opposing_moves(pos, r):
            for nxt in sorted_responses(pos, mv):
                if not solver.forall_wins(nxt, r - 1):
                    entries.append({
                        "move": shown.to_json(at),
                        "response": game.network(nxt).to_json(at),
                        "then": exists_tree(nxt, r - 1),
                    })
                    break
            else:
                raise AssertionError("no surviving response at a survived position")
        return {"moves": entries}

    root = game.initial()
    body = forall_tree(root, rounds) if winner == FORALL else exists_tree(root, rounds)
    return {"winner": winner, "rounds": rounds, "tree": body}


@dataclass
class ReplayReport:
    ok: bool
    checked: int
    error: str | None = None


def _net_sig(net: Network) -> tuple:
    return (net.nodes, tuple(sorted(net.labels.items())))


def replay_strategy(strategy: Mapping, at: AtomStructure, nodes: int, reuse: bool) -> ReplayReport:
    """Replay a strategy tree against every legal opposing choice.

    Opposing moves and responses are enumerated afresh with the generic
    network game, independently of whichever backend produced the tree.
    """
    game = NetworkGame(at, nodes, reuse, canonical=False)
    winner = strategy["winner"]
    checked = [0]

    class Bad(Exception):
        pass

    def legal_move(pos: Network, mv: Move) -> bool:
        p = len(pos.nodes)
        if mv.tuple is None:
            return p == 0 and 0 <= mv.atom < at.n_atoms
        x, i, z = mv.tuple, mv.index, mv.node
        n = game.n
        if p == 0 or len(x) != n or not 0 <= i < n or any(not 0 <= v < p for v in x):
            return False
        if not (at.images[f"T_{i}"][pos.labels[x]] >> mv.atom) & 1:
            return False
        if any(pos.labels[x[:i] + (w,) + x[i + 1 :]] == mv.atom for w in range(p)):
            return False
        pinned = {x[j] for j in range(n) if j != i}
        return (z == p < nodes) or (reuse and 0 <= z < p and z not in pinned)

    def forall(pos: Network, node: Mapping, r: int):
        checked[0] += 1
        if r <= 0:
            raise Bad("Forall tree runs past the round bound")
        mv = Move.from_json(at, node["move"])
        if not legal_move(pos, mv):
            raise Bad(f"illegal Forall move {node['move']}")
        kids = {}
        for child in node["responses"]:
            net = Network.from_json(at, child["network"])
            kids[_net_sig(net)] = child["then"]
        for nxt in game.responses(pos, mv):
            sub = kids.get(_net_sig(nxt))
            if sub is None:
                raise Bad(f"response not covered after move {node['move']}")
            forall(nxt, sub, r - 1)

    def exists(pos: Network, node: Mapping, r: int):
        checked[0] += 1
        if r <= 0:
            return
        table = {}
        for entry in node["moves"]:
            table[Move.from_json(at, entry["move"])] = entry
        for mv in game.forall_moves(pos):
            entry = table.get(mv)
            if entry is None:
                raise Bad(f"no answer for Forall move {mv.to_json(at)}")
            net = Network.from_json(at, entry["response"])
            if not any(_net_sig(net) == _net_sig(x) for x in game.responses(pos, mv)):
                raise Bad(f"answer to {mv.to_json(at)} is not a legal response")
            exists(net, entry["then"], r - 1)

    try:
        if winner == FORALL:
            forall(game.initial(), strategy["tree"], strategy["rounds"])
        else:
            exists(game.initial(), strategy["tree"], strategy["rounds"])
    except Bad as exc:
        return ReplayReport(False, checked[0], str(exc))
    return ReplayReport(True, checked[0])


def trace_from_strategy(strategy: Mapping) -> list[dict]:
    """One line of play through a strategy tree: the first branch at each step."""
    out = []
    node = strategy["tree"]
    rnd = 0
    if strategy["winner"] == FORALL:
        while node and "move" in node:
            step = {"round": rnd, "forall": node["move"]}
            if node["responses"]:
                step["exists"] = node["responses"][0]["network"]
                node = node["responses"][0]["then"]
            else:
                step["exists"] = None
                node = None
            out.append(step)
            rnd += 1
    else:
        while node and node.get("moves"):
            entry = node["moves"][0]
            out.append({"round": rnd, "forall": entry["move"], "exists": entry["response"]})
            node = entry["then"]
            rnd += 1
    return out


# ---------------------------------------------------------------------------
# bases


@dataclass
class BasisReport:
    ok: bool
    failure: str | None = None
    witness: dict | None = None
    failures: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "failure": self.failure, "witness": self.witness, "failures": self.failures}


def network_from_matrix(f, at: AtomStructure, identity: str = "Id") -> Network:
    """The network of a basic matrix over a structure of matrices (``mat_n``).

    Nodes joined by an identity edge are merged; the label of ``x`` is the
    matrix ``(a, b) -> f(x_a, x_b)``.
    """
    from .relalg import matrix_dim, matrix_key

    n = at.signature.dim
    size = matrix_dim(f)
    rep = []
    for x in range(size):
        rep.append(next(y for y in range(x + 1) if y == x or f[y * size + x] == identity))
    reps = sorted(set(rep))
    rename = {r: k for k, r in enumerate(reps)}
    labels = {}
    for t in itertools.product(range(len(reps)), repeat=n):
        orig = [reps[v] for v in t]
        g = tuple(f[orig[a] * size + orig[b]] for a in range(n) for b in range(n))
        key = matrix_key(g)
        if key not in at.index:
            raise InvalidInput(f"matrix {g} is not an atom of the structure")
        labels[t] = at.index[key]
    return Network(tuple(range(len(reps))), labels)


def _agree_off(a: Network, b: Network, w: int) -> bool:
    if set(a.nodes) - {w} != set(b.nodes) - {w}:
        return False
    for t, lab in a.labels.items():
        if w not in t and b.labels.get(t) != lab:
            return False
    return True


def is_basis(candidate: Sequence[Network], at: AtomStructure, m: int) -> BasisReport:
    """Check the atom-coverage and cylindrifier properties of a network set.

    Networks have nodes within ``0..m-1``. For every member ``N``, tuple ``x``,
    index ``i``, atom ``a`` with ``N(x) <= c_i a`` and every node ``w`` outside
    ``{x_j : j != i}`` there must be a member ``M`` agreeing with ``N`` off
    ``w`` with ``M(x[i/w]) = a``. Distinct nodes may carry a diagonal label,
    as otherwise no atom below a diagonal could label ``(0, ..., n-1)``.
    """
    n = at.signature.dim
    for k, net in enumerate(candidate):
        if any(not 0 <= v < m for v in net.nodes):
            raise InvalidInput(f"member {k} uses nodes outside 0..{m - 1}")
        check = validate_network(net, at, weak_diagonals=True)
        if not check.ok:
            raise InvalidInput(f"member {k} is not a network: {check.violations[0]}")
    origin = tuple(range(n))
    seen = {net.labels.get(origin) for net in candidate}
    for a in range(at.n_atoms):
        if a not in seen:
            return BasisReport(False, "atom", {"atom": at.atoms[a]})
    for k, net in enumerate(candidate):
        for x in itertools.product(net.nodes, repeat=n):
            for i in range(n):
                pinned = {x[j] for j in range(n) if j != i}
                for a in bits(at.images[f"T_{i}"][net.labels[x]]):
                    for w in range(m):
                        if w in pinned:
                            continue
                        target = x[:i] + (w,) + x[i + 1 :]
                        if not any(
                            w in M.nodes and M.labels.get(target) == a and _agree_off(M, net, w) for M in candidate
                        ):
                            return BasisReport(
                                False,
                                "cylindrifier",
                                {"network": k, "index": i, "tuple": list(x), "atom": at.atoms[a], "node": w},
                            )
    return BasisReport(True)


@dataclass(frozen=True, eq=True)
class Hypernetwork:
    """A network on ``0..m-1`` plus non-atomic labels on other tuple lengths."""

    m: int
    labels: Mapping[tuple[int, ...], int] = field(hash=False)
    hyper: Mapping[tuple[int, ...], str] = field(hash=False)

    @property
    def network(self) -> Network:
        return Network(tuple(range(self.m)), self.labels)

    def to_json(self, at: AtomStructure) -> dict:
        return {
            "m": self.m,
            "labels": [[list(t), at.atoms[a]] for t, a in sorted(self.labels.items())],
            "hyper": [[list(t), lab] for t, lab in sorted(self.hyper.items())],
        }


def hyperedge_tuples(m: int, n: int) -> list[tuple[int, ...]]:
    """Tuples of length 1..m other than n over ``0..m-1``."""
    return [t for length in range(1, m + 1) if length != n for t in itertools.product(range(m), repeat=length)]


def _hyper_agree_off(a: Hypernetwork, b: Hypernetwork, avoid: set[int]) -> bool:
    for t, lab in a.labels.items():
        if not avoid.intersection(t) and b.labels[t] != lab:
            return False
    for t, lab in a.hyper.items():
        if not avoid.intersection(t) and b.hyper.get(t) != lab:
            return False
    return True


def _zigzag_failure(h: Hypernetwork, at: AtomStructure) -> tuple | None:
    n = at.signature.dim
    if not at.signature.has_diagonals or n < 2:
        return None
    d01 = at.diagonal(0, 1)
    rest = list(itertools.product(range(h.m), repeat=n - 2))

    def linked(u, v):
        return any((d01 >> h.labels[(u, v) + z]) & 1 for z in rest)

    by_len: dict[int, list] = {}
    for t in h.hyper:
        by_len.setdefault(len(t), []).append(t)
    for tups in by_len.values():
        for x in tups:
            for y in tups:
                if x < y and all(linked(u, v) for u, v in zip(x, y)) and h.hyper[x] != h.hyper[y]:
                    return (x, y)
    return None


def is_hyperbasis(candidate: Sequence[Hypernetwork], at: AtomStructure, m: int, hyperlabels: Iterable[str]) -> BasisReport:
    """Check a hypernetwork set: coverage, cylindrifier, zigzag and amalgamation.

    Every property is checked and each failure is reported; ``failure`` names
    the first one in that order.
    """
    n = at.signature.dim
    lam = set(hyperlabels)
    if lam & {str(a) for a in at.atoms}:
        raise InvalidInput("hyperlabels must be disjoint from the atoms")
    expected = set(hyperedge_tuples(m, n))
    for k, h in enumerate(candidate):
        if h.m != m:
            raise InvalidInput(f"member {k} is not on {m} nodes")
        if set(h.hyper) != expected or not set(h.hyper.values()) <= lam:
            raise InvalidInput(f"member {k} has missing or unknown hyperlabels")
        check = validate_network(h.network, at, weak_diagonals=True)
        if not check.ok:
            raise InvalidInput(f"member {k} is not a network: {check.violations[0]}")
    failures: dict[str, dict] = {}
    origin = tuple(range(n))
    seen = {h.labels.get(origin) for h in candidate}
    missing = [at.atoms[a] for a in range(at.n_atoms) if a not in seen]
    if missing:
        failures["atom"] = {"atom": missing[0]}
    for k, h in enumerate(candidate):
        if "cylindrifier" in failures:
            break
        for x in itertools.product(range(m), repeat=n):
            if "cylindrifier" in failures:
                break
            for i in range(n):
                pinned = {x[j] for j in range(n) if j != i}
                for a in bits(at.images[f"T_{i}"][h.labels[x]]):
                    for w in range(m):
                        if w in pinned:
                            continue
                        target = x[:i] + (w,) + x[i + 1 :]
                        if not any(M.labels[target] == a and _hyper_agree_off(M, h, {w}) for M in candidate):
                            failures["cylindrifier"] = {
                                "member": k, "index": i, "tuple": list(x), "atom": at.atoms[a], "node": w,
                            }
                            break
                    if "cylindrifier" in failures:
                        break
                if "cylindrifier" in failures:
                    break
    for k, h in enumerate(candidate):
        bad = _zigzag_failure(h, at)
        if bad:
            failures["zigzag"] = {"member": k, "tuples": [list(bad[0]), list(bad[1])]}
            break
    done = False
    for (a, M), (b, N) in itertools.product(enumerate(candidate), repeat=2):
        for x, y in itertools.product(range(m), repeat=2):
            if not _hyper_agree_off(M, N, {x, y}):
                continue
            if not any(_hyper_agree_off(M, L, {x}) and _hyper_agree_off(L, N, {y}) for L in candidate):
                failures["amalgamation"] = {"M": a, "N": b, "x": x, "y": y}
                done = True
                break
        if done:
            break
    order = ["atom", "cylindrifier", "zigzag", "amalgamation"]
    first = next((f for f in order if f in failures), None)
    return BasisReport(first is None, first, failures.get(first) if first else None, failures)
