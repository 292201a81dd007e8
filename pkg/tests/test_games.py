import copy
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from bao.core import InvalidInput, cartesian_atom_structure
from bao.games import (
    EXISTS, FORALL, UNDETERMINED, Hypernetwork, Move, Network, NetworkGame, check_lyndon, is_hyperbasis,
    network_key, replay_strategy, solve_game, trace_from_strategy, unlimited_node_bound, validate_network,
)
from bao.rainbow import rainbow_atoms
from bao.relalg import maddux, mat_n

CART = cartesian_atom_structure(2, 3, "CA")
SMALL_RAINBOW = rainbow_atoms(2, 1, 3)


def point_network(at, values):
    """The network whose nodes are the given base-set values, labelled by the points they span."""
    n = at.signature.dim
    nodes = range(len(values))
    labels = {t: ".".join(str(values[v]) for v in t) for t in itertools.product(nodes, repeat=n)}
    return Network.from_keys(at, nodes, labels)


def test_point_networks_are_valid():
    assert validate_network(point_network(CART, [0, 1, 2]), CART).ok
    net = point_network(CART, [0, 1])
    labels = dict(net.labels)
    labels[(0, 1)] = CART.index["0.0"]
    bad = validate_network(Network(net.nodes, labels), CART)
    assert not bad.ok
    assert {v[0] for v in bad.violations} >= {"(i)"}


def test_network_json_roundtrip_and_errors():
    net = point_network(CART, [2, 0, 1])
    assert Network.from_json(CART, net.to_json(CART)) == net
    with pytest.raises(InvalidInput):
        Network.from_json(CART, {"nodes": [0], "labels": [[[0, 0], "nope"]]})
    mv = Move(3, (0, 1), 1, 2)
    assert Move.from_json(CART, mv.to_json(CART)) == mv


def test_canonical_key_ignores_node_names():
    net = point_network(CART, [2, 0, 1])
    moved = net.relabel({0: 2, 1: 0, 2: 1})
    assert network_key(net, 2) == network_key(moved, 2)
    assert network_key(net, 2, canonical=False) != network_key(moved, 2, canonical=False)


def test_extensions_stay_networks():
    game = NetworkGame(CART, 4, reuse=True)
    rng = random.Random(5)
    pos = game.initial()
    for _ in range(6):
        moves = game.forall_moves(pos)
        if not moves:
            break
        mv = rng.choice(moves)
        nexts = list(game.responses(pos, mv))
        assert nexts, "a representable structure always has a response"
        pos = rng.choice(nexts)
        assert validate_network(pos, CART).ok


@pytest.mark.parametrize("nodes", [3, 4, 5])
@pytest.mark.parametrize("reuse", [False, True])
def test_representable_structures_survive(nodes, reuse):
    out = solve_game(CART, nodes, 3, reuse, strategy=False)
    assert out.winner == EXISTS
    assert solve_game(mat_n(maddux(3), 3), 4, 2, reuse, strategy=False).winner == EXISTS


def test_small_rainbow_wins_for_forall_and_replays():
    out = solve_game(SMALL_RAINBOW, 4, 3, False)
    assert (out.winner, out.rounds_used) == (FORALL, 2)
    rep = replay_strategy(out.strategy, SMALL_RAINBOW, 4, False)
    assert rep.ok and rep.checked > 0
    trace = trace_from_strategy(out.strategy)
    assert [step["round"] for step in trace] == [0, 1]
    assert trace[0]["exists"]["nodes"] == [0, 1, 2]


def test_backends_agree():
    cases = [(3, 2, False, EXISTS), (3, 3, True, EXISTS), (4, 2, False, FORALL)]
    for nodes, rounds, reuse, want in cases:
        a = solve_game(SMALL_RAINBOW, nodes, rounds, reuse, backend="rainbow", strategy=False)
        b = solve_game(SMALL_RAINBOW, nodes, rounds, reuse, backend="network", strategy=False)
        assert a.winner == b.winner == want
        assert a.rounds_used == b.rounds_used


def test_exists_strategy_replays_and_tampering_is_caught():
    out = solve_game(SMALL_RAINBOW, 3, 2, False)
    assert out.winner == EXISTS
    assert replay_strategy(out.strategy, SMALL_RAINBOW, 3, False).ok
    broken = copy.deepcopy(out.strategy)
    broken["tree"]["moves"].pop()
    assert not replay_strategy(broken, SMALL_RAINBOW, 3, False).ok
    forged = copy.deepcopy(out.strategy)
    labels = forged["tree"]["moves"][0]["response"]["labels"]
    labels[0][1] = next(a for a in SMALL_RAINBOW.atoms if a != labels[0][1])
    assert not replay_strategy(forged, SMALL_RAINBOW, 3, False).ok


def test_forall_strategy_missing_response_is_caught():
    out = solve_game(SMALL_RAINBOW, 4, 2, False)
    broken = copy.deepcopy(out.strategy)
    broken["tree"]["responses"] = broken["tree"]["responses"][:-1]
    assert not replay_strategy(broken, SMALL_RAINBOW, 4, False).ok


def test_budget_gives_undetermined():
    out = solve_game(SMALL_RAINBOW, 4, 3, True, budget=3)
    assert out.winner == UNDETERMINED and out.rounds_used is None
    assert "budget" in out.note


def test_level_budget_skips_but_still_decides():
    out = solve_game(SMALL_RAINBOW, 4, 3, True, level_budget=1, strategy=False)
    assert (out.winner, out.rounds_used, out.skipped) == (FORALL, 3, [2])
    assert "may not be least" in out.note
    assert out.to_json(False)["skipped"] == [2]


def test_thread_counts_agree():
    one = solve_game(SMALL_RAINBOW, 4, 3, True, threads=1, strategy=False)
    many = solve_game(SMALL_RAINBOW, 4, 3, True, threads=4, strategy=False)
    assert (one.winner, one.rounds_used) == (many.winner, many.rounds_used)


def test_lyndon_conditions():
    assert unlimited_node_bound(3, 2) == 9
    assert check_lyndon(cartesian_atom_structure(2, 2, "CA"), 3)
    assert check_lyndon(SMALL_RAINBOW, 1)
    assert not check_lyndon(SMALL_RAINBOW, 2)


ONE_POINT = cartesian_atom_structure(2, 1, "CA")
FLAT = {t: 0 for t in itertools.product(range(2), repeat=2)}


def test_hyperbasis_minimal_amalgamation_counterexample():
    left = Hypernetwork(2, FLAT, {(0,): "p", (1,): "p"})
    right = Hypernetwork(2, FLAT, {(0,): "q", (1,): "q"})
    rep = is_hyperbasis([left, right], ONE_POINT, 2, ["p", "q"])
    assert (rep.ok, rep.failure) == (False, "amalgamation")
    assert rep.witness == {"M": 0, "N": 1, "x": 0, "y": 1}
    assert is_hyperbasis([left], ONE_POINT, 2, ["p", "q"]).ok


def test_hyperbasis_zigzag_and_input_checks():
    mixed = Hypernetwork(2, FLAT, {(0,): "p", (1,): "q"})
    assert is_hyperbasis([mixed], ONE_POINT, 2, ["p", "q"]).failure == "zigzag"
    with pytest.raises(InvalidInput):
        is_hyperbasis([mixed], ONE_POINT, 2, ["0.0"])


@settings(max_examples=30, deadline=None)
@given(st.permutations([0, 1, 2]), st.lists(st.integers(0, 2), min_size=1, max_size=3))
def test_key_invariant_under_relabelling(perm, values):
    net = point_network(CART, values)
    mapping = {v: perm[v] for v in range(len(values))}
    order = sorted(mapping.values())
    compact = {v: order.index(mapping[v]) for v in mapping}
    assert network_key(net.relabel(compact), 2) == network_key(net, 2)


def test_one_atom_hyperbasis_with_one_hyperlabel():
    lam = {t: "p" for t in itertools.product(range(2), repeat=1)}
    assert is_hyperbasis([Hypernetwork(2, FLAT, lam)], ONE_POINT, 2, ["p"]).ok


def test_maddux_one_matrices_form_a_hyperbasis():
    from bao.relalg import basic_matrices, matrix_key

    ra = maddux(1)
    at = mat_n(ra, 3)
    m, n = 4, 3
    members = []
    for f in basic_matrices(ra, m):
        labels = {}
        for t in itertools.product(range(m), repeat=n):
            g = tuple(f[t[a] * m + t[b]] for a in range(n) for b in range(n))
            labels[t] = at.index[matrix_key(g)]
        hyper = {t: "h" for t in itertools.product(range(m), repeat=1)}
        hyper.update({t: "h" for length in (2, 4) for t in itertools.product(range(m), repeat=length)})
        members.append(Hypernetwork(m, labels, hyper))
    rep = is_hyperbasis(members, at, m, ["h"])
    assert rep.ok, rep.failure


@pytest.mark.parametrize("nodes,rounds", [(3, 2), (4, 2), (4, 3)])
def test_canonical_keys_do_not_change_the_winner(nodes, rounds):
    outcomes = [solve_game(SMALL_RAINBOW, nodes, rounds, canonical=c, strategy=False) for c in (True, False)]
    assert outcomes[0].winner == outcomes[1].winner
    assert outcomes[0].rounds_used == outcomes[1].rounds_used


def test_forall_wins_are_monotone_in_rounds():
    first = solve_game(SMALL_RAINBOW, 4, 2, strategy=False)
    assert first.winner == FORALL
    for rounds in (3, 4):
        later = solve_game(SMALL_RAINBOW, 4, rounds, strategy=False)
        assert later.winner == FORALL and later.rounds_used <= rounds


def test_point_networks_form_a_basis_and_exists_survives():
    from bao.games import is_basis

    m = 3
    members = [point_network(CART, list(vals)) for vals in itertools.product(range(3), repeat=m)]
    assert is_basis(members, CART, m).ok
    rep = is_basis(members[1:], CART, m)
    assert (rep.ok, rep.failure) == (False, "cylindrifier")
    assert solve_game(CART, m, 4, strategy=False).winner == EXISTS
