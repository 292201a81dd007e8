"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import itertools
import json
import random
import time

from bao.blur import ID, BlurSpec, SplitAtom, SplitElement, compose_atoms, hp_partition_check, index_blur, safe
from bao.cli import bundled_configs, load_config, run
from bao.core import cartesian_atom_structure, check_ca_axioms, check_ra_laws, cm
from bao.games import EXISTS, FORALL, Hypernetwork, is_hyperbasis, replay_strategy, solve_game
from bao.rainbow import atom_graph, count_atoms_two_ways, ef_solve, graph_faults, palette_of, rainbow_atoms, theta_embed_check
from bao.relalg import basic_matrices, is_cylindric_basis, maddux, matrix_from_rows


def test_criterion_1_pebble_game(criterion):
    results = {}
    for n in (3, 4, 5):
        start = time.perf_counter()
        res = ef_solve(n + 1, n + 1, n + 1, n)
        elapsed = time.perf_counter() - start
        results[n] = (res.winner, res.rounds, elapsed)
    ok = all(w == FORALL and r == n + 1 and t < 1.0 for n, (w, r, t) in results.items())
    criterion(1, ok, " ".join(f"n={n}:{w}@{r} {t:.3f}s" for n, (w, r, t) in results.items()))
    assert ok


def test_criterion_2_rainbow_forall_win(criterion):
    at = rainbow_atoms(4, 3, 3)
    start = time.perf_counter()
    out = solve_game(at, 6, 12, True, level_budget=5000)
    rep = replay_strategy(out.strategy, at, 6, True) if out.strategy else None
    elapsed = time.perf_counter() - start
    ok = (
        out.winner == FORALL
        and out.rounds_used is not None and out.rounds_used <= 12
        and rep is not None and rep.ok
        and elapsed < 600
    )
    criterion(2, ok, f"winner={out.winner} k={out.rounds_used} skipped={out.skipped} "
                     f"replay={rep.ok if rep else None} ({rep.checked if rep else 0} nodes) {elapsed:.1f}s")
    assert ok


def test_criterion_3_cartesian_soundness(criterion):
    at = cartesian_atom_structure(3, 2, "CA")
    failures = []
    for nodes, rounds, reuse in itertools.product(range(3, 7), range(1, 5), (False, True)):
        out = solve_game(at, nodes, rounds, reuse, strategy=False)
        if out.winner != EXISTS:
            failures.append((nodes, rounds, reuse, out.winner))
    axioms = check_ca_axioms(cm(at))
    ok = not failures and axioms.passed and axioms.mode == "exhaustive"
    criterion(3, ok, f"grid failures={failures} axioms={axioms.passed} ({axioms.mode})")
    assert ok


def maddux_oracle(k):
    div = [f"a{i}" for i in range(1, k + 1)]
    atoms = ["Id"] + div
    table = {}
    for x, y in itertools.product(atoms, repeat=2):
        table[x, y] = frozenset(
            z for z in atoms
            if ((x == "Id" and y == z) or (y == "Id" and x == z) or (z == "Id" and x == y))
            or ("Id" not in (x, y, z) and not x == y == z)
        )
    return table


def test_criterion_4_maddux(criterion):
    details = []
    ok = True
    for k in (1, 2, 3):
        ra = maddux(k)
        alg = cm(ra.to_atom_structure())
        laws = check_ra_laws(alg)
        oracle = maddux_oracle(k)
        table_ok = all(ra.compose_atoms(x, y) == oracle[x, y] for x, y in itertools.product(ra.atoms, repeat=2))
        ok &= laws.passed and laws.mode == "exhaustive" and table_ok
        details.append(f"k={k}:|Cm|={alg.size()} laws={laws.passed} table={table_ok}")
    ok &= cm(maddux(3).to_atom_structure()).size() == 16
    criterion(4, ok, " ".join(details))
    assert ok


def test_criterion_5_index_blur(criterion):
    cases = list(itertools.product(range(50), repeat=3))
    start = time.perf_counter()
    got = [index_blur(i, j, k) for i, j, k in cases]
    elapsed = time.perf_counter() - start
    want = [any(r - q == q - p for p, q, r in itertools.permutations(c)) for c in cases]
    ok = got == want and len(cases) == 125_000 and elapsed < 1.0
    criterion(5, ok, f"{len(cases)} cases, {sum(a != b for a, b in zip(got, want))} mismatches, {elapsed:.3f}s")
    assert ok


def test_criterion_6_split_exactness(criterion):
    ra = maddux(3)
    spec = BlurSpec.of([ra.diversity])
    small = [ID] + [SplitAtom(i, p, 0) for p in ra.diversity for i in range(5)]
    targets = [ID] + [SplitAtom(i, p, 0) for p in ra.diversity for i in range(25)]
    assert not safe(ra, ra.diversity, ra.diversity, ra.diversity)
    mismatches = 0
    for a, b in itertools.product(small, repeat=2):
        got = compose_atoms(a, b, ra, spec).atoms_upto(25, spec)
        want = {c for c in targets if _single_blur_oracle(a, b, c)}
        mismatches += got != want
    rng = random.Random(6)
    law_failures = 0
    for _ in range(1000):
        x, y = (_random_element(rng, spec) for _ in range(2))
        c = lambda e: e.complement(spec)
        checks = [
            c(c(x)) == x,
            c(x.union(y, spec)) == c(x).intersection(c(y), spec),
            x.union(x.intersection(y, spec), spec) == x,
            x.union(c(x), spec) == SplitElement.top(spec),
            x.intersection(c(x), spec).is_empty(),
            x.union(y, spec) == y.union(x, spec),
        ]
        law_failures += not all(checks)
    ok = mismatches == 0 and law_failures == 0
    criterion(6, ok, f"{len(small) ** 2} atom pairs, {mismatches} mismatches; 1000 element pairs, {law_failures} law failures")
    assert ok


def _single_blur_oracle(a, b, c):
    """Consistency with the one blur of all diversity atoms, where no triple of blurs is safe."""
    if ID in (a, b, c):
        return (a == ID and b == c) or (b == ID and a == c) or (c == ID and a == b)
    progression = any(r - q == q - p for p, q, r in itertools.permutations((a.index, b.index, c.index)))
    return progression and not a.atom == b.atom == c.atom


def _random_element(rng, spec):
    from bao.blur import FULL, Line

    lines = {}
    for w, blur in enumerate(spec.blurs):
        cof = rng.random() < 0.3
        for p in blur:
            if rng.random() < 0.6:
                lines[(w, p)] = Line(cof, frozenset(rng.sample(range(30), rng.randint(0, 4))))
            elif cof:
                lines[(w, p)] = FULL
    return SplitElement._norm(spec, rng.random() < 0.5, lines)


def test_criterion_7_hp_partition(criterion):
    setups = [
        (maddux(3), BlurSpec.of([maddux(3).diversity])),
        (maddux(9), BlurSpec.of([["a1", "a2", "a3"], ["a4", "a5", "a6"], ["a7", "a8", "a9"]])),
    ]
    ok = True
    checked = 0
    for ra, spec in setups:
        for p, q in itertools.product(ra.diversity, repeat=2):
            verdicts = [hp_partition_check(p, q, n, ra, spec).ok for n in (3, 10, 25)]
            checked += 1
            ok &= verdicts == [True, True, True]
    criterion(7, ok, f"{checked} (P,Q) pairs at N in 3,10,25")
    assert ok


def test_criterion_8_rainbow_generator(criterion):
    counts = {p: count_atoms_two_ways(*p) for p in [(4, 3, 3), (5, 4, 3)]}
    at = rainbow_atoms(4, 3, 3)
    pal = palette_of(at)
    faulty = sum(1 for key in at.atoms if graph_faults(atom_graph(at, key), pal))
    theta = theta_embed_check(at, rainbow_atoms(4, 3, 3, 2))
    ok = all(a == b for a, b in counts.values()) and faulty == 0 and theta.ok
    ok &= {"injectivity", "diagonal", "cylindrifier"} <= set(theta.checked)
    criterion(8, ok, f"counts={counts} faulty={faulty} theta={theta.ok}")
    assert ok


def test_criterion_9_basis_checkers(criterion):
    ra = maddux(3)
    mats = basic_matrices(ra, 3)
    accepted = is_cylindric_basis(mats, ra).ok
    gone = matrix_from_rows([["Id", "a1", "a1"], ["a1", "Id", "a2"], ["a1", "a2", "Id"]])
    rep = is_cylindric_basis([f for f in mats if f != gone], ra)
    # the deleted matrix is the only one with f(0,1)=a1, f(0,2)=a1, f(2,1)=a2
    exact = (rep.ok, rep.failure, rep.witness) == (False, "triangle", ("a1", "a1", "a2"))
    point = cartesian_atom_structure(2, 1, "CA")
    flat = {t: 0 for t in itertools.product(range(2), repeat=2)}
    pair = [Hypernetwork(2, flat, {(0,): "p", (1,): "p"}), Hypernetwork(2, flat, {(0,): "q", (1,): "q"})]
    hyper = is_hyperbasis(pair, point, 2, ["p", "q"])
    ok = accepted and exact and not hyper.ok and hyper.failure == "amalgamation"
    criterion(9, ok, f"Mat_3 accepted={accepted} deletion witness={rep.witness} hyperbasis={hyper.failure}")
    assert ok


def test_criterion_10_determinism(criterion):
    outcomes = {}
    for name in bundled_configs():
        config = load_config(name)
        runs = [run(config, threads=1), run(config, threads=1), run(config, threads=8)]
        sections = [json.dumps(r.verdicts(), sort_keys=True) for r in runs]
        outcomes[name] = (len(set(sections)) == 1, runs[0].exit_code)
    ok = all(same for same, _ in outcomes.values()) and set(outcomes) >= {"rainbow-n3", "cartesian-sanity"}
    ok &= all(code == 0 for _, code in outcomes.values())
    criterion(10, ok, " ".join(f"{k}:identical={s},exit={c}" for k, (s, c) in sorted(outcomes.items())))
    assert ok
