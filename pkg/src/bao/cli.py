"""Command line entry point and the config-driven experiment runner."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from . import __version__
from .core import AtomStructure, InvalidInput, cartesian_atom_structure, check_ca_axioms, check_ra_laws, cm
from .games import EXISTS, UNDETERMINED, check_lyndon, replay_strategy, solve_game, trace_from_strategy
from .graphs import Graph, chromatic_number, girth
from .relalg import RAAtomStructure, is_cylindric_basis, mat_n, maddux, matrix_from_rows, redgreen
from .rainbow import atom_graph, count_atoms_two_ways, ef_solve, graph_faults, palette_of, rainbow_atoms, theta_embed_check

EXIT_OK, EXIT_FAILED, EXIT_BUDGET, EXIT_INVALID = 0, 1, 2, 3

GENERATORS = ("rainbow", "cartesian", "maddux", "redgreen", "matn", "file")
CHECKS = ("ca_axioms", "ra_laws", "atom_counts", "forbidden_triples", "theta", "lyndon")


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def write_json(path: str | Path, data: Any) -> None:
    Path(path).write_text(dumps(data) + "\n")


def bundled_configs() -> list[str]:
    folder = resources.files("bao") / "configs"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_config(name_or_path: str) -> dict:
    """A config file path, or the name of a bundled config."""
    if Path(name_or_path).exists():
        return read_json(name_or_path)
    if name_or_path in bundled_configs():
        text = (resources.files("bao") / "configs" / f"{name_or_path}.json").read_text()
        return json.loads(text)
    raise InvalidInput(f"no config file or bundled config named {name_or_path!r}")


# ---------------------------------------------------------------------------
# config runner


@dataclass
class Report:
    config: dict
    checks: list[dict] = field(default_factory=list)
    games: list[dict] = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    diagnostics: list[dict] = field(default_factory=list)
    budget_exhausted: bool = False
    required_failed: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if self.required_failed:
            return EXIT_FAILED
        if self.budget_exhausted:
            return EXIT_BUDGET
        return EXIT_OK

    def verdicts(self) -> dict:
        """The part of the report that must not depend on timing or threads."""
        return {
            "budget_exhausted": self.budget_exhausted,
            "checks": self.checks,
            "games": self.games,
            "required_failed": self.required_failed,
        }

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "diagnostics": self.diagnostics,
            "exit_code": self.exit_code,
            "timing": self.timing,
            "verdicts": self.verdicts(),
            "version": __version__,
        }

    def summary(self) -> str:
        name = self.config.get("name", "(unnamed)")
        lines = [f"pipeline {name}"]
        for c in self.checks:
            lines.append(f"  check {c['check']}: {'pass' if c['passed'] else 'FAIL'}")
        for g in self.games:
            used = "" if g["rounds_used"] is None else f" at k={g['rounds_used']}"
            extra = f" (skipped {g['skipped']})" if g.get("skipped") else ""
            lines.append(f"  game m={g['nodes']} k<={g['rounds']} reuse={g['reuse']}: {g['winner']}{used}{extra}")
        if self.budget_exhausted:
            lines.append("  budget exhausted")
        if self.required_failed:
            lines.append(f"  required failures: {', '.join(self.required_failed)}")
        lines.append(f"exit {self.exit_code}")
        return "\n".join(lines)


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def validate_config(config: Any) -> None:
    if not isinstance(config, Mapping):
        raise InvalidInput("config must be a JSON object")
    allowed = {"name", "seed", "threads", "generator", "checks", "games", "outputs"}
    unknown = set(config) - allowed
    if unknown:
        raise InvalidInput(f"unknown config keys {sorted(unknown)}")
    gen = config.get("generator")
    if gen is not None:
        if not isinstance(gen, Mapping) or gen.get("kind") not in GENERATORS:
            raise InvalidInput(f"generator.kind must be one of {list(GENERATORS)}")
    checks = config.get("checks", [])
    games = config.get("games", [])
    if not isinstance(checks, list) or not isinstance(games, list):
        raise InvalidInput("checks and games must be lists")
    if (checks or games) and gen is None:
        raise InvalidInput("checks and games need a generator")
    sampled = False
    for c in checks:
        if not isinstance(c, Mapping) or c.get("check") not in CHECKS:
            raise InvalidInput(f"each check needs a 'check' field from {list(CHECKS)}")
        sampled |= "samples" in c
    for g in games:
        if not isinstance(g, Mapping) or "nodes" not in g or "rounds" not in g:
            raise InvalidInput("each game needs 'nodes' and 'rounds'")
        if g.get("expect") not in (None, "Exists", "Forall"):
            raise InvalidInput("game expect must be Exists or Forall")
    if sampled and "seed" not in config:
        raise InvalidInput("a seed is required when a sampled mode is enabled")


def _generate(gen: Mapping) -> tuple[AtomStructure, RAAtomStructure | None]:
    p = gen.get("params", {})
    kind = gen["kind"]
    if kind == "rainbow":
        at = rainbow_atoms(p["greens"], p["reds"], p.get("n", 3), p.get("splits", 0), p.get("yellow", "single"))
        return at, None
    if kind == "cartesian":
        return cartesian_atom_structure(p.get("n", 3), p.get("u", 2), p.get("kind", "CA")), None
    if kind in ("maddux", "redgreen"):
        ra = maddux(p["k"]) if kind == "maddux" else redgreen(p["greens"], p["reds"])
        return ra.to_atom_structure(), ra
    if kind == "matn":
        ra = maddux(p["k"]) if "k" in p else RAAtomStructure.from_json(read_json(p["ra"]))
        return mat_n(ra, p.get("n", 3)), ra
    return AtomStructure.from_json(read_json(p["path"])), None


def _run_check(spec: Mapping, at: AtomStructure, gen: Mapping, seed: int) -> dict:
    name = spec["check"]
    out: dict[str, Any] = {"check": name}
    if name == "ca_axioms":
        rep = check_ca_axioms(cm(at), element_limit=spec.get("element_limit", 1 << 20),
                              samples=spec.get("samples", 20000), seed=seed)
        out.update(passed=rep.passed, mode=rep.mode, violations=len(rep.violations))
    elif name == "ra_laws":
        rep = check_ra_laws(cm(at), element_limit=spec.get("element_limit", 1 << 20),
                            samples=spec.get("samples", 20000), seed=seed)
        out.update(passed=rep.passed, mode=rep.mode, violations=len(rep.violations))
    elif name == "atom_counts":
        p = gen.get("params", {})
        if gen["kind"] != "rainbow":
            raise InvalidInput("atom_counts applies to rainbow generators")
        a, b = count_atoms_two_ways(p["greens"], p["reds"], p.get("n", 3), p.get("splits", 0), p.get("yellow", "single"))
        out.update(passed=a == b == at.n_atoms, counts=[a, b])
    elif name == "forbidden_triples":
        pal = palette_of(at)
        bad = [k for k in at.atoms if graph_faults(atom_graph(at, k), pal)]
        out.update(passed=not bad, atoms=at.n_atoms, faulty=bad[:10])
    elif name == "theta":
        p = gen.get("params", {})
        if gen["kind"] != "rainbow":
            raise InvalidInput("theta applies to rainbow generators")
        base = rainbow_atoms(p["greens"], p["reds"], p.get("n", 3), 0, p.get("yellow", "single"))
        split = rainbow_atoms(p["greens"], p["reds"], p.get("n", 3), spec.get("splits", 2), p.get("yellow", "single"))
        rep = theta_embed_check(base, split)
        out.update(passed=rep.ok, checked=dict(sorted(rep.checked.items())))
    elif name == "lyndon":
        holds = check_lyndon(at, spec["m"])
        out.update(passed=holds == spec.get("expect", True), holds=holds)
    return out


def run(config: Mapping, threads: int | None = None) -> Report:
    """Execute a pipeline config and collect its report."""
    validate_config(config)
    report = Report(config=json.loads(json.dumps(config)))
    gen = config.get("generator")
    if gen is None:
        return report
    seed = config.get("seed", 0)
    threads = threads if threads is not None else config.get("threads")
    t0 = time.perf_counter()
    try:
        at, _ = _generate(gen)
    except KeyError as exc:
        raise InvalidInput(f"generator parameter {exc} missing") from exc
    report.timing["generate"] = round(time.perf_counter() - t0, 3)
    report.diagnostics.append({"atoms": at.n_atoms})

    for k, spec in enumerate(config.get("checks", [])):
        t0 = time.perf_counter()
        res = _run_check(spec, at, gen, seed)
        report.timing[f"check{k}:{spec['check']}"] = round(time.perf_counter() - t0, 3)
        res["required"] = bool(spec.get("required", True))
        report.checks.append(res)
        if res["required"] and not res["passed"]:
            report.required_failed.append(f"check {spec['check']}")

    for k, spec in enumerate(config.get("games", [])):
        for nodes in _as_list(spec["nodes"]):
            for reuse in _as_list(spec.get("reuse", False)):
                t0 = time.perf_counter()
                res, diag = _run_game(spec, at, nodes, reuse, threads)
                report.timing[f"game{k}:m={nodes}:reuse={reuse}"] = round(time.perf_counter() - t0, 3)
                report.games.append(res)
                report.diagnostics.append(diag)
                if res["winner"] == UNDETERMINED:
                    report.budget_exhausted = True
                elif res["required"] and not res["passed"]:
                    report.required_failed.append(f"game m={nodes} reuse={reuse}")

    outputs = config.get("outputs", {})
    if outputs.get("report"):
        write_json(outputs["report"], report.to_json())
    return report


def _run_game(spec: Mapping, at: AtomStructure, nodes: int, reuse: bool, threads):
    rounds = spec["rounds"]
    replay = spec.get("replay", False)
    outcome = solve_game(
        at, nodes, rounds, reuse,
        budget=spec.get("budget", 2_000_000),
        level_budget=spec.get("level_budget"),
        threads=threads,
        strategy=replay,
    )
    res: dict[str, Any] = {
        "nodes": nodes,
        "rounds": rounds,
        "reuse": reuse,
        "winner": outcome.winner,
        "rounds_used": outcome.rounds_used if outcome.winner != EXISTS else None,
        "skipped": outcome.skipped,
        "required": bool(spec.get("required", True)),
    }
    expect = spec.get("expect")
    res["passed"] = expect is None or outcome.winner == expect
    if replay and outcome.winner != UNDETERMINED:
        if outcome.strategy is None:
            res["replay"] = None
        else:
            rep = replay_strategy(outcome.strategy, at, nodes, reuse)
            res["replay"] = rep.ok
            res["passed"] = res["passed"] and rep.ok
    diag = {"game": f"m={nodes} reuse={reuse}", "explored": outcome.explored, "backend": outcome.backend}
    if outcome.note:
        diag["note"] = outcome.note
    return res, diag


# ---------------------------------------------------------------------------
# subcommands


def _emit(data: Any, out: str | None = None) -> None:
    if out:
        write_json(out, data)
    else:
        print(dumps(data))


def cmd_run(args) -> int:
    report = run(load_config(args.config), threads=args.threads)
    print(report.summary())
    if args.out:
        write_json(args.out, report.to_json())
    if args.json:
        print(dumps(report.to_json()))
    return report.exit_code


def cmd_game_solve(args) -> int:
    at = AtomStructure.from_json(read_json(args.at))
    outcome = solve_game(at, args.nodes, args.rounds, args.reuse, budget=args.budget,
                         level_budget=args.level_budget, threads=args.threads,
                         strategy=bool(args.trace or args.strategy))
    print(dumps(outcome.to_json(include_strategy=False)))
    if args.strategy and outcome.strategy is not None:
        write_json(args.strategy, outcome.strategy)
    if args.trace and outcome.strategy is not None:
        write_json(args.trace, trace_from_strategy(outcome.strategy))
    return EXIT_BUDGET if outcome.winner == UNDETERMINED else EXIT_OK


def cmd_ra_maddux(args) -> int:
    _emit(maddux(args.k).to_json(), args.out)
    return EXIT_OK


def cmd_ra_redgreen(args) -> int:
    _emit(redgreen(args.greens, args.reds).to_json(), args.out)
    return EXIT_OK


def cmd_ra_matn(args) -> int:
    ra = RAAtomStructure.from_json(read_json(args.at))
    _emit(mat_n(ra, args.n).to_json(), args.out)
    return EXIT_OK


def cmd_ra_basis(args) -> int:
    ra = RAAtomStructure.from_json(read_json(args.at))
    mats = [matrix_from_rows(rows) for rows in read_json(args.matrices)]
    rep = is_cylindric_basis(mats, ra, args.n)
    print(dumps(rep.to_json()))
    return EXIT_OK if rep.ok else EXIT_FAILED


def cmd_rainbow_gen(args) -> int:
    at = rainbow_atoms(args.greens, args.reds, args.n, args.splits, args.yellow)
    _emit(at.to_json(), args.out)
    if args.out:
        print(f"{at.n_atoms} atoms written to {args.out}")
    return EXIT_OK


def cmd_rainbow_ef(args) -> int:
    print(dumps(ef_solve(args.pebbles, args.rounds, args.left, args.right).to_json()))
    return EXIT_OK


def _blur_inputs(args):
    from .blur import BlurSpec

    ra = RAAtomStructure.from_json(read_json(args.ra))
    blurs = read_json(args.J)
    if not isinstance(blurs, list) or not all(isinstance(w, list) for w in blurs):
        raise InvalidInput("J must be a list of atom lists")
    return ra, BlurSpec.of(blurs, safe_reading=args.safe)


def cmd_blur_check(args) -> int:
    from .blur import is_n_blur

    ra, spec = _blur_inputs(args)
    rep = is_n_blur(ra, spec, args.n, args.mode, seed=args.seed, trials=args.trials, strong=args.strong)
    print(dumps(rep.to_json()))
    return EXIT_OK if rep.ok else EXIT_FAILED


def cmd_split_compose(args) -> int:
    from .blur import SplitElement, split_compose

    ra, spec = _blur_inputs(args)
    x = SplitElement.from_json(read_json(args.x), spec)
    y = SplitElement.from_json(read_json(args.y), spec)
    _emit(split_compose(x, y, ra, spec).to_json(spec), args.out)
    return EXIT_OK


def _graph(args) -> Graph:
    try:
        return Graph.from_json(read_json(args.input))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad graph: {exc}") from exc


def cmd_graph_chi(args) -> int:
    print(dumps({"chromatic_number": chromatic_number(_graph(args))}))
    return EXIT_OK


def cmd_graph_girth(args) -> int:
    g = girth(_graph(args))
    print(dumps({"girth": g if isinstance(g, int) else "inf"}))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors share the invalid-input exit code; 2 means budget exhausted
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bao", description="Workbench for Boolean algebras with operators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a pipeline config (a path or a bundled name)")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="also print the JSON report")
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_run)

    game = sub.add_parser("game").add_subparsers(dest="action", required=True)
    p = game.add_parser("solve")
    p.add_argument("--at", required=True)
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--reuse", action="store_true")
    p.add_argument("--trace")
    p.add_argument("--strategy")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--level-budget", type=int)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_game_solve)

    ra = sub.add_parser("ra").add_subparsers(dest="action", required=True)
    p = ra.add_parser("maddux")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ra_maddux)
    p = ra.add_parser("redgreen")
    p.add_argument("--greens", type=int, required=True)
    p.add_argument("--reds", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ra_redgreen)
    p = ra.add_parser("matn")
    p.add_argument("--at", required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ra_matn)
    p = ra.add_parser("basis-check")
    p.add_argument("--matrices", required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_ra_basis)

    rb = sub.add_parser("rainbow").add_subparsers(dest="action", required=True)
    p = rb.add_parser("gen")
    p.add_argument("--greens", type=int, required=True)
    p.add_argument("--reds", type=int, required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--splits", type=int, default=0)
    p.add_argument("--yellow", choices=["single", "full"], default="single")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rainbow_gen)
    p = rb.add_parser("ef")
    for name in ("pebbles", "rounds", "left", "right"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_rainbow_ef)

    blur = sub.add_parser("blur").add_subparsers(dest="action", required=True)
    p = blur.add_parser("check")
    p.add_argument("--ra", required=True)
    p.add_argument("--J", required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--strong", action="store_true")
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--safe", choices=["contains", "below"], default="contains")
    p.set_defaults(func=cmd_blur_check)

    split = sub.add_parser("split").add_subparsers(dest="action", required=True)
    p = split.add_parser("compose")
    p.add_argument("--ra", required=True)
    p.add_argument("--J", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--safe", choices=["contains", "below"], default="contains")
    p.add_argument("--out")
    p.set_defaults(func=cmd_split_compose)

    graph = sub.add_parser("graph").add_subparsers(dest="action", required=True)
    for name, func in (("chi", cmd_graph_chi), ("girth", cmd_graph_girth)):
        p = graph.add_parser(name)
        p.add_argument("--in", dest="input", required=True)
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
