"""Solve the coloured-graph game on the 4-green, 3-red rainbow structure and
print the first line of Forall's winning play."""

import time

from bao.games import replay_strategy, solve_game, trace_from_strategy
from bao.rainbow import rainbow_atoms

at = rainbow_atoms(4, 3, 3)
print(f"{at.n_atoms} atoms")
start = time.perf_counter()
out = solve_game(at, 6, 12, reuse=True, level_budget=5000)
print(f"winner {out.winner} in {out.rounds_used} rounds, skipped {out.skipped}, "
      f"{out.explored} positions, {time.perf_counter() - start:.1f}s")
if out.note:
    print("note:", out.note)
print("replay:", replay_strategy(out.strategy, at, 6, True))
for step in trace_from_strategy(out.strategy):
    move = step["forall"]
    where = f" on {move['tuple']} index {move['index']} -> node {move['node']}" if "tuple" in move else ""
    print(f"round {step['round']}: Forall plays {move['atom']}{where}")
