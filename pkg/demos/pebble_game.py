"""Pebble games on complete graphs: how many rounds Forall needs to tell K_{n+1} from K_n."""

from bao.rainbow import ef_solve

for n in range(2, 7):
    res = ef_solve(n + 1, n + 1, n + 1, n)
    short = ef_solve(n + 1, n, n + 1, n)
    print(f"K_{n + 1} vs K_{n}: {res.winner} wins in {res.rounds} rounds; with {n} rounds: {short.winner}")
print("with only n pebbles Exists survives:", ef_solve(3, 10, 4, 3).winner)
