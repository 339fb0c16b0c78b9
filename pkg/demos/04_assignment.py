"""The rectangular assignment solver behind the centralized schedulers.

Assigns n rows to n of m >= n columns minimizing (or maximizing) the total,
honours forbidden entries marked +inf (-inf when maximizing), and among equal
totals returns the lexicographically smallest column sequence.  A brute-force
sweep confirms optimality on a small instance, then the solver is timed at the
batch sizes the schedulers actually produce.
"""

import itertools
import time

import numpy as np

from sidelinksim.assignment import InfeasibleRowError, solve_max, solve_min


def brute_min(c):
    n, m = c.shape
    best = min(itertools.permutations(range(m), n),
               key=lambda p: (sum(c[i, j] for i, j in enumerate(p)), p))
    return list(best), sum(c[i, j] for i, j in enumerate(best))


def show(c, a, label):
    marks = {(i, int(j)) for i, j in enumerate(a.cols)}
    print(f"{label}: columns {a.cols.tolist()}, total {a.total:g}")
    for i, row in enumerate(c):
        cells = [f"[{v:3g}]" if (i, j) in marks else f" {v:3g} "
                 for j, v in enumerate(row)]
        print("   " + " ".join(cells))


def main():
    rng = np.random.default_rng(5)
    c = rng.integers(0, 20, size=(3, 5)).astype(float)
    a = solve_min(c)
    show(c, a, "minimize 3 x 5")
    cols, total = brute_min(c)
    print(f"   brute force agrees: columns {cols}, total {total:g}")

    show(c, solve_max(c), "maximize the same matrix")

    # forbidden entries: row 0 may only use the last column
    f = c.copy()
    f[0, :-1] = np.inf
    show(f, solve_min(f), "minimize with row 0 restricted to column 4")

    f[0, :] = np.inf
    try:
        solve_min(f)
    except InfeasibleRowError as e:
        print(f"all of row {e.row} forbidden -> {e}")

    # ties resolve to the lexicographically smallest column sequence
    t = np.zeros((3, 4))
    print(f"all-zero 3 x 4: columns {solve_min(t).cols.tolist()} (smallest tie)")

    for n, m, label in ((60, 300, "a large reselection batch"),
                        (300, 300, "the square worst case")):
        x = rng.random((n, m))
        reps = 20 if n < m else 3
        t0 = time.perf_counter()
        for _ in range(reps):
            solve_min(x)
        dt = (time.perf_counter() - t0) / reps
        print(f"random {n} x {m} ({label}): {dt * 1e3:.1f} ms per solve")


if __name__ == "__main__":
    main()
