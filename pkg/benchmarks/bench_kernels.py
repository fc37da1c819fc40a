"""Time the compiled RK4 kernel against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--steps 2000] [--repeat 5]

Both kernels integrate the same Liouvillian from the vacuum; the script
checks they agree before reporting the best-of-N wall time per step.
"""

import argparse
import time

import numpy as np

from dualcavity import _fallback, kernels, lindblad
from dualcavity.model import SystemParams
from dualcavity.quantum import HilbertLayout

PARAMS = SystemParams(delta_a=1.0, gamma=0.1, J=0.5, g=0.5, omega1=0.5, omega2=0.5)


def best_time(func, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = func()
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--n-max", type=int, nargs="+", default=[1, 2, 3])
    args = parser.parse_args()

    if kernels.compiled is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'n_max':>5} {'dim':>5} {'python us/step':>15} {'compiled us/step':>17} {'speedup':>8}")
    for n_max in args.n_max:
        layout = HilbertLayout.for_truncation(n_max)
        lv = lindblad.system_liouvillian(PARAMS, layout)
        m = np.ascontiguousarray(lv.matrix)
        ket = layout.basis(0, 0, 0)
        v0 = lindblad.vec(np.outer(ket, ket)).astype(complex)
        d = layout.total
        t_py, (v_py, _, _) = best_time(lambda: _fallback.rk4_evolve(m, v0.copy(), 0.01, args.steps, d, 1e-2),
                                       args.repeat)
        row = f"{n_max:>5} {m.shape[0]:>5} {1e6 * t_py / args.steps:>15.2f}"
        if kernels.compiled is not None:
            t_c, (v_c, _, _) = best_time(
                lambda: kernels.compiled.rk4_evolve(m, v0.copy(), 0.01, args.steps, d, 1e-2), args.repeat
            )
            if not np.allclose(v_c, v_py, atol=1e-12):
                raise SystemExit(f"kernels disagree at n_max={n_max}")
            row += f" {1e6 * t_c / args.steps:>17.2f} {t_py / t_c:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
