"""Compiled vs pure-numpy matrix kernels, and a ball enumeration on each backend.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from coxtree import kernels
from coxtree.field import field_for
from coxtree.group import Group
from coxtree.system import builtin


def bench_products(L, batch, n, repeat, p=0):
    F = field_for(L)
    rng = np.random.default_rng(0)
    A = rng.integers(-20, 20, size=(batch, n, n, F.degree))
    B = rng.integers(-20, 20, size=(n, n, F.degree))
    if p:
        A, B = A % p, B % p
    out = {}
    for name in ("python", "compiled"):
        kernels.use_backend(name)
        t = min(timeit.repeat(lambda: kernels.matmul(A, B, F.reduction, F.reduction_i64, p=p), number=5, repeat=repeat))
        out[name] = t / 5
    return out


def bench_ball(name, radius, repeat):
    out = {}
    for backend in ("python", "compiled"):
        kernels.use_backend(backend)
        t = min(timeit.repeat(lambda: Group(builtin(name)).ball(radius), number=1, repeat=repeat))
        out[backend] = t
    return out


def bench_quotient(repeat):
    from coxtree.congruence import CongruenceContext

    out = {}
    for backend in ("python", "compiled"):
        kernels.use_backend(backend)
        out[backend] = min(timeit.repeat(lambda: CongruenceContext(builtin("t237"), 13), number=1, repeat=repeat))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    try:
        kernels.use_backend("compiled")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return
    rows = []
    for L, batch, n, p in ((3, 4096, 4, 0), (5, 4096, 4, 0), (21, 1024, 3, 0), (5, 4096, 4, 11), (21, 1024, 3, 13)):
        label = f"product L={L} N={batch} n={n}" + (f" mod {p}" if p else "")
        rows.append((label, bench_products(L, batch, n, args.repeat, p)))
    rows.append(("ball(9) figure", bench_ball("figure", 9, args.repeat)))
    rows.append(("ball(12) t237", bench_ball("t237", 12, args.repeat)))
    rows.append(("quotient mod 13 t237", bench_quotient(args.repeat)))
    print(f"{'case':40s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, t in rows:
        print(f"{label:40s} {t['python'] * 1e3:9.2f}ms {t['compiled'] * 1e3:9.2f}ms {t['python'] / t['compiled']:7.1f}x")


if __name__ == "__main__":
    main()
