"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --n 200000 --repeat 3
"""
import argparse
import timeit

from blockentropy import codec, kernels, models
from blockentropy.exact import log_probability
from blockentropy.models import sample


def workloads(n):
    markov = models.symmetric_markov(0.1)
    hidden = models.FunctionOfMarkov(
        models.Markov([0.25, 0.5, 0.25], [[0.5, 0.5, 0.0], [0.25, 0.5, 0.25], [0.0, 0.5, 0.5]]), [0, 1, 1], 2)
    x = sample(markov, n, 1)
    y = sample(hidden, n, 2)
    stream = codec.encode(x, 8)
    return {
        "markov sampling": lambda: sample(markov, n, 3),
        "encode (pack_bits)": lambda: codec.encode(x, 8),
        "decode (body walk)": lambda: codec.decode(stream),
        "hmm forward pass": lambda: log_probability(hidden, y),
    }


def bench(n, repeat):
    backends = [("python", kernels.python_kernels)]
    if kernels.compiled_kernels is not None:
        backends.append(("cython", kernels.compiled_kernels))
    saved = kernels._impl
    times = {}
    try:
        for name, impl in backends:
            kernels._impl = impl
            for label, fn in workloads(n).items():
                times[label, name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    finally:
        kernels._impl = saved
    return times, [b for b, _ in backends]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="symbols per workload")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    times, names = bench(args.n, args.repeat)
    header = f"{'kernel':<22}" + "".join(f"{b:>12}" for b in names) + ("     speedup" if len(names) > 1 else "")
    print(f"n = {args.n}, best of {args.repeat}")
    print(header)
    for label in dict.fromkeys(label for label, _ in times):
        row = f"{label:<22}" + "".join(f"{times[label, b]:>11.4f}s" for b in names)
        if len(names) > 1:
            row += f"{times[label, 'python'] / times[label, 'cython']:>11.1f}x"
        print(row)
    if len(names) == 1:
        print("compiled extension not built; only the fallback was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
