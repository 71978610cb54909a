"""Compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

from thzturb import _kernels_py
from thzturb.coherence import PlanarArray, displacement_histogram
from thzturb.constants import wavenumber
from thzturb.propagation import mie_truncation_order

try:
    from thzturb import _kernels as _compiled
except ImportError:
    _compiled = None


def cases():
    k = wavenumber(300e9)
    for n in (16, 64):
        h = displacement_histogram(PlanarArray.half_wavelength(n, n, 300e9))
        args = (h.distances, h.counts.astype(float), h.distances, h.counts.astype(float), 1e-9 * k * k * 1e3)
        yield f"losc_pair_sum {n}x{n}", "losc_pair_sum", args
    for x in (5.0, 200.0):
        n = mie_truncation_order(x)
        m = complex(2.5, 1.2)
        yield f"mie_ab x={x:g}", "mie_ab", (x, m, n, max(n, int(abs(m) * x) + 1) + 15)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled kernels not built; only the fallback is timed")
    print(f"{'case':<24}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for label, name, fargs in cases():
        py = min(timeit.repeat(lambda: getattr(_kernels_py, name)(*fargs), number=1, repeat=args.repeat))
        if _compiled is None:
            print(f"{label:<24}{py * 1e3:>12.3f}")
            continue
        cy = min(timeit.repeat(lambda: getattr(_compiled, name)(*fargs), number=1, repeat=args.repeat))
        print(f"{label:<24}{py * 1e3:>12.3f}{cy * 1e3:>12.3f}{py / cy:>10.1f}")


if __name__ == "__main__":
    main()
