#!/usr/bin/env python3
"""Benchmark the lattice stencil: compiled kernel vs numpy fallback.

The propagators spend essentially all their time applying the photon
part of the Hamiltonian, so this micro-benchmark times one stencil
application (out = H_photon psi) for both implementations of the
kernel contract, plus a scipy CSR matvec of the full Hamiltonian
(photon stencil + emitter rows) as an external reference point.

Usage:
    python benchmarks/bench_matvec.py [--sizes 1000 10000 100000]
                                      [--repeats 200]
"""

import argparse
import math
import time

import numpy as np

from sawtooth_qed import _kernels_np
from sawtooth_qed.bloch import LatticeParams
from sawtooth_qed.dynamics import EmitterSpec, build_hamiltonian

try:
    from sawtooth_qed import _kernels as _kernels_compiled
except ImportError:
    _kernels_compiled = None


def _best_of(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_size(N, repeats, rng):
    p = LatticeParams(1.0, 0.7, 1.1)
    phase = complex(np.exp(-1j * p.phi))
    ca = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    cb = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    oa = np.empty(N, complex)
    ob = np.empty(N, complex)

    t_np = _best_of(
        lambda: _kernels_np.lattice_apply(ca, cb, oa, ob, p.J_AA, p.J_AB,
                                          phase), repeats)
    t_cy = None
    if _kernels_compiled is not None:
        t_cy = _best_of(
            lambda: _kernels_compiled.lattice_apply(ca, cb, oa, ob, p.J_AA,
                                                    p.J_AB, phase), repeats)
        out_np = np.empty(N, complex), np.empty(N, complex)
        out_cy = np.empty(N, complex), np.empty(N, complex)
        _kernels_np.lattice_apply(ca, cb, *out_np, p.J_AA, p.J_AB, phase)
        _kernels_compiled.lattice_apply(ca, cb, *out_cy, p.J_AA, p.J_AB,
                                        phase)
        err = max(float(np.max(np.abs(out_np[0] - out_cy[0]))),
                  float(np.max(np.abs(out_np[1] - out_cy[1]))))
        assert err < 1e-12, f"kernel implementations disagree by {err:.3g}"

    H = build_hamiltonian(p, N, (EmitterSpec("B", 0, -0.2, 0.1),))
    csr = H.to_sparse().tocsr()
    psi = rng.standard_normal(H.dim) + 1j * rng.standard_normal(H.dim)
    t_csr = _best_of(lambda: csr.dot(psi), repeats)
    return t_np, t_cy, t_csr


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[1_000, 10_000, 100_000],
                    help="ring sizes (unit cells) to benchmark")
    ap.add_argument("--repeats", type=int, default=200,
                    help="repetitions per timing (best-of)")
    args = ap.parse_args(argv)

    if _kernels_compiled is None:
        print("compiled kernel not available; timing the fallback only\n")
    header = f"{'N cells':>10} {'numpy [us]':>12} {'compiled [us]':>14} " \
             f"{'speedup':>8} {'CSR [us]':>10}"
    print(header)
    print("-" * len(header))
    rng = np.random.default_rng(0)
    for N in args.sizes:
        t_np, t_cy, t_csr = bench_size(N, args.repeats, rng)
        cy = f"{t_cy * 1e6:14.1f}" if t_cy is not None else f"{'-':>14}"
        speed = f"{t_np / t_cy:8.1f}x" if t_cy else f"{'-':>8}"
        print(f"{N:>10} {t_np * 1e6:12.1f} {cy} {speed} {t_csr * 1e6:10.1f}")


if __name__ == "__main__":
    main()
