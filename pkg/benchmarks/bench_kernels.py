"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from teledecay import _pykernels, channels
from teledecay.channels import EnvironmentKind
from teledecay.qops import BlochAngles, bell_phi_plus, bloch_pure_state, tensor

try:
    from teledecay import _ckernels
except ImportError:
    _ckernels = None


def workloads():
    rho = tensor(bloch_pure_state(BlochAngles(1.0, 2.0)), bell_phi_plus())
    jumps, rates = channels._full_jumps(EnvironmentKind.NOISY, channels.case_rates(1), 3)
    kraus = channels.kraus_single(EnvironmentKind.NOISY, 0.7)
    return {
        "lindblad_rhs (8x8)": lambda m: m.lindblad_rhs(rho, jumps, rates),
        "rk4_lindblad (8x8, 1000 steps)": lambda m: m.rk4_lindblad(rho, jumps, rates, 1.0, 1000),
        "apply_local_kraus (8x8, qubit 2)": lambda m: m.apply_local_kraus(rho, kraus, 1, 3),
    }


def best_time(fn, repeat):
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the numpy fallback is timed")
    print(f"{'kernel':<36}{'python [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for name, call in workloads().items():
        t_py = best_time(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<36}{t_py * 1e6:>14.1f}{'-':>14}{'-':>10}")
            continue
        np.testing.assert_allclose(call(_ckernels), call(_pykernels), atol=1e-12)
        t_cy = best_time(lambda: call(_ckernels), args.repeat)
        print(f"{name:<36}{t_py * 1e6:>14.1f}{t_cy * 1e6:>14.1f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
