"""Timing comparison of the compiled and pure-Python stepping kernels.

Both backends produce bitwise-identical trajectories; the only
difference is speed.  Run this after an editable install:

    python3 benchmarks/benchmark_kernels.py
"""
import argparse
import time

from twophoton import ModelParams, available_backends
from twophoton.langevin import TrajectoryConfig, run_ensemble_detailed


def time_backend(backend: str, params: ModelParams, config: TrajectoryConfig,
                 threads: int, repeats: int) -> tuple:
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = run_ensemble_detailed(
            params, config, threads=threads, backend=backend
        )
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--delta", type=float, default=17.0)
    parser.add_argument("--g-over-eta", type=float, default=20.0)
    parser.add_argument("--n-traj", type=int, default=64)
    parser.add_argument("--t-sample", type=float, default=50.0)
    parser.add_argument("--threads", type=int, default=2)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    params = ModelParams(args.delta, args.g_over_eta)
    config = TrajectoryConfig(
        dt=1e-3, t_burn=5.0, t_sample=args.t_sample, sample_stride=10,
        n_traj=args.n_traj, seed=4242,
    )
    steps = config.n_traj * (config.burn_steps + config.sample_steps)
    print(f"workload: {config.n_traj} trajectories, "
          f"{steps:.3g} total steps, {args.threads} threads")

    timings = {}
    reference = None
    for backend in available_backends():
        elapsed, result = time_backend(
            backend, params, config, args.threads, args.repeats
        )
        timings[backend] = elapsed
        rate = steps / elapsed / 1e6
        print(f"{backend:>9}: {elapsed:8.3f} s  ({rate:6.2f} M steps/s)")
        means = tuple(result.estimates[k].mean for k in ("x2", "p2", "xp_sym"))
        if reference is None:
            reference = means
        elif means != reference:
            raise SystemExit("backends disagree; this is a bug")

    if "compiled" in timings and "python" in timings:
        print(f"{'speedup':>9}: {timings['python'] / timings['compiled']:8.1f}x")
    print("moment agreement: bitwise")


if __name__ == "__main__":
    main()
