"""Shared fixtures; the expensive Monte-Carlo runs are session-scoped."""
import os
import time

import pytest

from twophoton import ModelParams
from twophoton.langevin import TrajectoryConfig, run_ensemble_detailed

ACCEPTANCE_POINTS = (17.0, 20.0, 23.0)
G_OVER_ETA = 20.0


def _threads() -> int:
    return int(os.environ.get("TWOPHOTON_TEST_THREADS", "4"))


@pytest.fixture(scope="session")
def threads() -> int:
    return _threads()


@pytest.fixture(scope="session")
def default_ensembles(threads):
    """Stratonovich runs with the production defaults at the three
    reference detunings, plus the total wall time."""
    config = TrajectoryConfig()
    results = {}
    t0 = time.monotonic()
    for delta in ACCEPTANCE_POINTS:
        params = ModelParams(delta, G_OVER_ETA)
        results[delta] = run_ensemble_detailed(params, config, threads=threads)
    elapsed = time.monotonic() - t0
    return results, elapsed


@pytest.fixture(scope="session")
def scaling_report(threads):
    """Reduced-model rescaling run at N in {1, 8}, with wall time."""
    from twophoton.criticality import verify_reduced_model_scaling

    t0 = time.monotonic()
    report = verify_reduced_model_scaling(
        ModelParams(G_OVER_ETA, G_OVER_ETA),
        [1.0, 8.0],
        base_config=TrajectoryConfig(n_traj=1000, seed=777),
        threads=threads,
    )
    return report, time.monotonic() - t0


@pytest.fixture(scope="session")
def scheme_pairs(threads):
    """Matched Ito/Stratonovich runs at a step fine enough that the
    O(dt) discretization bias sits below the statistical resolution,
    so the comparison probes the calculus equivalence itself."""
    base = dict(
        dt=1.5e-4,
        t_burn=10.0,
        t_sample=100.0,
        sample_stride=10,
        n_traj=800,
        seed=20250814,
    )
    cfg_strat = TrajectoryConfig(scheme="stratonovich_heun", **base)
    cfg_ito = TrajectoryConfig(scheme="ito_euler_maruyama", **base)
    pairs = {}
    for delta in ACCEPTANCE_POINTS:
        params = ModelParams(delta, G_OVER_ETA)
        pairs[delta] = (
            run_ensemble_detailed(params, cfg_strat, threads=threads),
            run_ensemble_detailed(params, cfg_ito, threads=threads),
        )
    return pairs
