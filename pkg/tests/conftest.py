import pytest

from tensorscape.experiments import ExperimentConfig, run_sweep
from tensorscape.solvers import SolverConfig

# Shared sparse-noise sweep: n = 20, noise std 10, 20 trials per cell over
# both fitting modes.  Session-scoped because it is the long pole of the
# suite (~30 s) and several tests read it.
SWEEP_SEED = 0
SWEEP_COUNTS = (0, 5, 10, 40, 100, 400)


@pytest.fixture(scope="session")
def sparse_noise_sweep():
    config = ExperimentConfig(
        n=20,
        noisy_counts=SWEEP_COUNTS,
        noise_std=10.0,
        trials=20,
        solver=SolverConfig(max_iters=200_000, early_stop_rel_err=0.05),
        modes=("l1", "l2"),
        seed=SWEEP_SEED,
    )
    return run_sweep(config)
