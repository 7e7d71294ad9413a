"""First-order methods for the dense recovery objectives.

``sgd_momentum`` is the stochastic heavy-ball method used by the recovery
experiments: per step it samples a batch of matrix entries without
replacement, averages the (sub)gradient over the batch, and applies
``v <- momentum * v - lr * g; x <- x + v``.  ``subgradient_descent`` is the
deterministic full-batch baseline for arbitrary objective handles.  Both are
bit-reproducible given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from numba import njit

from .objectives import DenseTarget, eval_dense, _check_mode


@dataclass(frozen=True)
class SolverConfig:
    learning_rate: float = 0.001
    momentum: float = 0.9
    max_iters: int = 200_000
    batch_fraction: float = 0.1
    seed: int = 0
    init_std: float = 1.0
    # Stop once the iterate is within this relative error of the ground
    # truth (checked at a fixed cadence); None disables the check.
    early_stop_rel_err: float | None = None
    log_every: int | None = None

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if not (0.0 <= self.momentum < 1.0):
            raise ValueError("momentum must lie in [0, 1)")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be an integer >= 1")
        if not (0.0 < self.batch_fraction <= 1.0):
            raise ValueError("batch_fraction must lie in (0, 1]")
        if self.init_std <= 0:
            raise ValueError("init_std must be > 0")
        if self.early_stop_rel_err is not None and self.early_stop_rel_err <= 0:
            raise ValueError("early_stop_rel_err must be > 0 when set")


@dataclass(frozen=True)
class SolveTrace:
    final_point: np.ndarray
    objective_history: tuple
    iterations_run: int


def default_max_iters(n: int) -> int:
    """Iteration budget by problem size: 2e5 up to n < 50, 5e5 beyond."""
    return 500_000 if n >= 50 else 200_000


def relative_error(x, y, d: int) -> float:
    """Distance to the ground truth modulo the sign ambiguity of even orders:
    ``min over admissible signs of ||x - s*y|| / ||y||``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ny = float(np.linalg.norm(y))
    if ny == 0.0:
        raise ValueError("relative_error is undefined for y = 0")
    signs = (1.0,) if d % 2 == 1 else (1.0, -1.0)
    return min(float(np.linalg.norm(x - s * y)) / ny for s in signs)


_EARLY_STOP_CHECK = 1000


@njit(cache=True)
def _seed_stream(seed):
    np.random.seed(seed)


@njit(cache=True)
def _sgd_segment(x, v, b, n, k, lr, mom, l1, steps, perm):
    """Run ``steps`` heavy-ball iterations in place.

    Each step takes a uniform sample of ``k`` entry indices without
    replacement (partial Fisher-Yates over ``perm``), averages the
    (sub)gradient over the batch, and applies the momentum update.
    """
    m = n * n
    for _ in range(steps):
        for j in range(k):
            r = j + np.random.randint(0, m - j)
            tmp = perm[j]
            perm[j] = perm[r]
            perm[r] = tmp
        g = np.zeros(n)
        for j in range(k):
            idx = perm[j]
            row = idx // n
            col = idx % n
            res = x[row] * x[col] - b[idx]
            if l1:
                w = 1.0 if res > 0.0 else (-1.0 if res < 0.0 else 0.0)
            else:
                w = 2.0 * res
            g[row] += w * x[col]
            g[col] += w * x[row]
        for i in range(n):
            v[i] = mom * v[i] - lr * g[i] / k
            x[i] = x[i] + v[i]


def sgd_momentum(
    target: DenseTarget,
    mode: str,
    config: SolverConfig,
    truth: np.ndarray | None = None,
) -> SolveTrace:
    """Stochastic heavy-ball on the dense l1/l2 objective.

    The gradient estimate averages over ``ceil(batch_fraction * n^2)`` entry
    indices sampled uniformly without replacement each step.  The logged
    objective is the full sum over all entries.  ``truth`` enables the
    optional early stop of ``config.early_stop_rel_err``.
    """
    mode = _check_mode(mode)
    n = target.n
    m = n * n
    k = max(1, math.ceil(config.batch_fraction * m))
    b = np.ascontiguousarray(target.entries.ravel())
    rng = np.random.default_rng(config.seed)

    x = rng.normal(0.0, config.init_std, size=n)
    v = np.zeros(n)
    perm = np.arange(m, dtype=np.int64)
    _seed_stream(config.seed & 0xFFFFFFFF)

    log_every = config.log_every or max(1, config.max_iters // 256)
    check_early = config.early_stop_rel_err is not None and truth is not None

    history = [(0, eval_dense(target, x, mode))]
    it = 0
    while it < config.max_iters:
        stop_at = min(
            ((it // log_every) + 1) * log_every,
            ((it // _EARLY_STOP_CHECK) + 1) * _EARLY_STOP_CHECK if check_early else config.max_iters,
            config.max_iters,
        )
        _sgd_segment(
            x, v, b, n, k,
            config.learning_rate, config.momentum,
            mode == "l1", stop_at - it, perm,
        )
        it = stop_at
        if it % log_every == 0 or it == config.max_iters:
            history.append((it, eval_dense(target, x, mode)))
        if (
            check_early
            and it % _EARLY_STOP_CHECK == 0
            and relative_error(x, truth, 2) < config.early_stop_rel_err
        ):
            if history[-1][0] != it:
                history.append((it, eval_dense(target, x, mode)))
            break
    return SolveTrace(final_point=x, objective_history=tuple(history), iterations_run=it)


def subgradient_descent(
    fun,
    subgrad,
    dim: int,
    config: SolverConfig,
    x0: np.ndarray | None = None,
) -> SolveTrace:
    """Deterministic full-batch subgradient method ``x <- x - lr * g``.

    Starts from ``x0`` when given, else from a Gaussian point drawn from the
    config seed.
    """
    if x0 is not None:
        x = np.array(x0, dtype=float)
        if x.shape != (dim,):
            raise ValueError(f"x0 must have shape ({dim},)")
    else:
        x = np.random.default_rng(config.seed).normal(0.0, config.init_std, size=dim)
    lr = config.learning_rate
    log_every = config.log_every or max(1, config.max_iters // 256)
    history = [(0, float(fun(x)))]
    it = 0
    for it in range(1, config.max_iters + 1):
        x = x - lr * np.asarray(subgrad(x), dtype=float)
        if it % log_every == 0 or it == config.max_iters:
            history.append((it, float(fun(x))))
    return SolveTrace(final_point=x, objective_history=tuple(history), iterations_run=it)
