"""Objective functions for rank-one tensor decomposition.

Given a ground-truth vector ``y`` of length ``n`` and a tensor order ``d``,
the target tensor is the d-fold outer power of ``y`` and the decision
variable is a vector ``x`` whose d-fold outer power should match it.  This
module evaluates, exactly at desk scale (``n**d`` bounded by a budget):

* ``eval_f1``   -- sum of absolute entrywise residuals (the L1 objective),
* ``eval_fp``   -- sum of residual magnitudes raised to ``p > 1``,
* ``eval_finf`` -- maximum residual magnitude,
* ``eval_hp``   -- p-norm of the residual tensor, ``eval_fp ** (1/p)``,

their gradients / subgradient selections, the dense noisy-matrix variants
used by the recovery experiments, the membership test for the region where
every d-fold product ratio is at most one, and the polynomial closed form
that the L1 objective takes on that region.

All evaluation functions accept a single point of shape ``(n,)`` or a batch
of shape ``(..., n)``; batched calls return an array of values with the
leading shape preserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

DEFAULT_TUPLE_BUDGET = 10_000_000

# Slack on the "product ratio <= 1" comparison so that boundary points such
# as x = +/-y (all ratios exactly one) test inside the region.
REGION_TOL = 1e-12

MODE_L1 = "l1"
MODE_L2 = "l2"


@dataclass(frozen=True)
class TensorProblem:
    """Rank-one decomposition instance: ground truth ``y`` and order ``d``.

    The constructor rejects instances whose naive evaluation cost ``n**d``
    exceeds ``max_tuples`` (default 10**7): the underlying theory is
    dimension-free but exact tuple enumeration is not.
    """

    y: np.ndarray
    d: int
    max_tuples: int = DEFAULT_TUPLE_BUDGET

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise ValueError("y must be a nonempty 1-D real vector")
        if not np.all(np.isfinite(y)):
            raise ValueError("y must have finite entries")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("tensor order d must be an integer >= 1")
        if y.size ** int(self.d) > self.max_tuples:
            raise ValueError(
                f"instance too large: n**d = {y.size}**{self.d} exceeds the "
                f"tuple budget {self.max_tuples}"
            )
        y.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "d", int(self.d))

    @property
    def n(self) -> int:
        return self.y.size


@dataclass(frozen=True)
class DenseTarget:
    """Observed n-by-n matrix ``b`` with entries ``y_i y_j`` except where noise
    replaced them; ``noise_mask`` records the replaced positions."""

    entries: np.ndarray
    noise_mask: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        b = np.array(self.entries, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] < 1:
            raise ValueError("entries must be a square matrix")
        if not np.all(np.isfinite(b)):
            raise ValueError("entries must be finite")
        n = b.shape[0]
        mask = frozenset((int(i), int(j)) for i, j in self.noise_mask)
        for i, j in mask:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"noise position {(i, j)} out of bounds for n={n}")
        b.setflags(write=False)
        object.__setattr__(self, "entries", b)
        object.__setattr__(self, "noise_mask", mask)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def tuple_products(x: np.ndarray, d: int) -> np.ndarray:
    """All products ``x[i_1] * ... * x[i_d]`` over index tuples, shape ``(..., n**d)``.

    Built by one outer-product expansion per factor so each prefix product is
    computed once.  ``d = 0`` returns the empty product (all ones).
    """
    x = np.asarray(x, dtype=float)
    if d == 0:
        return np.ones(x.shape[:-1] + (1,))
    p = x
    for _ in range(d - 1):
        p = (p[..., :, None] * x[..., None, :]).reshape(x.shape[:-1] + (-1,))
    return p


def _check_point(prob: TensorProblem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim < 1 or x.shape[-1] != prob.n:
        raise ValueError(f"x must have {prob.n} entries in its last axis")
    return x


def _maybe_scalar(values: np.ndarray, x: np.ndarray):
    if x.ndim == 1:
        return float(values)
    return values


def _residuals(prob: TensorProblem, x: np.ndarray) -> np.ndarray:
    return tuple_products(x, prob.d) - tuple_products(prob.y, prob.d)


def eval_f1(prob: TensorProblem, x) -> float:
    """Sum of absolute residuals between the outer powers of x and y."""
    x = _check_point(prob, x)
    return _maybe_scalar(np.abs(_residuals(prob, x)).sum(axis=-1), x)


def _check_p(p: float):
    if not (p > 1.0):
        raise ValueError(f"exponent p must be > 1, got {p}")


def eval_fp(prob: TensorProblem, x, p: float) -> float:
    """Sum of residual magnitudes raised to the power ``p > 1``."""
    _check_p(p)
    x = _check_point(prob, x)
    return _maybe_scalar((np.abs(_residuals(prob, x)) ** p).sum(axis=-1), x)


def eval_finf(prob: TensorProblem, x) -> float:
    """Largest residual magnitude over all index tuples."""
    x = _check_point(prob, x)
    return _maybe_scalar(np.abs(_residuals(prob, x)).max(axis=-1), x)


def eval_hp(prob: TensorProblem, x, p: float) -> float:
    """p-norm of the residual tensor; tends to ``eval_finf`` as p grows.

    Evaluated as ``max * (sum (|r|/max)**p)**(1/p)`` so large exponents do not
    overflow.
    """
    _check_p(p)
    x = _check_point(prob, x)
    r = np.abs(_residuals(prob, x))
    m = r.max(axis=-1)
    safe = np.where(m > 0, m, 1.0)
    out = safe * ((r / safe[..., None]) ** p).sum(axis=-1) ** (1.0 / p)
    out = np.where(m > 0, out, 0.0)
    return _maybe_scalar(out, x)


def eval_lp(prob: TensorProblem, x, p: float) -> float:
    """Dispatch on the exponent: ``p = 1`` gives the L1 sum, finite ``p > 1``
    the p-th power sum, ``p = inf`` the max objective."""
    if p == 1.0:
        return eval_f1(prob, x)
    if math.isinf(p):
        return eval_finf(prob, x)
    return eval_fp(prob, x, p)


def _signed_power(r: np.ndarray, p: float) -> np.ndarray:
    """``|r|**(p-2) * r`` with the value 0 at r = 0 (the limit for p > 1)."""
    out = np.zeros_like(r)
    nz = r != 0.0
    out[nz] = np.abs(r[nz]) ** (p - 2.0) * r[nz]
    return out


def grad_fp(prob: TensorProblem, x, p: float) -> np.ndarray:
    """Exact gradient of ``eval_fp`` at a single point.

    Coordinate ``i`` sums, over all (d-1)-tuples ``U``, the partial product
    ``prod(x[U])`` times ``|r|**(p-2) * r`` of the completed residual; the
    multiplicity of the coordinate contributes the leading factor ``p * d``.
    No division by ``x_i`` is involved, so zero coordinates are fine.
    """
    _check_p(p)
    x = _check_point(prob, x)
    if x.ndim != 1:
        raise ValueError("grad_fp expects a single point of shape (n,)")
    u = tuple_products(x, prob.d - 1)
    v = tuple_products(prob.y, prob.d - 1)
    r = u[:, None] * x[None, :] - v[:, None] * prob.y[None, :]
    return p * prob.d * (u[:, None] * _signed_power(r, p)).sum(axis=0)


def subgrad_f1(prob: TensorProblem, x) -> np.ndarray:
    """A Clarke subdifferential element of ``eval_f1`` with sign(0) := 0.

    Equals the gradient wherever no residual vanishes.
    """
    x = _check_point(prob, x)
    if x.ndim != 1:
        raise ValueError("subgrad_f1 expects a single point of shape (n,)")
    u = tuple_products(x, prob.d - 1)
    v = tuple_products(prob.y, prob.d - 1)
    r = u[:, None] * x[None, :] - v[:, None] * prob.y[None, :]
    return prob.d * (u[:, None] * np.sign(r)).sum(axis=0)


def _check_mode(mode: str) -> str:
    m = str(mode).lower()
    if m not in (MODE_L1, MODE_L2):
        raise ValueError(f"mode must be 'l1' or 'l2', got {mode!r}")
    return m


def eval_dense(target: DenseTarget, x, mode: str) -> float:
    """Fit of ``outer(x, x)`` to the observed matrix: entrywise absolute sum
    (``l1``) or squared sum (``l2``)."""
    mode = _check_mode(mode)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != target.n:
        raise ValueError(f"x must be a vector of length {target.n}")
    r = np.outer(x, x) - target.entries
    if mode == MODE_L1:
        return float(np.abs(r).sum())
    return float((r * r).sum())


def subgrad_dense(target: DenseTarget, x, mode: str) -> np.ndarray:
    """(Sub)gradient of ``eval_dense``: the l2 branch is the classical
    gradient, the l1 branch uses the selection sign(0) := 0."""
    mode = _check_mode(mode)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != target.n:
        raise ValueError(f"x must be a vector of length {target.n}")
    r = np.outer(x, x) - target.entries
    w = np.sign(r) if mode == MODE_L1 else 2.0 * r
    return w @ x + w.T @ x


def _ratio_extremes(ratios: np.ndarray, d: int):
    """Max and min of products of ``d`` factors, each chosen from the last
    axis of ``ratios`` independently.  O(d) interval propagation."""
    mx = ratios.max(axis=-1)
    mn = ratios.min(axis=-1)
    cmx, cmn = mx, mn
    for _ in range(d - 1):
        cands = np.stack([cmx * mx, cmx * mn, cmn * mx, cmn * mn])
        cmx = cands.max(axis=0)
        cmn = cands.min(axis=0)
    return cmx, cmn


def max_ratio_product(prob: TensorProblem, x) -> float:
    """Largest product ratio ``prod(x[T]) / prod(y[T])`` over all d-tuples T.

    Requires every ``y_i`` nonzero.
    """
    if np.any(prob.y == 0.0):
        raise ValueError("max_ratio_product requires all entries of y nonzero")
    x = _check_point(prob, x)
    mx, _ = _ratio_extremes(x / prob.y, prob.d)
    return _maybe_scalar(mx, x)


def in_closed_form_region(prob: TensorProblem, x, tol: float = REGION_TOL):
    """True where every d-tuple product ratio is at most ``1 + tol``.

    On this region the L1 objective reduces to ``closed_form_f1``.  Computed
    in O(n d) by tracking the extreme achievable products; brute-force tuple
    enumeration serves as the test oracle.
    """
    if np.any(prob.y == 0.0):
        raise ValueError("region membership requires all entries of y nonzero")
    x = _check_point(prob, x)
    mx, _ = _ratio_extremes(x / prob.y, prob.d)
    inside = mx <= 1.0 + tol
    if x.ndim == 1:
        return bool(inside)
    return inside


def closed_form_f1(prob: TensorProblem, x) -> float:
    """Polynomial form of the L1 objective, valid only where all product
    ratios are at most one:

        (sum_i |y_i|)**d - (sum_i |y_i| * x_i / y_i)**d

    Points outside that region are rejected (the identity fails there).
    """
    x = _check_point(prob, x)
    inside = in_closed_form_region(prob, x)
    if not np.all(inside):
        raise ValueError("closed_form_f1 evaluated outside its validity region")
    w = np.abs(prob.y)
    s = ((x / prob.y) * w).sum(axis=-1)
    value = w.sum() ** prob.d - s ** prob.d
    return _maybe_scalar(value, x)
