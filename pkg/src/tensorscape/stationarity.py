"""First-order stationarity analysis of the L1 tensor objective.

The Clarke condition for ``eval_f1`` at ``x`` reads, per coordinate ``i``,

    0 in sum_U prod(x[U]) * sign(prod(x[U]) * x_i - prod(y[U]) * y_i)

with the sum over (d-1)-tuples ``U`` and set-valued sign([-1,1] at 0).  Each
coordinate sum is an interval; ``x`` is stationary when every interval
contains zero.  When all ``y_i`` are nonzero and ``x != 0`` the condition
normalizes, in the ratio variable ``t``, to an increasing step function

    F(t) = sum_U |prod(x[U])| * sign(t - prod(y[U]) / prod(x[U]))

whose roots must contain every ratio ``x_i / y_i``.  This module builds that
staircase, checks the structural facts that follow from it (zero pattern of
``x`` against zeros of ``y``; all product ratios at most one; separation of
roots from jump points), and constructs the classical family of stationary
points that are not local minima.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .objectives import (
    TensorProblem,
    _check_point,
    _ratio_extremes,
    eval_f1,
    tuple_products,
)

DEFAULT_TOL = 1e-9

# Jump points that agree to this relative tolerance are merged; repeated
# index tuples produce identical rationals up to rounding.
JUMP_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class Staircase:
    """Increasing step function with set-valued jumps.

    ``jumps`` holds ``(t, w)`` pairs sorted by ``t`` with aggregated weights
    ``w > 0``; crossing a jump raises the value by ``2 w``.  ``base`` is the
    value when every sign term sits at -1, i.e. the value below all jumps.
    """

    jumps: tuple
    base: float

    def eval(self, t: float) -> tuple:
        """Interval value ``[lo, hi]`` at ``t``; the interval is wider than a
        point exactly when ``t`` sits on a jump."""
        lo = self.base
        hi = self.base
        for tj, w in self.jumps:
            if tj < t:
                lo += 2.0 * w
                hi += 2.0 * w
            elif tj == t or math.isclose(tj, t, rel_tol=JUMP_MERGE_TOL, abs_tol=0.0):
                hi += 2.0 * w
        return (lo, hi)

    def is_root(self, t: float, tol: float = DEFAULT_TOL) -> bool:
        lo, hi = self.eval(t)
        return lo <= tol and hi >= -tol


@dataclass(frozen=True)
class StationarityReport:
    """Outcome of the Clarke inclusion test plus the structural checks that
    must hold at stationary points."""

    stationary: bool
    per_coordinate_interval: tuple
    zero_pattern_ok: bool
    ratio_bound_ok: bool
    max_ratio_product: float
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "stationary": self.stationary,
            "per_coordinate_interval": [list(iv) for iv in self.per_coordinate_interval],
            "zero_pattern_ok": self.zero_pattern_ok,
            "ratio_bound_ok": self.ratio_bound_ok,
            "max_ratio_product": self.max_ratio_product,
            "tolerance": self.tolerance,
        }


def clarke_interval(prob: TensorProblem, x, i: int) -> tuple:
    """Exact interval value of the coordinate-``i`` Clarke sum.

    Terms whose residual vanishes contribute ``+/- |coefficient|`` to the
    interval ends; all other terms contribute their signed value to both.
    """
    x = _check_point(prob, x)
    if x.ndim != 1:
        raise ValueError("clarke_interval expects a single point of shape (n,)")
    if not (0 <= i < prob.n):
        raise ValueError(f"coordinate index {i} out of range for n={prob.n}")
    u = tuple_products(x, prob.d - 1)
    v = tuple_products(prob.y, prob.d - 1)
    r = u * x[i] - v * prob.y[i]
    zero = r == 0.0
    core = float((u[~zero] * np.sign(r[~zero])).sum())
    slack = float(np.abs(u[zero]).sum())
    return (core - slack, core + slack)


def is_clarke_stationary(prob: TensorProblem, x, tol: float = DEFAULT_TOL) -> StationarityReport:
    """Test ``0 in`` every coordinate interval within ``tol``, and evaluate the
    two structural consequences: coordinates facing ``y_i = 0`` vanish, and no
    product ratio exceeds one."""
    x = _check_point(prob, x)
    intervals = tuple(clarke_interval(prob, x, i) for i in range(prob.n))
    stationary = all(lo <= tol and hi >= -tol for lo, hi in intervals)

    nz = prob.y != 0.0
    zero_pattern_ok = bool(np.all(np.abs(x[~nz]) <= tol))
    if nz.any():
        mx, _ = _ratio_extremes(x[nz] / prob.y[nz], prob.d)
        max_ratio = float(mx)
    else:
        max_ratio = 0.0
    ratio_bound_ok = max_ratio <= 1.0 + tol

    return StationarityReport(
        stationary=stationary,
        per_coordinate_interval=intervals,
        zero_pattern_ok=zero_pattern_ok,
        ratio_bound_ok=ratio_bound_ok,
        max_ratio_product=max_ratio,
        tolerance=tol,
    )


def build_staircase(prob: TensorProblem, x) -> Staircase:
    """Normalized staircase of the Clarke condition at ``x``.

    Jump points are the ratios ``prod(y[U]) / prod(x[U])`` over (d-1)-tuples
    with nonzero x-product, merged to relative tolerance and carrying weights
    ``sum |prod(x[U])|``.  Requires every ``y_i`` nonzero and ``x != 0`` (the
    jump set is empty at the origin).
    """
    if np.any(prob.y == 0.0):
        raise ValueError("staircase requires all entries of y nonzero")
    x = _check_point(prob, x)
    if x.ndim != 1:
        raise ValueError("build_staircase expects a single point of shape (n,)")
    if not np.any(x != 0.0):
        raise ValueError("staircase is empty at x = 0")
    u = tuple_products(x, prob.d - 1)
    v = tuple_products(prob.y, prob.d - 1)
    nz = u != 0.0
    u, v = u[nz], v[nz]
    points = v / u
    weights = np.abs(u)

    order = np.argsort(points)
    points, weights = points[order], weights[order]
    merged = []
    for t, w in zip(points, weights):
        if merged and math.isclose(merged[-1][0], t, rel_tol=JUMP_MERGE_TOL, abs_tol=0.0):
            merged[-1][1] += w
        else:
            merged.append([t, w])
    jumps = tuple((float(t), float(w)) for t, w in merged)
    base = -float(weights.sum())
    return Staircase(jumps=jumps, base=base)


def verify_root_jump_separation(prob: TensorProblem, x, tol: float = DEFAULT_TOL) -> bool:
    """For a stationary ``x``: every positive jump point upper-bounds all
    ratios ``x_i / y_i`` and every negative jump point lower-bounds them.

    Raises if ``x`` fails the stationarity test (the separation property is
    only guaranteed at stationary points) or if the staircase is undefined.
    """
    report = is_clarke_stationary(prob, x, tol)
    if not report.stationary:
        raise ValueError("verify_root_jump_separation requires a stationary point")
    stair = build_staircase(prob, x)
    ratios = np.asarray(x, dtype=float) / prob.y
    rmax, rmin = float(ratios.max()), float(ratios.min())
    for t, _ in stair.jumps:
        slack = tol * max(1.0, abs(t))
        if t > 0 and rmax > t + slack:
            return False
        if t < 0 and rmin < t - slack:
            return False
    return True


def make_stationary_non_minimum(prob: TensorProblem, seed: int) -> np.ndarray:
    """Construct a stationary point of ``eval_f1`` that is not a local minimum.

    Two coordinates get ratios ``x_j/y_j = s * 2**-m * |y_k|`` and
    ``x_k/y_k = -s * 2**-m * |y_j|`` so the weighted ratio sum
    ``sum_i |y_i| x_i / y_i`` cancels exactly (power-of-two scaling is exact
    in binary floating point); the scale keeps every ratio at most 1/2, which
    puts the point strictly inside the closed-form region where the objective
    equals a constant minus the d-th power of that vanishing sum.  For d >= 2
    the gradient there is zero while either sign of the sum descends.
    """
    if prob.n < 2:
        raise ValueError("construction needs n >= 2")
    if prob.d < 2:
        raise ValueError("construction needs tensor order d >= 2")
    if np.any(prob.y == 0.0):
        raise ValueError("construction requires all entries of y nonzero")
    rng = np.random.default_rng(seed)
    j, k = rng.choice(prob.n, size=2, replace=False)
    s = 1.0 if rng.random() < 0.5 else -1.0
    w = np.abs(prob.y)
    m = max(0, math.ceil(math.log2(max(w[j], w[k])))) + 1 + int(rng.integers(0, 3))
    scale = 2.0 ** (-m)
    ratios = np.zeros(prob.n)
    ratios[j] = s * scale * w[k]
    ratios[k] = -s * scale * w[j]
    return ratios * prob.y


def find_descent_on_sphere(
    prob: TensorProblem,
    x,
    radii=(1e-3, 1e-2),
    samples: int = 10_000,
    seed: int = 0,
):
    """Randomized witness that ``x`` is not a local minimum of ``eval_f1``.

    Draws ``samples`` uniform points on spheres of the given radii around
    ``x`` and returns ``(point, value)`` for the best strict improvement, or
    ``None`` when no sampled point improves (reported, never hidden).
    """
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    f_x = eval_f1(prob, x)
    best = None
    for radius in radii:
        z = rng.normal(size=(samples, prob.n))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        pts = x[None, :] + radius * z
        vals = eval_f1(prob, pts)
        k = int(np.argmin(vals))
        if vals[k] < f_x and (best is None or vals[k] < best[1]):
            best = (pts[k], float(vals[k]))
    return best
