"""Named example and counterexample functions, each paired with the landscape
property it illustrates.

* ``rational_global``: a one-dimensional function with no spurious local
  minima on the whole line whose tails approach (without attaining) a higher
  value, so it is not quasiconvex.
* ``nopath``: a smooth bivariate function, free of spurious local minima,
  from whose interior point (0, 1/2) no strictly decreasing path reaches the
  minimizing bottom edge.
* ``hestenes``: the classical quartic whose origin admits no descent
  direction yet sits on a strictly decreasing curved path.
* ``takagi_bivariate``: a nowhere-differentiable function, still free of
  spurious local minima, built from the distance-to-nearest-integer series.
* ``composition_counterexample``: the composition of two functions that each
  have no spurious local minima, which itself does have one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .landscape import (
    GLOBAL,
    SPURIOUS_FOUND,
    GridBox,
    GridReport,
    verify_global,
)

CLAIM_GLOBAL = "GLOBAL"
CLAIM_GLOBAL_NO_DESCENT_PATH = "GLOBAL_NO_DESCENT_PATH"
CLAIM_GLOBAL_NOWHERE_DIFF = "GLOBAL_NOWHERE_DIFF"
CLAIM_GLOBAL_NO_DESCENT_DIRECTION = "GLOBAL_NO_DESCENT_DIRECTION"
CLAIM_NOT_GLOBAL_COMPOSITION = "NOT_GLOBAL_COMPOSITION"

_DOMAIN_TOL = 1e-12


def rational_global(x):
    """(x^2 + x^4) / (1 + x^4); minimum 0 at the origin, tails approach 1."""
    x2 = x * x
    x4 = x2 * x2
    return (x2 + x4) / (1.0 + x4)


def nopath(x1, x2):
    """Two-branch smooth function on [-1,1]^2 minimized on the bottom edge.

    Both branches share the oscillation amplitude
    ``A = 4 |x1|^3 (sin(-1/|x1|) + 1)``; the cubic weight kills every
    A-term as x1 -> 0, which defines the continuous extension there.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    scalar = x1.ndim == 0 and x2.ndim == 0
    x1, x2 = np.broadcast_arrays(x1, x2)
    if np.any(np.abs(x1) > 1 + _DOMAIN_TOL) or np.any(np.abs(x2) > 1 + _DOMAIN_TOL):
        raise ValueError("nopath is defined on the closed box [-1,1]^2")
    a = np.abs(x1)
    safe = np.where(a == 0.0, 1.0, a)
    amp = np.where(a == 0.0, 0.0, 4.0 * a**3 * (np.sin(-1.0 / safe) + 1.0))
    upper = -amp * (1.0 - x2)
    lower = (
        (3.0 * amp - 2.0) * x2**3
        + (5.0 * amp - 3.0) * x2**2
        + amp * x2
        - amp
    )
    out = np.where(x2 >= 0.0, upper, lower)
    return float(out) if scalar else out


def hestenes(x1, x2):
    """(x2 - x1^2)(x2 - 4 x1^2): no descent direction at the origin, yet the
    curved path ``hestenes_descent_path`` decreases strictly from it."""
    return (x2 - x1 * x1) * (x2 - 4.0 * x1 * x1)


def hestenes_descent_path(t):
    """Path (sqrt(10)/4 * t, t^2) along which ``hestenes`` equals -(9/16) t^4."""
    t = np.asarray(t, dtype=float)
    return np.stack([np.sqrt(10.0) / 4.0 * t, t * t], axis=-1)


def takagi_bivariate(x1, x2, terms: int = 48):
    """|2 x2 - 1| times the distance-to-nearest-integer series in x1.

    The series is truncated after ``terms`` terms; each term is at most
    ``2**-(n+1)``, so the truncation error is below ``2**-terms * |2 x2 - 1|``.
    The default 48 terms puts the tail under double-precision visibility.
    """
    if int(terms) != terms or terms < 1:
        raise ValueError("terms must be an integer >= 1")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    scalar = x1.ndim == 0 and x2.ndim == 0
    x1, x2 = np.broadcast_arrays(x1, x2)
    total = np.zeros_like(x1)
    for k in range(int(terms)):
        v = np.ldexp(x1, k)
        total = total + np.abs(v - np.round(v)) / (1 << k)
    out = np.abs(2.0 * x2 - 1.0) * total
    return float(out) if scalar else out


def composition_counterexample(x):
    """|max(-1, |x| - 2)|: outer and inner pieces each have no spurious local
    minima on the line, but the composition has a flat one at height 1."""
    return np.abs(np.maximum(-1.0, np.abs(x) - 2.0))


@dataclass(frozen=True)
class GalleryEntry:
    """One example function with its domain box, default verification
    resolution, and the landscape property claimed for it."""

    name: str
    arity: int
    domain_box: GridBox
    claimed_property: str
    fn: object
    resolution: int

    def handle(self):
        """Adapter mapping an ``(m, arity)`` batch (or 1-D array for arity 1)
        to values, as the grid engine expects."""
        if self.arity == 1:
            return self.fn
        return lambda pts: self.fn(pts[..., 0], pts[..., 1])

    def expected_verdict(self) -> str:
        if self.claimed_property == CLAIM_NOT_GLOBAL_COMPOSITION:
            return SPURIOUS_FOUND
        return GLOBAL


GALLERY = {
    e.name: e
    for e in [
        GalleryEntry(
            name="rational_global",
            arity=1,
            domain_box=GridBox([-5.0], [5.0], 1001),
            claimed_property=CLAIM_GLOBAL,
            fn=rational_global,
            resolution=1001,
        ),
        GalleryEntry(
            name="nopath",
            arity=2,
            domain_box=GridBox([-1.0, -1.0], [1.0, 1.0], 201),
            claimed_property=CLAIM_GLOBAL_NO_DESCENT_PATH,
            fn=nopath,
            resolution=201,
        ),
        GalleryEntry(
            # Even resolution keeps the exact origin off the grid: the
            # quadratic channel that drains the origin is invisible at any
            # finite spacing, so an on-grid origin is a spurious grid
            # minimum by discretization, not by the landscape.
            name="hestenes",
            arity=2,
            domain_box=GridBox([-1.0, -1.0], [1.0, 1.0], 200),
            claimed_property=CLAIM_GLOBAL_NO_DESCENT_DIRECTION,
            fn=hestenes,
            resolution=200,
        ),
        GalleryEntry(
            # Box symmetric about 1/2 with odd resolution so the minimizing
            # midline is on the grid; the domain stays inside the open unit
            # square.
            name="takagi_bivariate",
            arity=2,
            domain_box=GridBox([1 / 16, 1 / 16], [15 / 16, 15 / 16], 201),
            claimed_property=CLAIM_GLOBAL_NOWHERE_DIFF,
            fn=takagi_bivariate,
            resolution=201,
        ),
        GalleryEntry(
            name="composition_counterexample",
            arity=1,
            domain_box=GridBox([-4.0], [4.0], 801),
            claimed_property=CLAIM_NOT_GLOBAL_COMPOSITION,
            fn=composition_counterexample,
            resolution=801,
        ),
    ]
}


def get_entry(name: str) -> GalleryEntry:
    try:
        return GALLERY[name]
    except KeyError:
        raise KeyError(
            f"unknown gallery entry {name!r}; choices: {sorted(GALLERY)}"
        ) from None


def verify_entry(name: str, resolution: int | None = None, tol: float = 1e-9):
    """Run the grid oracle on one entry's box.  Returns ``(report, ok)`` where
    ``ok`` means the verdict matches the claimed property."""
    entry = get_entry(name)
    res = resolution or entry.resolution
    box = GridBox(entry.domain_box.lower, entry.domain_box.upper, res)
    report = verify_global(entry.handle(), box, tol)
    return report, report.verdict == entry.expected_verdict()


def surface_rows(name: str, resolution: int | None = None):
    """Rows ``(x1, value)`` or ``(x1, x2, value)`` over the entry's box, for
    delimited export."""
    entry = get_entry(name)
    res = resolution or entry.resolution
    box = GridBox(entry.domain_box.lower, entry.domain_box.upper, res)
    pts = box.points()
    vals = entry.handle()(pts[:, 0] if entry.arity == 1 else pts)
    return np.column_stack([pts, np.asarray(vals)])
