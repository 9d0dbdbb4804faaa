"""General Bernstein-polynomial smoothing of piecewise-linear functions.

A piecewise-linear activation is described by its breakpoints, per-segment
slopes, and value at zero.  Each breakpoint (kink) is replaced by a Bezier
transition of chosen degree on [center - epsilon, center + epsilon] whose
control points are solved from value and slope matching at both ends, so
the smoothed function is C^1 by construction.

Evaluation uses the De Casteljau recursion; the direct binomial sum (via
``bernstein_basis``) is kept as an independent cross-check for tests.
"""

import math
from dataclasses import dataclass

import numpy as np

# the two linear pieces must meet at the breakpoint this closely for the
# degree-2 solve to be consistent
MEET_TOL = 1e-9


def bernstein_basis(k: int, n: int, t: float) -> float:
    """Bernstein basis polynomial b_{k,n}(t) = C(n,k) t^k (1-t)^(n-k)."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return math.comb(n, k) * t**k * (1.0 - t) ** (n - k)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function on the whole real line.

    ``slopes[i]`` applies on the i-th segment; segment 0 is everything left
    of the first breakpoint.  Anchoring by ``value_at_zero`` (instead of a
    vertex list) keeps the two unbounded end segments natural.
    """

    breakpoints: tuple
    slopes: tuple
    value_at_zero: float = 0.0

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        slopes = tuple(float(s) for s in self.slopes)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)
        if len(slopes) == 0:
            raise ValueError("slopes must be non-empty")
        if len(slopes) != len(bps) + 1:
            raise ValueError(
                f"need len(slopes) == len(breakpoints) + 1, "
                f"got {len(slopes)} and {len(bps)}"
            )
        if any(not np.isfinite(b) for b in bps) or any(
            not np.isfinite(s) for s in slopes
        ):
            raise ValueError("breakpoints and slopes must be finite")
        if not np.isfinite(self.value_at_zero):
            raise ValueError("value_at_zero must be finite")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    def _breakpoint_values(self):
        """Function value at each breakpoint, walked out from the anchor at 0."""
        bps = self.breakpoints
        if not bps:
            return ()
        # index of the segment containing 0
        j = int(np.searchsorted(bps, 0.0, side="right"))
        vals = [0.0] * len(bps)
        if j > 0:
            # walk left from 0 to bps[j-1], then onward
            vals[j - 1] = self.value_at_zero + self.slopes[j] * (bps[j - 1] - 0.0)
            for i in range(j - 2, -1, -1):
                vals[i] = vals[i + 1] + self.slopes[i + 1] * (bps[i] - bps[i + 1])
        if j < len(bps):
            vals[j] = self.value_at_zero + self.slopes[j] * (bps[j] - 0.0)
            for i in range(j + 1, len(bps)):
                vals[i] = vals[i - 1] + self.slopes[i] * (bps[i] - bps[i - 1])
        return tuple(vals)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if not self.breakpoints:
            out = self.value_at_zero + self.slopes[0] * x
            return out if out.ndim else float(out)
        bps = np.asarray(self.breakpoints)
        bvals = np.asarray(self._breakpoint_values())
        seg = np.searchsorted(bps, x, side="right")
        # anchor each point at its nearest breakpoint (left one if it exists)
        anchor_idx = np.clip(seg - 1, 0, len(bps) - 1)
        out = bvals[anchor_idx] + np.take(self.slopes, seg) * (x - bps[anchor_idx])
        return out if out.ndim else float(out)

    def slope_at(self, x: float) -> float:
        """Slope of the segment containing x (right-continuous at breakpoints)."""
        seg = int(np.searchsorted(self.breakpoints, x, side="right"))
        return self.slopes[seg]


@dataclass(frozen=True)
class BernsteinTransition:
    """Bezier transition replacing one kink on [center - eps, center + eps]."""

    center: float
    epsilon: float
    degree: int
    control_points: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "control_points", tuple(float(b) for b in self.control_points)
        )
        if self.degree < 2:
            raise ValueError(f"degree must be >= 2, got {self.degree}")
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if len(self.control_points) != self.degree + 1:
            raise ValueError(
                f"need degree + 1 = {self.degree + 1} control points, "
                f"got {len(self.control_points)}"
            )
        if any(not np.isfinite(b) for b in self.control_points):
            raise ValueError("control points must be finite")

    @property
    def lo(self) -> float:
        return self.center - self.epsilon

    @property
    def hi(self) -> float:
        return self.center + self.epsilon


def solve_transition(
    left_slope: float,
    right_slope: float,
    left_value: float,
    right_value: float,
    center: float,
    epsilon: float,
    degree: int = 2,
) -> BernsteinTransition:
    """Solve Bezier control points from C^0/C^1 matching at both interval ends.

    ``left_value``/``right_value`` are the outer segments' values at
    center -/+ epsilon.  Matching values fixes beta_0 and beta_n; matching
    slopes (with the interval's affine rescaling to [0, 1]) fixes beta_1 and
    beta_{n-1}.  For degree 2 those interior constraints coincide exactly
    when the two lines meet at the center; for higher degree the remaining
    interior points are spread linearly between beta_1 and beta_{n-1}, which
    keeps monotone data monotone.
    """
    vals = (left_slope, right_slope, left_value, right_value, center, epsilon)
    if any(not np.isfinite(v) for v in vals):
        raise ValueError("all solve_transition inputs must be finite")
    if degree < 2:
        raise ValueError(f"degree must be >= 2, got {degree}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    left_at_center = left_value + epsilon * left_slope
    right_at_center = right_value - epsilon * right_slope
    if abs(left_at_center - right_at_center) > MEET_TOL:
        raise ValueError(
            "the linear pieces do not meet at the center: "
            f"{left_at_center} vs {right_at_center}"
        )

    n = degree
    h = 2.0 * epsilon / n  # d x / d control-point step at the ends
    beta = [0.0] * (n + 1)
    beta[0] = left_value
    beta[1] = left_value + h * left_slope
    beta[n] = right_value
    beta[n - 1] = right_value - h * right_slope
    for k in range(2, n - 1):
        w = (k - 1) / (n - 2)
        beta[k] = beta[1] + w * (beta[n - 1] - beta[1])
    return BernsteinTransition(center, epsilon, degree, tuple(beta))


def eval_transition(tr: BernsteinTransition, x):
    """Evaluate the transition polynomial at x (scalar or array) inside its interval.

    The affine map t = (x - center + eps) / (2 eps) sends the interval to
    [0, 1]; the Bernstein sum is then evaluated by De Casteljau's recursion.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < tr.lo) or np.any(x > tr.hi):
        raise ValueError(
            f"x outside the transition interval [{tr.lo}, {tr.hi}]"
        )
    t = (x - tr.center + tr.epsilon) / (2.0 * tr.epsilon)
    pts = [np.full_like(t, b) if t.ndim else b for b in tr.control_points]
    for level in range(tr.degree):
        pts = [
            (1.0 - t) * pts[i] + t * pts[i + 1]
            for i in range(len(pts) - 1)
        ]
    out = pts[0]
    return out if np.ndim(out) else float(out)


def transition_derivative(tr: BernsteinTransition, x):
    """Derivative of the transition polynomial with respect to x.

    Uses the hodograph: B_n'(t) = n * sum (beta_{k+1} - beta_k) b_{k,n-1}(t),
    times dt/dx = 1/(2 eps).
    """
    n = tr.degree
    diffs = tuple(
        n * (tr.control_points[k + 1] - tr.control_points[k]) / (2.0 * tr.epsilon)
        for k in range(n)
    )
    deriv = BernsteinTransition(tr.center, tr.epsilon, max(n - 1, 2), diffs) \
        if n - 1 >= 2 else None
    if deriv is not None:
        return eval_transition(deriv, x)
    # degree 2 -> derivative is the degree-1 interpolant of diffs
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < tr.lo) or np.any(x > tr.hi):
        raise ValueError(f"x outside the transition interval [{tr.lo}, {tr.hi}]")
    t = (x - tr.center + tr.epsilon) / (2.0 * tr.epsilon)
    out = (1.0 - t) * diffs[0] + t * diffs[1]
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class SmoothedActivation:
    """A piecewise-linear base with one Bezier transition per breakpoint."""

    base: PiecewiseLinear
    transitions: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.asarray(self.base(x), dtype=np.float64)
        for tr in self.transitions:
            m = (x >= tr.lo) & (x <= tr.hi)
            if m.any():
                out[m] = eval_transition(tr, x[m])
        return float(out[0]) if scalar else out

    def derivative(self, x):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        seg = np.searchsorted(self.base.breakpoints, x, side="right")
        out = np.take(self.base.slopes, seg).astype(np.float64)
        for tr in self.transitions:
            m = (x >= tr.lo) & (x <= tr.hi)
            if m.any():
                out[m] = transition_derivative(tr, x[m])
        return float(out[0]) if scalar else out


def mollify(pwl: PiecewiseLinear, epsilon: float, degree: int = 2) -> SmoothedActivation:
    """Smooth every kink of a piecewise-linear function with Bezier transitions.

    Transition intervals must not touch: requires 2 * epsilon < the smallest
    gap between consecutive breakpoints.  Outside all transition intervals
    the result equals the input exactly.
    """
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    bps = pwl.breakpoints
    if len(bps) >= 2:
        min_gap = min(b2 - b1 for b1, b2 in zip(bps, bps[1:]))
        if 2.0 * epsilon >= min_gap:
            raise ValueError(
                f"transition intervals overlap: need 2*epsilon < {min_gap}, "
                f"got epsilon={epsilon}"
            )
    transitions = []
    for i, b in enumerate(bps):
        transitions.append(
            solve_transition(
                left_slope=pwl.slopes[i],
                right_slope=pwl.slopes[i + 1],
                left_value=float(pwl(b - epsilon)),
                right_value=float(pwl(b + epsilon)),
                center=b,
                epsilon=epsilon,
                degree=degree,
            )
        )
    return SmoothedActivation(pwl, tuple(transitions))
