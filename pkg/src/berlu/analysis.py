"""Numerical verification instruments for activation functions.

Three kinds of measurement live here:

* Lipschitz constants: grid search over |f'| plus golden-section refinement,
  with the closed-form value filled in where one is known (for BerLU it is
  max(1, |alpha|): the transition derivative is linear, so the supremum sits
  at an interval endpoint).
* Gradient checking of the analytic derivatives against central differences.
* A depth-correlation probe: propagate two correlated vectors through deep
  random dense layers at critical initialization and fit the power-law decay
  of 1 - c_l, the per-layer correlation gap.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .activations import ActivationSpec, eval_dx, eval_forward

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # golden-section step


def _spec_dict(spec: ActivationSpec) -> dict:
    d = {"kind": spec.kind}
    for name in ("alpha", "epsilon", "scale"):
        v = getattr(spec, name)
        if v is not None:
            d[name] = v
    return d


@dataclass(frozen=True)
class LipschitzReport:
    spec: ActivationSpec
    estimate: float
    exact: float | None
    argmax_x: float
    grid: str
    expansive: bool

    def to_dict(self) -> dict:
        return {
            "spec": _spec_dict(self.spec),
            "estimate": self.estimate,
            "exact": self.exact,
            "argmax_x": self.argmax_x,
            "grid": self.grid,
            "expansive": self.expansive,
        }


@dataclass(frozen=True)
class GradCheckReport:
    spec: ActivationSpec
    max_rel_error: float
    worst_x: float
    step: float

    def to_dict(self) -> dict:
        return {
            "spec": _spec_dict(self.spec),
            "max_rel_error": self.max_rel_error,
            "worst_x": self.worst_x,
            "step": self.step,
        }


@dataclass(frozen=True)
class CriticalInit:
    weight_var: float
    bias_var: float

    def to_dict(self) -> dict:
        return {"weight_var": self.weight_var, "bias_var": self.bias_var}


@dataclass(frozen=True)
class CorrelationTrace:
    depth: int
    one_minus_c: np.ndarray
    width: int
    trials: int
    init: dict  # weight_var, bias_var, target_q

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "one_minus_c": [float(v) for v in self.one_minus_c],
            "width": self.width,
            "trials": self.trials,
            "init": dict(self.init),
        }


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    coefficient: float
    fit_range: tuple
    r_squared: float

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "coefficient": self.coefficient,
            "fit_range": list(self.fit_range),
            "r_squared": self.r_squared,
        }


def _exact_lipschitz(spec: ActivationSpec) -> float | None:
    if spec.kind == "berlu":
        return max(1.0, abs(spec.alpha))
    if spec.kind in ("leaky_relu", "prelu"):
        return max(1.0, abs(spec.alpha))
    if spec.kind in ("relu", "identity"):
        return 1.0
    return None


def estimate_lipschitz(
    spec: ActivationSpec,
    search_range=(-10.0, 10.0),
    coarse_points: int = 100_001,
    refine_iters: int = 80,
) -> LipschitzReport:
    """Numerically estimate sup |f'| over a finite range.

    A coarse grid locates the maximum of |f'|; golden-section search on the
    bracket of one grid step around the argmax then refines it.  Since every
    probe is a genuine derivative value, the estimate can only approach the
    true supremum from below.
    """
    lo, hi = float(search_range[0]), float(search_range[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError(f"bad search range [{lo}, {hi}]")
    if coarse_points < 1000:
        raise ValueError(f"coarse_points must be >= 1000, got {coarse_points}")

    xs = np.linspace(lo, hi, coarse_points)
    mags = np.abs(eval_dx(spec, xs))
    i = int(np.argmax(mags))
    best_x, best = float(xs[i]), float(mags[i])

    def g(x: float) -> float:
        return abs(float(eval_dx(spec, np.array([x]))[0]))

    # golden-section maximization on [a, b] around the coarse argmax
    step = (hi - lo) / (coarse_points - 1)
    a = max(lo, best_x - step)
    b = min(hi, best_x + step)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(refine_iters):
        if gc > gd:
            b, d, gd = d, c, gc
            c = b - _INV_PHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INV_PHI * (b - a)
            gd = g(d)
    for x, v in ((c, gc), (d, gd)):
        if v > best:
            best_x, best = x, v

    return LipschitzReport(
        spec=spec,
        estimate=best,
        exact=_exact_lipschitz(spec),
        argmax_x=best_x,
        grid=f"[{lo:g},{hi:g}] n={coarse_points} golden_iters={refine_iters}",
        expansive=best > 1.0 + 1e-9,
    )


def grad_check(spec: ActivationSpec, xs, step: float = 1e-5) -> GradCheckReport:
    """Compare analytic derivatives against central finite differences.

    Relative error uses max(|analytic|, 1e-8) in the denominator so that
    near-zero derivatives do not blow the ratio up.
    """
    if not (0.0 < step <= 1e-2):
        raise ValueError(f"step must lie in (0, 1e-2], got {step}")
    xs = np.asarray(xs, dtype=np.float64)
    analytic = eval_dx(spec, xs)
    fd = (eval_forward(spec, xs + step) - eval_forward(spec, xs - step)) / (2.0 * step)
    rel = np.abs(analytic - fd) / np.maximum(np.abs(analytic), 1e-8)
    i = int(np.argmax(rel)) if len(xs) else 0
    return GradCheckReport(
        spec=spec,
        max_rel_error=float(rel[i]) if len(xs) else 0.0,
        worst_x=float(xs[i]) if len(xs) else math.nan,
        step=step,
    )


_GH_NODES, _GH_WEIGHTS = hermgauss(64)


def _mean_sq_slope(spec: ActivationSpec, q: float) -> float:
    """E[f'(sqrt(q) Z)^2] for standard normal Z, by 64-node Gauss-Hermite."""
    z = math.sqrt(2.0 * q) * _GH_NODES
    fp = eval_dx(spec, z)
    return float(np.sum(_GH_WEIGHTS * fp * fp) / math.sqrt(math.pi))


def find_critical_init(spec: ActivationSpec, target_q: float = 1.0) -> CriticalInit:
    """Weight variance that preserves gradient magnitude layer to layer.

    Solves sigma_w^2 * E[f'(sqrt(q) Z)^2] = 1 with zero bias variance, by
    bisection on sigma_w^2 in [1e-3, 1e2].
    """
    if not target_q > 0:
        raise ValueError(f"target_q must be > 0, got {target_q}")
    mean_sq = _mean_sq_slope(spec, target_q)
    lo, hi = 1e-3, 1e2
    f_lo = lo * mean_sq - 1.0
    f_hi = hi * mean_sq - 1.0
    if f_lo > 0 or f_hi < 0:
        raise ValueError(
            f"no critical weight variance in [{lo}, {hi}] "
            f"(mean squared slope {mean_sq})"
        )
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid * mean_sq - 1.0 <= 0:
            lo = mid
        else:
            hi = mid
    return CriticalInit(weight_var=0.5 * (lo + hi), bias_var=0.0)


def _correlated_pair(rng, width: int, c0: float, q: float) -> np.ndarray:
    """Two columns with exact cosine c0 and norm sqrt(q * width)."""
    u = rng.standard_normal((width, 2))
    e1 = u[:, 0] / np.linalg.norm(u[:, 0])
    v = u[:, 1] - (u[:, 1] @ e1) * e1
    e2 = v / np.linalg.norm(v)
    s = math.sqrt(q * width)
    return np.column_stack([s * e1, s * (c0 * e1 + math.sqrt(1.0 - c0 * c0) * e2)])


def correlation_probe(
    spec: ActivationSpec,
    depth: int,
    width: int,
    trials: int,
    c0: float = 0.5,
    target_q: float = 1.0,
    seed: int = 0,
) -> CorrelationTrace:
    """Depth-propagation experiment for the correlation gap 1 - c_l.

    Each trial pushes a pair of vectors with cosine c0 through `depth` dense
    layers with i.i.d. Gaussian weights of variance weight_var / fan_in
    (weight_var from find_critical_init) and zero biases, applying the
    activation after each matmul.  c_l is the cosine of the pre-activation
    pair after layer l, averaged over trials.  Per-trial generators are
    derived from (seed, trial), so the trace is reproducible bit for bit.
    """
    if depth < 16:
        raise ValueError(f"depth must be >= 16, got {depth}")
    if width < 256:
        raise ValueError(f"width must be >= 256, got {width}")
    if trials < 8:
        raise ValueError(f"trials must be >= 8, got {trials}")
    if not 0.0 < c0 < 1.0:
        raise ValueError(f"c0 must lie in (0, 1), got {c0}")

    init = find_critical_init(spec, target_q)
    w_std = math.sqrt(init.weight_var / width)
    cs = np.zeros(depth)
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        a = _correlated_pair(rng, width, c0, target_q)
        for layer in range(depth):
            h = (rng.standard_normal((width, width)) * w_std) @ a
            if not np.isfinite(h).all():
                raise RuntimeError(
                    f"non-finite pre-activations at layer {layer + 1} "
                    f"(trial {trial})"
                )
            cs[layer] += float(
                (h[:, 0] @ h[:, 1])
                / (np.linalg.norm(h[:, 0]) * np.linalg.norm(h[:, 1]))
            )
            a = eval_forward(spec, h.ravel()).reshape(h.shape)
    cs /= trials
    return CorrelationTrace(
        depth=depth,
        one_minus_c=1.0 - cs,
        width=width,
        trials=trials,
        init={
            "weight_var": init.weight_var,
            "bias_var": init.bias_var,
            "target_q": target_q,
        },
    )


def fit_decay(trace: CorrelationTrace, fit_range) -> DecayFit:
    """Least-squares power-law fit of 1 - c_l over a layer interval.

    Fits log(1 - c_l) against log l; the exponent is minus the slope.
    Saturated traces (non-positive gap inside the range) are rejected, and
    the caller should shorten the range.
    """
    lo, hi = int(fit_range[0]), int(fit_range[1])
    if not (1 <= lo < hi <= trace.depth):
        raise ValueError(f"fit range [{lo}, {hi}] not within [1, {trace.depth}]")
    if hi - lo + 1 < 8:
        raise ValueError(f"fit range [{lo}, {hi}] spans fewer than 8 layers")
    y = np.asarray(trace.one_minus_c[lo - 1 : hi])
    if np.any(y <= 0):
        raise ValueError(
            "correlation saturated: non-positive 1 - c_l inside the fit range; "
            "shorten the range"
        )
    logl = np.log(np.arange(lo, hi + 1, dtype=np.float64))
    logy = np.log(y)
    slope, intercept = np.polyfit(logl, logy, 1)
    resid = logy - (slope * logl + intercept)
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(
        exponent=float(-slope),
        coefficient=float(np.exp(intercept)),
        fit_range=(lo, hi),
        r_squared=r2,
    )
