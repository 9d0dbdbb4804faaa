"""Activation functions with closed-form values and derivatives.

The centerpiece is BerLU: a LeakyReLU whose kink at the origin is replaced
by a quadratic Bezier transition on [-epsilon, epsilon], making the function
C^1 everywhere while keeping plain arithmetic (no transcendentals).

All buffer-level operations work on contiguous 1-D float64 arrays and are
pure: evaluating on a buffer gives bit-identical results to evaluating each
element on its own.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special


@dataclass(frozen=True)
class BerLUParams:
    """Negative-region slope and mollification radius of a BerLU unit.

    alpha may be any finite value: it is a learnable parameter and training
    does not clamp it.  The non-expansive regime (Lipschitz constant 1)
    only holds for |alpha| <= 1; analysis code reports when a spec leaves it.
    """

    alpha: float
    epsilon: float

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha}")
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be finite and > 0, got {self.epsilon}")


_KINDS = (
    "berlu",
    "leaky_relu",
    "relu",
    "prelu",
    "gelu",
    "elu",
    "celu",
    "silu",
    "mish",
    "identity",
)

# which optional parameters each kind carries
_PARAMS = {
    "berlu": ("alpha", "epsilon"),
    "leaky_relu": ("alpha",),
    "prelu": ("alpha",),
    "elu": ("scale",),
    "celu": ("scale",),
}


@dataclass(frozen=True)
class ActivationSpec:
    """Immutable name-plus-parameters handle for one activation function.

    Learnable parameters (BerLU/PReLU alpha) are updated by building a new
    spec, never by mutating an existing one.
    """

    kind: str
    alpha: float | None = None
    epsilon: float | None = None
    scale: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(
                f"unknown activation kind {self.kind!r}; valid: {', '.join(_KINDS)}"
            )
        wanted = _PARAMS.get(self.kind, ())
        for name in ("alpha", "epsilon", "scale"):
            value = getattr(self, name)
            if name in wanted:
                if value is None:
                    raise ValueError(f"{self.kind} requires parameter {name}")
                if not np.isfinite(value):
                    raise ValueError(f"{self.kind} parameter {name} must be finite")
            elif value is not None:
                raise ValueError(f"{self.kind} does not take parameter {name}")
        if self.kind == "berlu" and self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.kind in ("elu", "celu") and self.scale <= 0:
            raise ValueError(f"{self.kind} scale must be > 0, got {self.scale}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def berlu(cls, alpha=0.01, epsilon=0.01):
        return cls("berlu", alpha=float(alpha), epsilon=float(epsilon))

    @classmethod
    def leaky_relu(cls, alpha=0.01):
        return cls("leaky_relu", alpha=float(alpha))

    @classmethod
    def relu(cls):
        return cls("relu")

    @classmethod
    def prelu(cls, alpha=0.01):
        return cls("prelu", alpha=float(alpha))

    @classmethod
    def gelu(cls):
        return cls("gelu")

    @classmethod
    def elu(cls, scale=1.0):
        return cls("elu", scale=float(scale))

    @classmethod
    def celu(cls, scale=1.0):
        return cls("celu", scale=float(scale))

    @classmethod
    def silu(cls):
        return cls("silu")

    @classmethod
    def mish(cls):
        return cls("mish")

    @classmethod
    def identity(cls):
        return cls("identity")

    @property
    def berlu_params(self) -> BerLUParams:
        if self.kind != "berlu":
            raise ValueError(f"{self.kind} spec has no BerLU parameters")
        return BerLUParams(self.alpha, self.epsilon)

    def with_alpha(self, alpha: float) -> "ActivationSpec":
        """New spec with the learnable slope replaced (BerLU/PReLU only)."""
        if "alpha" not in _PARAMS.get(self.kind, ()):
            raise ValueError(f"{self.kind} has no alpha parameter")
        if self.kind == "berlu":
            return ActivationSpec.berlu(alpha, self.epsilon)
        return ActivationSpec(self.kind, alpha=float(alpha))

    def label(self) -> str:
        """Short human-readable tag, e.g. 'berlu(a=0.01,e=0.01)'."""
        if self.kind == "berlu":
            return f"berlu(a={self.alpha:g},e={self.epsilon:g})"
        if self.kind in ("leaky_relu", "prelu"):
            return f"{self.kind}(a={self.alpha:g})"
        if self.kind in ("elu", "celu"):
            return f"{self.kind}(s={self.scale:g})"
        return self.kind


# -- BerLU closed form -----------------------------------------------------
#
# The three branches below (and their x / alpha derivatives) follow from the
# degree-2 Bernstein transition with control points [-alpha*eps, 0, eps];
# bernstein.py reconstructs the same curve from the control-point side.


def _berlu_fwd(x, alpha, eps):
    mid = ((1.0 - alpha) / (4.0 * eps)) * x * x + ((1.0 + alpha) / 2.0) * x \
        + (1.0 - alpha) * eps / 4.0
    return np.where(x < -eps, alpha * x, np.where(x > eps, x, mid))


def _berlu_dx(x, alpha, eps):
    mid = ((1.0 - alpha) / (2.0 * eps)) * x + (1.0 + alpha) / 2.0
    return np.where(x < -eps, np.full_like(x, alpha),
                    np.where(x > eps, np.ones_like(x), mid))


def _berlu_dalpha(x, alpha, eps):
    # d/dalpha of the closed form: x below, -(x-eps)^2/(4 eps) inside, 0 above.
    mid = -((x - eps) * (x - eps)) / (4.0 * eps)
    return np.where(x < -eps, x, np.where(x > eps, np.zeros_like(x), mid))


def _check_scalar(x):
    if not np.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return float(x)


def berlu_forward(x: float, p: BerLUParams) -> float:
    """BerLU value at a single point."""
    return float(_berlu_fwd(_check_scalar(x), p.alpha, p.epsilon))


def berlu_dx(x: float, p: BerLUParams) -> float:
    """Derivative of BerLU with respect to its input; continuous everywhere."""
    return float(_berlu_dx(_check_scalar(x), p.alpha, p.epsilon))


def berlu_dalpha(x: float, p: BerLUParams) -> float:
    """Derivative of BerLU with respect to the slope parameter alpha."""
    return float(_berlu_dalpha(_check_scalar(x), p.alpha, p.epsilon))


# -- baseline kernels -------------------------------------------------------


def _softplus(x):
    # stable for large |x|
    return np.log1p(np.exp(-np.abs(x))) + np.maximum(x, 0.0)


_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def _fwd_kernel(spec, x):
    k = spec.kind
    if k == "berlu":
        return _berlu_fwd(x, spec.alpha, spec.epsilon)
    if k in ("leaky_relu", "prelu"):
        return np.where(x >= 0, x, spec.alpha * x)
    if k == "relu":
        return np.maximum(x, 0.0)
    if k == "gelu":
        return x * special.ndtr(x)
    if k == "elu":
        return np.where(x > 0, x, spec.scale * np.expm1(x))
    if k == "celu":
        return np.where(x > 0, x, spec.scale * np.expm1(x / spec.scale))
    if k == "silu":
        return x * special.expit(x)
    if k == "mish":
        return x * np.tanh(_softplus(x))
    return np.copy(x)  # identity


def _dx_kernel(spec, x):
    # convention at kinks of the piecewise baselines: right-hand derivative
    k = spec.kind
    if k == "berlu":
        return _berlu_dx(x, spec.alpha, spec.epsilon)
    if k in ("leaky_relu", "prelu"):
        return np.where(x >= 0, np.ones_like(x), np.full_like(x, spec.alpha))
    if k == "relu":
        return (x >= 0).astype(np.asarray(x).dtype)
    if k == "gelu":
        return special.ndtr(x) + x * np.exp(-0.5 * x * x) / _SQRT_2PI
    if k == "elu":
        return np.where(x >= 0, np.ones_like(x), spec.scale * np.exp(x))
    if k == "celu":
        return np.where(x >= 0, np.ones_like(x), np.exp(x / spec.scale))
    if k == "silu":
        s = special.expit(x)
        return s * (1.0 + x * (1.0 - s))
    if k == "mish":
        t = np.tanh(_softplus(x))
        return t + x * (1.0 - t * t) * special.expit(x)
    return np.ones_like(x)  # identity


def _check_buffer(xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1:
        raise ValueError(f"expected a 1-D buffer, got shape {xs.shape}")
    bad = ~np.isfinite(xs)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError(f"non-finite input at index {i}: {xs[i]}")
    return xs


def eval_forward(spec: ActivationSpec, xs) -> np.ndarray:
    """Apply the activation elementwise to a finite 1-D float64 buffer."""
    return _fwd_kernel(spec, _check_buffer(xs))


def eval_dx(spec: ActivationSpec, xs) -> np.ndarray:
    """Elementwise analytic derivative of the activation."""
    return _dx_kernel(spec, _check_buffer(xs))
