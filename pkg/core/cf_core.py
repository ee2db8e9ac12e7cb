"""
Symmetric Characteristic Functions
Closed-form families, canonical (Levy-Khinchine) exponents, empirical CFs and
the lazy rescaling transforms f_m(t) = f(sqrt(m) t)^(1/m) and f(t/sqrt(m))^m
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from core.errors import InputError, NoFiniteMomentError, PositivityError
from core.spectral import SpectralMeasure

logger = logging.getLogger(__name__)

DEFAULT_T_MAX = 50.0
DEFAULT_GRID_SIZE = 2048
DEFAULT_T_MIN = 1e-3

# Keeps empirical evaluation matrices at a few million entries
_EMPIRICAL_CHUNK = 4_000_000


def _check_t(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"t must be finite, got {t!r}")
    return arr


def _shape_like(result, t):
    if np.ndim(t) == 0:
        return float(result)
    return result


def check_positive_int(m, name="m"):
    """Validate a positive integer rescaling index"""
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise InputError(f"{name} must be a positive integer, got {m!r}")
    return int(m)


def _check_param(value, name, low=0.0, inclusive=False, high=None):
    if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
        raise InputError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {value!r}")
    if value < low or (value == low and not inclusive):
        bound = ">=" if inclusive else ">"
        raise InputError(f"{name} must be {bound} {low}, got {value!r}")
    if high is not None and value > high:
        raise InputError(f"{name} must be <= {high}, got {value!r}")
    return value


class SymmetricCF:
    """
    Real, even characteristic function.

    Subclasses implement _log (log f on a validated array) and may override
    _value when f can be non-positive. Public evaluation goes through
    evaluate / log_evaluate, which validate t and keep scalar inputs scalar.
    """
    kind = "abstract"
    # False when the CF may take values <= 0 (empirical data)
    positive = True

    def _log(self, t):
        raise NotImplementedError

    def _value(self, t):
        return np.exp(self._log(t))

    def evaluate(self, t):
        arr = _check_t(t)
        return _shape_like(self._value(arr), t)

    def log_evaluate(self, t):
        arr = _check_t(t)
        return _shape_like(self._log(arr), t)

    def __call__(self, t):
        return self.evaluate(t)

    def cumulants(self):
        """Second and fourth cumulants (k2, k4) from the closed form"""
        raise NoFiniteMomentError(f"no closed-form moments for {self.kind} CF")

    def describe(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class GaussianCF(SymmetricCF):
    """f(t) = exp(-v t^2 / 2); variance 0 is the constant 1"""
    variance: float
    kind = "closed-form"
    family = "gauss"

    def __post_init__(self):
        object.__setattr__(self, "variance", _check_param(self.variance, "variance", inclusive=True))

    def _log(self, t):
        return -0.5 * self.variance * np.square(t)

    def cumulants(self):
        return self.variance, 0.0

    def describe(self):
        return {"kind": self.kind, "family": self.family, "variance": self.variance}


@dataclass(frozen=True)
class SymmetricStableCF(SymmetricCF):
    """f(t) = exp(-|c t|^alpha), alpha in (0, 2]"""
    alpha: float
    scale: float = 1.0
    kind = "closed-form"
    family = "stable"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_param(self.alpha, "alpha", high=2.0))
        object.__setattr__(self, "scale", _check_param(self.scale, "scale"))

    def _log(self, t):
        return -np.power(np.abs(self.scale * t), self.alpha)

    def cumulants(self):
        if self.alpha < 2.0:
            raise NoFiniteMomentError(
                f"symmetric stable law with alpha={self.alpha} has no finite variance")
        return 2.0 * self.scale ** 2, 0.0

    def describe(self):
        return {"kind": self.kind, "family": self.family, "alpha": self.alpha, "scale": self.scale}


@dataclass(frozen=True)
class SymmetrizedGammaCF(SymmetricCF):
    """f(t) = (1 + t^2)^(-shape); shape 1 is the Laplace distribution"""
    shape: float
    kind = "closed-form"
    family = "symgamma"

    def __post_init__(self):
        object.__setattr__(self, "shape", _check_param(self.shape, "shape"))

    def _log(self, t):
        return -self.shape * np.log1p(np.square(t))

    def cumulants(self):
        return 2.0 * self.shape, 12.0 * self.shape

    def describe(self):
        return {"kind": self.kind, "family": self.family, "shape": self.shape}


@dataclass(frozen=True)
class CompoundPoissonSymCF(SymmetricCF):
    """f(t) = exp(rate (cos(jump t) - 1)): Poisson number of +/-jump steps"""
    rate: float
    jump: float = 1.0
    kind = "closed-form"
    family = "cpoisson"

    def __post_init__(self):
        object.__setattr__(self, "rate", _check_param(self.rate, "rate"))
        object.__setattr__(self, "jump", _check_param(self.jump, "jump"))

    def _log(self, t):
        # cos(x) - 1 = -2 sin^2(x/2), without cancellation near 0
        return -2.0 * self.rate * np.square(np.sin(0.5 * self.jump * t))

    def cumulants(self):
        h2 = self.jump ** 2
        return self.rate * h2, self.rate * h2 * h2

    def to_canonical(self):
        """
        Canonical encoding: one atom at x = jump with half-line mass
        rate x^2 / (2 (1 + x^2)). The whole symmetric measure puts this mass
        at each of +/-x, rate x^2 / (1 + x^2) in total.
        """
        h = self.jump
        mass = self.rate * h * h / (2.0 * (1.0 + h * h))
        return CanonicalCF(CanonicalExponent(0.0, SpectralMeasure.from_atoms([(h, mass)])))

    def describe(self):
        return {"kind": self.kind, "family": self.family, "rate": self.rate, "jump": self.jump}


def _khinchine_kernel(t, x):
    return np.square(np.sin(0.5 * t * x)) * (1.0 + x * x) / (x * x)


@dataclass(frozen=True, eq=False)
class CanonicalExponent:
    """
    Levy-Khinchine data of a symmetric ID law:
    log f(t) = -a t^2 - 4 int_(0,inf) sin^2(tx/2) (1+x^2)/x^2 dtheta(x)
    """
    gaussian_coefficient: float
    spectral_measure: SpectralMeasure = None

    def __post_init__(self):
        a = _check_param(self.gaussian_coefficient, "gaussian coefficient", inclusive=True)
        object.__setattr__(self, "gaussian_coefficient", a)
        if self.spectral_measure is None:
            object.__setattr__(self, "spectral_measure", SpectralMeasure())

    def log_value(self, t):
        t = np.asarray(t, dtype=float)
        jumps = self.spectral_measure.integrate(_khinchine_kernel, t)
        return -self.gaussian_coefficient * np.square(t) - 4.0 * jumps

    def cumulants(self):
        a = self.gaussian_coefficient
        theta = self.spectral_measure
        k2 = 2.0 * a + 2.0 * theta.moment(lambda x: 1.0 + x * x)
        k4 = 2.0 * theta.moment(lambda x: x * x * (1.0 + x * x))
        return k2, k4


@dataclass(frozen=True, eq=False)
class CanonicalCF(SymmetricCF):
    exponent: CanonicalExponent
    kind = "canonical"

    def _log(self, t):
        return self.exponent.log_value(t)

    def cumulants(self):
        return self.exponent.cumulants()

    def describe(self):
        return {
            "kind": self.kind,
            "gaussian_coefficient": self.exponent.gaussian_coefficient,
            "spectral_measure": self.exponent.spectral_measure.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class EmpiricalCF(SymmetricCF):
    """Symmetrized empirical CF (1/n) sum cos(t x_j); may be <= 0"""
    samples: np.ndarray
    kind = "empirical"
    positive = False

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))

    def _value(self, t):
        flat = np.ravel(t)
        out = np.empty_like(flat)
        step = max(1, _EMPIRICAL_CHUNK // self.samples.size)
        for start in range(0, flat.size, step):
            block = flat[start:start + step]
            out[start:start + step] = np.mean(np.cos(np.outer(block, self.samples)), axis=1)
        return out.reshape(np.shape(t))

    def _log(self, t):
        values = self._value(t)
        bad = np.flatnonzero(np.ravel(values) <= 0.0)
        if bad.size:
            i = bad[0]
            raise PositivityError(float(np.ravel(t)[i]), float(np.ravel(values)[i]))
        return np.log(values)

    def cumulants(self):
        m2 = float(np.mean(self.samples ** 2))
        m4 = float(np.mean(self.samples ** 4))
        return m2, m4 - 3.0 * m2 * m2

    def describe(self):
        return {"kind": self.kind, "n": int(self.samples.size)}


@dataclass(frozen=True, eq=False)
class ProductCF(SymmetricCF):
    """Pointwise product: the CF of a sum of independent components"""
    factors: tuple
    kind = "product"

    @property
    def positive(self):
        return all(f.positive for f in self.factors)

    def _log(self, t):
        return sum(f._log(t) for f in self.factors)

    def _value(self, t):
        if self.positive:
            return np.exp(self._log(t))
        out = np.ones_like(np.asarray(t, dtype=float))
        for f in self.factors:
            out = out * f._value(t)
        return out

    def cumulants(self):
        pairs = [f.cumulants() for f in self.factors]
        return sum(p[0] for p in pairs), sum(p[1] for p in pairs)

    def describe(self):
        return {"kind": self.kind, "factors": [f.describe() for f in self.factors]}


@dataclass(frozen=True, eq=False)
class RootRescaledCF(SymmetricCF):
    """f_m(t) = f(sqrt(m) t)^(1/m), computed as exp(log f(sqrt(m) t) / m)"""
    base: SymmetricCF
    m: int
    kind = "root-rescale"

    @property
    def positive(self):
        return self.base.positive

    def _log(self, t):
        root = math.sqrt(self.m)
        try:
            return self.base._log(root * t) / self.m
        except PositivityError as e:
            raise PositivityError(e.t / root, e.value) from None

    def cumulants(self):
        k2, k4 = self.base.cumulants()
        return k2, self.m * k4

    def describe(self):
        return {"kind": self.kind, "m": self.m, "base": self.base.describe()}


@dataclass(frozen=True, eq=False)
class SumRescaledCF(SymmetricCF):
    """f(t / sqrt(m))^m: the CF of the normalized sum of m copies"""
    base: SymmetricCF
    m: int
    kind = "sum-rescale"

    @property
    def positive(self):
        return self.base.positive

    def _log(self, t):
        return self.m * self.base._log(t / math.sqrt(self.m))

    def _value(self, t):
        if self.base.positive:
            return np.exp(self._log(t))
        return np.power(self.base._value(t / math.sqrt(self.m)), self.m)

    def cumulants(self):
        k2, k4 = self.base.cumulants()
        return k2, k4 / self.m

    def describe(self):
        return {"kind": self.kind, "m": self.m, "base": self.base.describe()}


@dataclass(frozen=True, eq=False)
class DilatedCF(SymmetricCF):
    """f(c t): the CF of c X"""
    base: SymmetricCF
    factor: float
    kind = "dilation"

    @property
    def positive(self):
        return self.base.positive

    def _log(self, t):
        return self.base._log(self.factor * t)

    def _value(self, t):
        return self.base._value(self.factor * t)

    def cumulants(self):
        k2, k4 = self.base.cumulants()
        c2 = self.factor ** 2
        return c2 * k2, c2 * c2 * k4

    def describe(self):
        return {"kind": self.kind, "factor": self.factor, "base": self.base.describe()}


def evaluate(cf, t):
    """Evaluate f(t); t must be finite"""
    return cf.evaluate(t)


def root_rescale(cf, m):
    """The CF of the m-th 'historical summand': f(sqrt(m) t)^(1/m)"""
    return RootRescaledCF(cf, check_positive_int(m))


def sum_rescale(cf, m):
    """The CF of S_m = (xi_1 + ... + xi_m) / sqrt(m)"""
    return SumRescaledCF(cf, check_positive_int(m))


def limit_gaussian(a):
    """g(t) = exp(-a t^2), a Gaussian of variance 2a (degenerate at zero for a = 0)"""
    a = _check_param(a, "a", inclusive=True)
    return GaussianCF(2.0 * a)


def from_samples(samples):
    """Symmetrized empirical CF of a finite sample"""
    values = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InputError("at least one sample is required")
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise InputError(f"sample {int(bad[0])} is not finite: {values[bad[0]]!r}")
    return EmpiricalCF(values)


def convolve(cf1, cf2):
    """Product CF; nested products are flattened"""
    factors = []
    for cf in (cf1, cf2):
        factors.extend(cf.factors if isinstance(cf, ProductCF) else (cf,))
    return ProductCF(tuple(factors))


def dilate(cf, c):
    c = _check_param(c, "dilation factor")
    return DilatedCF(cf, c)


_FAMILIES = {
    "gauss": (GaussianCF, ("variance",)),
    "stable": (SymmetricStableCF, ("alpha", "scale")),
    "symgamma": (SymmetrizedGammaCF, ("shape",)),
    "cpoisson": (CompoundPoissonSymCF, ("rate", "jump")),
}

FAMILY_ALIASES = {
    "gaussian": "gauss",
    "normal": "gauss",
    "cauchy": "stable",
    "laplace": "symgamma",
    "poisson": "cpoisson",
}


def family_from_name(name, **params):
    """Construct a catalog family from its CLI name and keyword parameters"""
    key = FAMILY_ALIASES.get(name, name)
    if key not in _FAMILIES:
        raise InputError(f"unknown family {name!r}; choose from {sorted(_FAMILIES)}")
    cls, fields = _FAMILIES[key]
    if name == "cauchy":
        params.setdefault("alpha", 1.0)
    if name == "laplace":
        params.setdefault("shape", 1.0)
    unknown = set(params) - set(fields)
    if unknown:
        raise InputError(f"family {key!r} does not take {sorted(unknown)}")
    return cls(**params)


def family_fields(name):
    key = FAMILY_ALIASES.get(name, name)
    if key not in _FAMILIES:
        raise InputError(f"unknown family {name!r}; choose from {sorted(_FAMILIES)}")
    return _FAMILIES[key][1]


def positive_grid(t_max=DEFAULT_T_MAX, size=DEFAULT_GRID_SIZE, t_min=DEFAULT_T_MIN):
    """Log-spaced points on [t_min, t_max], endpoints exact"""
    t_min = _check_param(t_min, "t_min")
    t_max = _check_param(t_max, "t_max")
    if t_min >= t_max:
        raise InputError(f"t_min ({t_min}) must be below t_max ({t_max})")
    size = check_positive_int(size, "grid size")
    if size < 2:
        raise InputError("grid size must be at least 2")
    return np.geomspace(t_min, t_max, size)


def default_t_grid(t_max=DEFAULT_T_MAX, size=DEFAULT_GRID_SIZE, t_min=DEFAULT_T_MIN):
    """Log-spaced grid on [t_min, t_max] mirrored to negative t (2*size points)"""
    positive = positive_grid(t_max, size, t_min)
    return np.concatenate([-positive[::-1], positive])
