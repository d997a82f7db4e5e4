import bisect
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import accumulate

from RationalIO import SchemaError, format_rational, parse_rational

logger = logging.getLogger(__name__)


class InvalidPwlFunction(ValueError):
    pass


class Shape(Enum):
    CONVEX = "convex"
    CONCAVE = "concave"


@dataclass(frozen=True)
class PwlFunction:
    """
    Piecewise linear convex or concave function of one variable.

    :param shape: Shape.CONVEX or Shape.CONCAVE
    :param value_at_zero: intercept of the leftmost piece (equals f(0) when the first breakpoint is >= 0)
    :param breakpoints: strictly ascending interval boundaries rho(f,1..l)
    :param slopes: one slope per piece, der(f,0..l)

    Adjacent pieces with equal slopes are merged on construction, so every
    instance is in its minimal form.
    """
    shape: Shape
    value_at_zero: Fraction
    breakpoints: tuple
    slopes: tuple

    def __post_init__(self):
        if not isinstance(self.shape, Shape):
            raise InvalidPwlFunction(f"Invalid shape {self.shape!r}")
        breakpoints = tuple(Fraction(b) for b in self.breakpoints)
        slopes = tuple(Fraction(s) for s in self.slopes)
        if len(slopes) != len(breakpoints) + 1:
            raise InvalidPwlFunction(
                f"Invalid piece count: {len(breakpoints)} breakpoints need {len(breakpoints) + 1} slopes, got {len(slopes)}")
        if any(left >= right for left, right in zip(breakpoints, breakpoints[1:])):
            raise InvalidPwlFunction(f"Invalid breakpoints {breakpoints}: must be strictly ascending")

        # merge pieces whose slopes coincide
        kept_breakpoints = []
        kept_slopes = [slopes[0]]
        for rho, slope in zip(breakpoints, slopes[1:]):
            if slope == kept_slopes[-1]:
                continue
            kept_breakpoints.append(rho)
            kept_slopes.append(slope)

        for previous, current in zip(kept_slopes, kept_slopes[1:]):
            if self.shape is Shape.CONVEX and current < previous:
                raise InvalidPwlFunction(f"Invalid convex function: slopes {kept_slopes} are not increasing")
            if self.shape is Shape.CONCAVE and current > previous:
                raise InvalidPwlFunction(f"Invalid concave function: slopes {kept_slopes} are not decreasing")

        object.__setattr__(self, "value_at_zero", Fraction(self.value_at_zero))
        object.__setattr__(self, "breakpoints", tuple(kept_breakpoints))
        object.__setattr__(self, "slopes", tuple(kept_slopes))

    @property
    def pieces(self):
        return len(self.slopes)

    @property
    def is_linear(self):
        return not self.breakpoints

    def slope_steps(self):
        """Pairs (rho(f,l), der(f,l) - der(f,l-1)) for l >= 1."""
        return [(rho, self.slopes[k + 1] - self.slopes[k]) for k, rho in enumerate(self.breakpoints)]

    def eval(self, x):
        x = Fraction(x)
        value = self.value_at_zero + x * self.slopes[0]
        for rho, step in self.slope_steps():
            if x > rho:
                value += (x - rho) * step
        return value

    __call__ = eval

    def locate_eval(self, x):
        """Evaluate by finding the piece that holds x and extending its line."""
        x = Fraction(x)
        k = bisect.bisect_right(self.breakpoints, x)
        if k == 0:
            return self.value_at_zero + x * self.slopes[0]
        left_value = self.value_at_zero + self.breakpoints[0] * self.slopes[0]
        for piece in range(1, k):
            left_value += (self.breakpoints[piece] - self.breakpoints[piece - 1]) * self.slopes[piece]
        return left_value + (x - self.breakpoints[k - 1]) * self.slopes[k]

    def shifted(self, delta):
        return PwlFunction(self.shape, self.value_at_zero + Fraction(delta), self.breakpoints, self.slopes)

    def plus_linear(self, slope):
        """f(x) + slope * x; adding a line keeps the shape."""
        slope = Fraction(slope)
        return PwlFunction(self.shape, self.value_at_zero, self.breakpoints, tuple(s + slope for s in self.slopes))

    def restricted_from(self, lower):
        """Same values on [lower, inf); pieces lying entirely left of lower are merged away."""
        lower = Fraction(lower)
        k = bisect.bisect_right(self.breakpoints, lower)
        if k == 0:
            return self
        slope = self.slopes[k]
        intercept = self.eval(lower) - slope * lower
        return PwlFunction(self.shape, intercept, self.breakpoints[k:], self.slopes[k:])

    def extremes_on(self, lower, upper):
        """(min, max) of the function over [lower, upper]; upper must be finite."""
        lower, upper = Fraction(lower), Fraction(upper)
        points = [lower, upper] + [rho for rho in self.breakpoints if lower < rho < upper]
        values = [self.eval(p) for p in points]
        return min(values), max(values)

    def to_json(self):
        return {
            "shape": self.shape.value,
            "value_at_zero": format_rational(self.value_at_zero),
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "slopes": [format_rational(s) for s in self.slopes],
        }

    @classmethod
    def from_json(cls, data, where="function"):
        if not isinstance(data, dict):
            raise SchemaError(f"Invalid function at {where}: expected an object")
        try:
            shape = Shape(data.get("shape"))
        except ValueError:
            raise SchemaError(f"Invalid shape at {where}: {data.get('shape')!r}")
        value_at_zero = parse_rational(data.get("value_at_zero", 0), f"{where}.value_at_zero")
        breakpoints = [parse_rational(b, f"{where}.breakpoints[{k}]") for k, b in enumerate(data.get("breakpoints", []))]
        if "slopes" not in data:
            raise SchemaError(f"Invalid function at {where}: missing slopes")
        slopes = [parse_rational(s, f"{where}.slopes[{k}]") for k, s in enumerate(data["slopes"])]
        return cls(shape, value_at_zero, tuple(breakpoints), tuple(slopes))

    @classmethod
    def linear(cls, slope, value_at_zero=0, shape=Shape.CONVEX):
        return cls(shape, Fraction(value_at_zero), (), (Fraction(slope),))

    @classmethod
    def from_integer_values(cls, values, shape):
        """Function through the points (k, values[k]) built from unit-width pieces."""
        values = [Fraction(v) for v in values]
        if not values:
            raise InvalidPwlFunction("Invalid integer values: at least f(0) is required")
        if len(values) == 1:
            return cls.linear(0, values[0], shape)
        slopes = [b - a for a, b in zip(values, values[1:])]
        breakpoints = [Fraction(k) for k in range(1, len(slopes))]
        return cls(shape, values[0], tuple(breakpoints), tuple(slopes))


def from_sorted_weights(weights):
    """Convex f with f(j) = sum of the j smallest weights."""
    weights = list(weights)
    for w in weights:
        if w < 0:
            raise InvalidPwlFunction(f"Invalid weight {w}: weights must be nonnegative")
    prefix = [0] + list(accumulate(sorted(weights)))
    return PwlFunction.from_integer_values(prefix, Shape.CONVEX)


def from_sorted_multiplicities(multiplicities):
    """Concave f with f(j) = sum of the j largest multiplicities."""
    multiplicities = list(multiplicities)
    for t in multiplicities:
        if t <= 0:
            raise InvalidPwlFunction(f"Invalid multiplicity {t}: multiplicities must be positive")
    prefix = [0] + list(accumulate(sorted(multiplicities, reverse=True)))
    return PwlFunction.from_integer_values(prefix, Shape.CONCAVE)
