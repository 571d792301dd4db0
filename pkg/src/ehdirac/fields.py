"""Complex scalar fields on a chart of C^{n+1} with exact Wirtinger derivatives.

A field is a small expression tree built from coordinates, constants, sums,
products and real powers.  Every node knows how to differentiate itself with
respect to ``z_mu`` and ``zbar_mu``; derivatives are again fields, so second
derivatives (needed for ``d(d omega)`` style checks) come for free.

Points are complex arrays of shape ``(..., dim)``.  Evaluation is vectorised
over the leading axes.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "ChartPoint",
    "ScalarField",
    "Const",
    "as_field",
    "coord",
    "coordbar",
    "radius_sq",
    "RadialProfile",
    "PointwiseField",
    "GuardedField",
    "power",
    "sum_fields",
    "prod_fields",
    "ZERO",
    "ONE",
]


@dataclass(frozen=True)
class ChartPoint:
    """A point of C^{n+1}; ``coords`` holds ``z_1 .. z_{n+1}``."""

    coords: tuple

    def __post_init__(self):
        arr = np.asarray(self.coords, dtype=complex)
        if arr.ndim != 1:
            raise ValueError("ChartPoint expects a flat sequence of coordinates")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ChartPoint coordinates must be finite")
        object.__setattr__(self, "coords", tuple(complex(c) for c in arr))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    @property
    def s(self) -> float:
        return float(np.sum(np.abs(self.array) ** 2))


def _points(z) -> np.ndarray:
    if isinstance(z, ChartPoint):
        return z.array
    return np.asarray(z, dtype=complex)


class ScalarField:
    """Base class of the expression tree.

    Subclasses implement ``_eval``, ``_dz``, ``_dzbar`` and ``conj``.
    """

    __slots__ = ("_dcache", "__weakref__")

    def __init__(self):
        self._dcache = {}

    # -- evaluation -------------------------------------------------------
    def __call__(self, z) -> np.ndarray:
        return self.evaluate(z)

    def evaluate(self, z) -> np.ndarray:
        z = _points(z)
        return self._ev(z, np.conj(z), {})

    def _ev(self, z, zb, cache):
        key = id(self)
        out = cache.get(key)
        if out is None:
            out = self._eval(z, zb, cache)
            cache[key] = out
        return out

    def _eval(self, z, zb, cache):  # pragma: no cover - abstract
        raise NotImplementedError

    # -- derivatives ------------------------------------------------------
    def dz(self, mu: int) -> "ScalarField":
        key = ("z", mu)
        if key not in self._dcache:
            self._dcache[key] = self._dz(mu)
        return self._dcache[key]

    def dzbar(self, mu: int) -> "ScalarField":
        key = ("zb", mu)
        if key not in self._dcache:
            self._dcache[key] = self._dzbar(mu)
        return self._dcache[key]

    def grad(self, z, dim: int | None = None):
        """Return ``(d_z, d_zbar)`` evaluated at ``z``, each of shape ``(..., dim)``."""
        z = _points(z)
        dim = z.shape[-1] if dim is None else dim
        dz = np.stack([np.broadcast_to(self.dz(m).evaluate(z), z.shape[:-1]) for m in range(dim)], axis=-1)
        dzb = np.stack([np.broadcast_to(self.dzbar(m).evaluate(z), z.shape[:-1]) for m in range(dim)], axis=-1)
        return dz, dzb

    def conj(self) -> "ScalarField":
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False

    # -- algebra ----------------------------------------------------------
    def __add__(self, other):
        return sum_fields(self, as_field(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sum_fields(self, -as_field(other))

    def __rsub__(self, other):
        return sum_fields(as_field(other), -self)

    def __neg__(self):
        return prod_fields(Const(-1.0), self)

    def __mul__(self, other):
        return prod_fields(self, as_field(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return prod_fields(self, power(as_field(other), -1))

    def __rtruediv__(self, other):
        return prod_fields(as_field(other), power(self, -1))

    def __pow__(self, exponent):
        return power(self, exponent)


class Const(ScalarField):
    __slots__ = ("value",)

    def __init__(self, value):
        super().__init__()
        self.value = complex(value)

    def _eval(self, z, zb, cache):
        return np.full(z.shape[:-1], self.value, dtype=complex)

    def _dz(self, mu):
        return ZERO

    def _dzbar(self, mu):
        return ZERO

    def conj(self):
        return Const(self.value.conjugate())

    @property
    def is_zero(self):
        return self.value == 0

    def __repr__(self):
        return f"Const({self.value})"


ZERO = Const(0.0)
ONE = Const(1.0)


def as_field(x) -> ScalarField:
    if isinstance(x, ScalarField):
        return x
    if isinstance(x, numbers.Number):
        return Const(x)
    raise TypeError(f"cannot promote {type(x).__name__} to a ScalarField")


class Coord(ScalarField):
    """``z_mu`` (``bar=False``) or ``zbar_mu`` (``bar=True``); zero-based index."""

    __slots__ = ("mu", "bar")

    def __init__(self, mu: int, bar: bool = False):
        super().__init__()
        self.mu = mu
        self.bar = bar

    def _eval(self, z, zb, cache):
        return (zb if self.bar else z)[..., self.mu]

    def _dz(self, mu):
        return ONE if (not self.bar and mu == self.mu) else ZERO

    def _dzbar(self, mu):
        return ONE if (self.bar and mu == self.mu) else ZERO

    def conj(self):
        return Coord(self.mu, not self.bar)

    def __repr__(self):
        return f"{'zb' if self.bar else 'z'}{self.mu + 1}"


def coord(mu: int) -> ScalarField:
    return Coord(mu, False)


def coordbar(mu: int) -> ScalarField:
    return Coord(mu, True)


def radius_sq(dim: int) -> ScalarField:
    """``s = sum |z_mu|^2``."""
    return sum_fields(*[coord(m) * coordbar(m) for m in range(dim)])


class Sum(ScalarField):
    __slots__ = ("terms",)

    def __init__(self, terms):
        super().__init__()
        self.terms = tuple(terms)

    def _eval(self, z, zb, cache):
        out = self.terms[0]._ev(z, zb, cache)
        for t in self.terms[1:]:
            out = out + t._ev(z, zb, cache)
        return out

    def _dz(self, mu):
        return sum_fields(*[t.dz(mu) for t in self.terms])

    def _dzbar(self, mu):
        return sum_fields(*[t.dzbar(mu) for t in self.terms])

    def conj(self):
        return sum_fields(*[t.conj() for t in self.terms])

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.terms)) + ")"


class Prod(ScalarField):
    __slots__ = ("factors",)

    def __init__(self, factors):
        super().__init__()
        self.factors = tuple(factors)

    def _eval(self, z, zb, cache):
        out = self.factors[0]._ev(z, zb, cache)
        for f in self.factors[1:]:
            out = out * f._ev(z, zb, cache)
        return out

    def _leibniz(self, which, mu):
        terms = []
        for i, f in enumerate(self.factors):
            df = f.dz(mu) if which == "z" else f.dzbar(mu)
            if df.is_zero:
                continue
            terms.append(prod_fields(*self.factors[:i], df, *self.factors[i + 1:]))
        return sum_fields(*terms)

    def _dz(self, mu):
        return self._leibniz("z", mu)

    def _dzbar(self, mu):
        return self._leibniz("zb", mu)

    def conj(self):
        return prod_fields(*[f.conj() for f in self.factors])

    def __repr__(self):
        return "*".join(map(repr, self.factors))


class Power(ScalarField):
    """``base ** exponent`` with a real exponent.

    Non-integer exponents use the principal branch and are only used on
    positive real bases (functions of ``s``).
    """

    __slots__ = ("base", "exponent", "real_base")

    def __init__(self, base: ScalarField, exponent: float, real_base: bool = False):
        super().__init__()
        self.base = base
        self.exponent = exponent
        self.real_base = real_base

    def _eval(self, z, zb, cache):
        b = self.base._ev(z, zb, cache)
        p = self.exponent
        if float(p).is_integer():
            p = int(p)
            return b**p if p >= 0 else 1.0 / b ** (-p)
        if self.real_base:
            return np.real(b) ** p + 0j
        return b**p

    def _chain(self, db):
        if db.is_zero:
            return ZERO
        p = self.exponent
        return prod_fields(Const(p), power(self.base, p - 1, self.real_base), db)

    def _dz(self, mu):
        return self._chain(self.base.dz(mu))

    def _dzbar(self, mu):
        return self._chain(self.base.dzbar(mu))

    def conj(self):
        if self.real_base:
            return self
        return power(self.base.conj(), self.exponent)

    def __repr__(self):
        return f"({self.base!r})**{self.exponent}"


def power(base, exponent, real_base: bool = False) -> ScalarField:
    base = as_field(base)
    exponent = float(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const):
        if base.is_zero and exponent < 0:
            raise ZeroDivisionError("negative power of the zero field")
        return Const(base.value**exponent)
    if isinstance(base, Power) and float(exponent).is_integer() and float(base.exponent).is_integer():
        return power(base.base, base.exponent * exponent, base.real_base)
    if isinstance(base, Power) and base.real_base:
        return power(base.base, base.exponent * exponent, True)
    return Power(base, exponent, real_base)


def sum_fields(*terms) -> ScalarField:
    flat = []
    const = 0j
    for t in terms:
        t = as_field(t)
        if isinstance(t, Sum):
            for u in t.terms:
                if isinstance(u, Const):
                    const += u.value
                else:
                    flat.append(u)
        elif isinstance(t, Const):
            const += t.value
        else:
            flat.append(t)
    if const != 0:
        flat.append(Const(const))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Sum(flat)


def prod_fields(*factors) -> ScalarField:
    flat = []
    const = 1 + 0j
    for f in factors:
        f = as_field(f)
        if isinstance(f, Prod):
            items = f.factors
        else:
            items = (f,)
        for u in items:
            if isinstance(u, Const):
                const *= u.value
            else:
                flat.append(u)
    if const == 0:
        return ZERO
    if const != 1:
        flat.insert(0, Const(const))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Prod(flat)


class RadialProfile(ScalarField):
    """A real function ``phi(s)`` known through its values and log-derivative.

    ``value`` maps an array of ``s`` to ``phi(s)``; ``logderiv`` is a field
    equal to ``phi'(s)/phi(s)``.  The derivative rule is
    ``d_mu phi = phi * logderiv * d_mu s``.  Used for profiles defined only by
    an ODE (no elementary closed form).
    """

    __slots__ = ("value", "logderiv", "s_field", "name")

    def __init__(self, value: Callable[[np.ndarray], np.ndarray], logderiv: ScalarField, dim: int, name: str = "phi"):
        super().__init__()
        self.value = value
        self.logderiv = logderiv
        self.s_field = radius_sq(dim)
        self.name = name

    def _eval(self, z, zb, cache):
        s = np.real(self.s_field._ev(z, zb, cache))
        return np.asarray(self.value(s), dtype=float) + 0j

    def _dz(self, mu):
        return prod_fields(self, self.logderiv, self.s_field.dz(mu))

    def _dzbar(self, mu):
        return prod_fields(self, self.logderiv, self.s_field.dzbar(mu))

    def conj(self):
        return self

    def __repr__(self):
        return f"{self.name}(s)"


class PointwiseField(ScalarField):
    """A field known only through a numeric evaluator (no derivatives).

    ``func`` receives the points array ``z`` of shape ``(..., dim)``.
    """

    __slots__ = ("func", "name")

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], name: str = "pointwise"):
        super().__init__()
        self.func = func
        self.name = name

    def _eval(self, z, zb, cache):
        return np.asarray(self.func(z), dtype=complex)

    def _dz(self, mu):
        raise NotImplementedError(f"{self.name} carries no derivative information")

    _dzbar = _dz

    def conj(self):
        return PointwiseField(lambda z: np.conj(self.func(z)), name=f"conj({self.name})")

    def __repr__(self):
        return self.name


class GuardedField(ScalarField):
    """Wraps a field with a domain check run on every evaluation.

    ``check(z)`` raises for points outside the chart where the wrapped
    expression is meaningful.  Derivatives are guarded the same way.
    """

    __slots__ = ("inner", "check")

    def __init__(self, inner: ScalarField, check: Callable[[np.ndarray], None]):
        super().__init__()
        self.inner = inner
        self.check = check

    def _eval(self, z, zb, cache):
        self.check(z)
        return self.inner._ev(z, zb, cache)

    def _dz(self, mu):
        d = self.inner.dz(mu)
        return d if d.is_zero else GuardedField(d, self.check)

    def _dzbar(self, mu):
        d = self.inner.dzbar(mu)
        return d if d.is_zero else GuardedField(d, self.check)

    def conj(self):
        return GuardedField(self.inner.conj(), self.check)

    def __repr__(self):
        return f"guarded({self.inner!r})"
