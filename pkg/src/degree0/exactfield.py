"""
Exact arithmetic in multi-quadratic number fields.

An element of Q(sqrt(d1), ..., sqrt(dk)) is stored as rational coordinates over
the basis of square-root products sqrt(d_S) = prod_{d in S} sqrt(d), indexed by
subsets S of the radicands. Radicands are pairwise coprime square-free integers
(negative allowed, -1 gives the imaginary unit), so the basis is closed under
multiplication and linearly independent over Q: zero testing is a coordinate
check and equality is decidable.

Signs of real elements are decided with mpmath interval arithmetic at
increasing precision.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd, isqrt
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import mpmath
from mpmath.ctx_iv import MPIntervalContext
from sympy import factorint

from .config import settings

logger = logging.getLogger(__name__)

Key = Tuple[int, ...]
Rational = Union[int, Fraction]


class FieldError(Exception):
    """Base class for number field errors."""
    pass


class InvalidRadicand(FieldError, ValueError):
    """Raised when a radicand list violates the field context invariants."""
    pass


class ContextMismatch(FieldError):
    """Raised when two field contexts cannot be merged."""
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    """Raised when inverting the zero element."""
    pass


class NotReal(FieldError, ValueError):
    """Raised when a real-only operation receives a non-real element."""
    pass


class OutOfModuliError(Exception):
    """Marker for errors raised when an input lies outside its moduli space."""
    pass


def _is_squarefree(d: int) -> bool:
    return all(e == 1 for e in factorint(abs(d)).values())


def _negative_count(key: Key) -> int:
    return sum(1 for d in key if d < 0)


@lru_cache(maxsize=1 << 16)
def _multiply_keys(s: Key, t: Key) -> Tuple[int, Key]:
    """sqrt(d_S) * sqrt(d_T) = (prod_{S & T} d) * sqrt(d_{S ^ T})."""
    factor = 1
    out = []
    i = j = 0
    while i < len(s) and j < len(t):
        if s[i] == t[j]:
            factor *= s[i]
            i += 1
            j += 1
        elif s[i] < t[j]:
            out.append(s[i])
            i += 1
        else:
            out.append(t[j])
            j += 1
    out.extend(s[i:])
    out.extend(t[j:])
    return factor, tuple(out)


@dataclass(frozen=True)
class FieldContext:
    """
    The field Q(sqrt(d) : d in radicands).

    Radicands are kept sorted and duplicate-free; every radicand is square-free,
    different from 0 and 1, and coprime to every other radicand.
    """
    radicands: Tuple[int, ...] = ()

    def __post_init__(self):
        rads = tuple(sorted(int(d) for d in self.radicands))
        object.__setattr__(self, "radicands", rads)
        _validate_radicands(rads)

    @classmethod
    def of(cls, *radicands: int) -> "FieldContext":
        """Build a context from radicand arguments, e.g. FieldContext.of(-1, 2)."""
        return cls(tuple(radicands))

    @property
    def degree(self) -> int:
        """Dimension of the field over Q (2^k)."""
        return 1 << len(self.radicands)

    @property
    def has_imaginary_unit(self) -> bool:
        return -1 in self.radicands

    def basis(self) -> Tuple[Key, ...]:
        """All radicand subsets, ordered by size then lexicographically."""
        keys = []
        for size in range(len(self.radicands) + 1):
            keys.extend(combinations(self.radicands, size))
        return tuple(keys)

    def contains(self, other: "FieldContext") -> bool:
        return set(other.radicands) <= set(self.radicands)

    def merge(self, other: "FieldContext") -> "FieldContext":
        """Smallest context containing both, or ContextMismatch if illegal."""
        if self == other or self.contains(other):
            return self
        if other.contains(self):
            return other
        return _merge_radicands(self.radicands, other.radicands)

    def extended_by_sqrt(self, q: Rational) -> Tuple["FieldContext", "FieldElement"]:
        """
        Return (context, r) with r * r == q, extending by at most one radicand.

        The square-free part of q is matched against products of existing
        radicands first; the leftover factor, if any, becomes a new radicand.
        """
        q = Fraction(q)
        if q == 0:
            return self, FieldElement(self)
        num, den = q.numerator, q.denominator
        # sqrt(n/d) = sqrt(n*d) / d
        value = num * den
        sign = -1 if value < 0 else 1
        square_part = 1
        squarefree = sign
        for p, e in factorint(abs(value)).items():
            square_part *= p ** (e // 2)
            if e % 2:
                squarefree *= p
        scale = Fraction(square_part, den)
        if squarefree == 1:
            return self, FieldElement.rational(self, scale)
        for size in range(len(self.radicands), -1, -1):
            for subset in combinations(self.radicands, size):
                prod = 1
                for d in subset:
                    prod *= d
                if squarefree % prod != 0:
                    continue
                rest = squarefree // prod
                if rest == 1:
                    return self, FieldElement(self, {subset: scale})
                try:
                    context = self.merge(FieldContext((rest,)))
                except (ContextMismatch, InvalidRadicand):
                    continue
                key = tuple(sorted(subset + (rest,)))
                return context, FieldElement(context, {key: scale})
        raise ContextMismatch(
            f"sqrt({q}) is not representable over radicands {list(self.radicands)}"
        )

    def __str__(self) -> str:
        if not self.radicands:
            return "Q"
        return "Q(" + ", ".join(f"sqrt({d})" for d in self.radicands) + ")"


def _validate_radicands(rads: Tuple[int, ...]) -> None:
    bound = settings().max_radicands
    if len(rads) > bound:
        raise InvalidRadicand(f"At most {bound} radicands allowed, got {len(rads)}")
    if len(set(rads)) != len(rads):
        raise InvalidRadicand(f"Duplicate radicands in {list(rads)}")
    for d in rads:
        if d in (0, 1):
            raise InvalidRadicand(f"Radicand {d} is not allowed")
        if not _is_squarefree(d):
            raise InvalidRadicand(f"Radicand {d} is not square-free")
    for a, b in combinations(rads, 2):
        if gcd(a, b) != 1:
            raise InvalidRadicand(f"Radicands {a} and {b} are not coprime")


@lru_cache(maxsize=1024)
def _merge_radicands(a: Tuple[int, ...], b: Tuple[int, ...]) -> FieldContext:
    union = tuple(sorted(set(a) | set(b)))
    for x in a:
        for y in b:
            if x != y and gcd(x, y) != 1:
                raise ContextMismatch(
                    f"Cannot merge radicands {list(a)} and {list(b)}: {x} and {y} are not coprime"
                )
    try:
        return FieldContext(union)
    except InvalidRadicand as e:
        raise ContextMismatch(str(e))


QQ = FieldContext()


class FieldElement:
    """
    Immutable element of a multi-quadratic field.

    Coordinates map radicand subsets (sorted tuples) to nonzero Fractions;
    absent subsets are zero. Because keys are radicand tuples rather than
    positions, coordinates are unchanged when an element is promoted to a
    larger context.
    """

    __slots__ = ("context", "_coords")

    def __init__(self, context: FieldContext, coords: Optional[Mapping[Key, Rational]] = None):
        self.context = context
        clean: Dict[Key, Fraction] = {}
        allowed = set(context.radicands)
        for key, value in (coords or {}).items():
            key = tuple(sorted(key))
            if not set(key) <= allowed:
                raise ContextMismatch(f"Basis element {key} is not in {context}")
            value = Fraction(value)
            if value:
                clean[key] = clean.get(key, Fraction(0)) + value
                if not clean[key]:
                    del clean[key]
        self._coords = clean

    # -- construction ---------------------------------------------------

    @classmethod
    def _raw(cls, context: FieldContext, coords: Dict[Key, Fraction]) -> "FieldElement":
        obj = cls.__new__(cls)
        obj.context = context
        obj._coords = {k: v for k, v in coords.items() if v}
        return obj

    @classmethod
    def rational(cls, context: FieldContext, q: Rational) -> "FieldElement":
        q = Fraction(q)
        return cls._raw(context, {(): q} if q else {})

    @classmethod
    def zero(cls, context: FieldContext = QQ) -> "FieldElement":
        return cls._raw(context, {})

    @classmethod
    def one(cls, context: FieldContext = QQ) -> "FieldElement":
        return cls._raw(context, {(): Fraction(1)})

    @classmethod
    def sqrt(cls, context: FieldContext, *radicands: int) -> "FieldElement":
        """The basis element prod sqrt(d) for the given radicands of the context."""
        return cls(context, {tuple(sorted(radicands)): 1})

    @classmethod
    def imaginary_unit(cls, context: FieldContext) -> "FieldElement":
        if not context.has_imaginary_unit:
            raise ContextMismatch(f"{context} does not contain sqrt(-1)")
        return cls._raw(context, {(-1,): Fraction(1)})

    # -- coordinates ----------------------------------------------------

    @property
    def coords(self) -> Dict[Key, Fraction]:
        return dict(self._coords)

    def coefficient(self, key: Key) -> Fraction:
        return self._coords.get(tuple(sorted(key)), Fraction(0))

    def promote(self, context: FieldContext) -> "FieldElement":
        if context == self.context:
            return self
        if not context.contains(self.context):
            raise ContextMismatch(f"Cannot promote element of {self.context} to {context}")
        return FieldElement._raw(context, self._coords)

    def is_zero(self) -> bool:
        return not self._coords

    def is_rational(self) -> bool:
        return all(key == () for key in self._coords)

    def rational_value(self) -> Optional[Fraction]:
        """The element as a Fraction if it lies in Q, else None."""
        if not self.is_rational():
            return None
        return self._coords.get((), Fraction(0))

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> Optional["FieldElement"]:
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FieldElement.rational(self.context, other)
        return None

    def _common(self, other: "FieldElement") -> Tuple[FieldContext, "FieldElement", "FieldElement"]:
        context = self.context.merge(other.context)
        return context, self.promote(context), other.promote(context)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        context, a, b = self._common(other)
        coords = dict(a._coords)
        for key, value in b._coords.items():
            coords[key] = coords.get(key, Fraction(0)) + value
        return FieldElement._raw(context, coords)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement._raw(self.context, {k: -v for k, v in self._coords.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            q = Fraction(other)
            return FieldElement._raw(self.context, {k: v * q for k, v in self._coords.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        context, a, b = self._common(other)
        coords: Dict[Key, Fraction] = {}
        for s, x in a._coords.items():
            for t, y in b._coords.items():
                factor, key = _multiply_keys(s, t)
                coords[key] = coords.get(key, Fraction(0)) + factor * x * y
        return FieldElement._raw(context, coords)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                raise DivisionByZero("division by zero")
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = FieldElement.one(self.context)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.context != other.context:
            self.context.merge(other.context)
        return self._coords == other._coords

    def __hash__(self):
        q = self.rational_value()
        if q is not None:
            return hash(q)
        return hash(frozenset(self._coords.items()))

    def __bool__(self):
        return not self.is_zero()

    # -- conjugations, norm, inverse ------------------------------------

    def galois_conjugate(self, radicand: int) -> "FieldElement":
        """Apply sqrt(radicand) -> -sqrt(radicand)."""
        return FieldElement._raw(
            self.context,
            {k: (-v if radicand in k else v) for k, v in self._coords.items()},
        )

    def conjugate(self) -> "FieldElement":
        """Complex conjugation: negate subsets with an odd number of negative radicands."""
        return FieldElement._raw(
            self.context,
            {k: (-v if _negative_count(k) % 2 else v) for k, v in self._coords.items()},
        )

    def is_real(self) -> bool:
        return all(_negative_count(k) % 2 == 0 for k in self._coords)

    def _norm_tower(self) -> Tuple["FieldElement", Fraction]:
        # a * prod(conjugates) = N(a); returns (prod(conjugates), N(a))
        cofactor = FieldElement.one(self.context)
        current = self
        for d in self.context.radicands:
            if not any(d in k for k in current._coords):
                # current already lies in the subfield fixed by this automorphism
                cofactor = cofactor * current
                current = current * current
                continue
            conj = current.galois_conjugate(d)
            cofactor = cofactor * conj
            current = current * conj
        value = current.rational_value()
        assert value is not None, "norm tower must end in Q"
        return cofactor, value

    def norm(self) -> Fraction:
        """Absolute norm N_{K/Q} over this element's context."""
        return self._norm_tower()[1]

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        cofactor, value = self._norm_tower()
        return cofactor * (1 / value)

    # -- numerics -------------------------------------------------------

    def approx(self, precision_bits: int) -> "ComplexBox":
        return approx(self, precision_bits)

    def sign(self) -> int:
        return sign(self)

    def to_json(self) -> Dict[str, str]:
        return element_to_json(self)

    def __repr__(self) -> str:
        return f"FieldElement({self})"

    def __str__(self) -> str:
        if not self._coords:
            return "0"
        parts = []
        for key in sorted(self._coords, key=lambda k: (len(k), k)):
            value = self._coords[key]
            radical = "*".join(f"sqrt({d})" for d in key)
            if not key:
                parts.append(str(value))
            elif value == 1:
                parts.append(radical)
            elif value == -1:
                parts.append(f"-{radical}")
            else:
                parts.append(f"{value}*{radical}")
        return " + ".join(parts).replace("+ -", "- ")


Scalar = Union[FieldElement, int, Fraction]


def as_element(value: Scalar, context: FieldContext = QQ) -> FieldElement:
    """Coerce ints and Fractions into the given context."""
    if isinstance(value, FieldElement):
        return value
    return FieldElement.rational(context, value)


@dataclass(frozen=True)
class ComplexSplit:
    """Decomposition a = re + i * im with re and im real."""
    re: FieldElement
    im: FieldElement


def split(a: FieldElement) -> ComplexSplit:
    """Split into real and imaginary parts, adding sqrt(-1) to the context if needed."""
    context = a.context.merge(FieldContext((-1,)))
    a = a.promote(context)
    conj = a.conjugate()
    i = FieldElement.imaginary_unit(context)
    return ComplexSplit(re=(a + conj) * Fraction(1, 2), im=(a - conj) * (-i) * Fraction(1, 2))


def abs_squared(a: FieldElement) -> FieldElement:
    """|a|^2 = a * conj(a), a real nonnegative element."""
    return a * a.conjugate()


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    num, den = isqrt(q.numerator), isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def square_root(a: FieldElement) -> Optional[FieldElement]:
    """
    An r in a's context with r * r == a, or None if a is not a square there.

    Peels off one radicand d at a time: writing a = x + y*sqrt(d) and
    r = u + v*sqrt(d) over the smaller field, u^2 is (x + s)/2 or (x - s)/2
    where s^2 = x^2 - d*y^2.
    """
    if a.is_zero():
        return a
    context = a.context
    if not context.radicands:
        q = _rational_sqrt(a.rational_value())
        return None if q is None else FieldElement.rational(context, q)
    d = context.radicands[-1]
    sub = FieldContext(context.radicands[:-1])
    x = FieldElement._raw(sub, {k: v for k, v in a._coords.items() if d not in k})
    y = FieldElement._raw(sub, {tuple(r for r in k if r != d): v for k, v in a._coords.items() if d in k})
    root_d = FieldElement._raw(context, {(d,): Fraction(1)})
    if y.is_zero():
        u = square_root(x)
        if u is not None:
            return u.promote(context)
        v = square_root(x / d)
        if v is not None:
            return v.promote(context) * root_d
        return None
    s = square_root(x * x - y * y * d)
    if s is None:
        return None
    for candidate in ((x + s) / 2, (x - s) / 2):
        u = square_root(candidate)
        if u is None or u.is_zero():
            continue
        r = u.promote(context) + (y / (u * 2)).promote(context) * root_d
        if r * r == a:
            return r
    return None


# -- interval evaluation ---------------------------------------------------

@lru_cache(maxsize=64)
def _interval_context(bits: int) -> MPIntervalContext:
    # one private context per precision; never mutated after creation
    ctx = MPIntervalContext()
    ctx.prec = bits
    return ctx


@lru_cache(maxsize=64)
def real_context(bits: int) -> mpmath.MPContext:
    """A private floating-point context at `bits`; the global mpmath.mp is left alone."""
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


@lru_cache(maxsize=1024)
def _interval_sqrt(bits: int, d: int):
    iv = _interval_context(bits)
    return iv.sqrt(iv.mpf(abs(d)))


@dataclass(frozen=True)
class ComplexBox:
    """Rectangle [re] + i[im] with dyadic endpoints enclosing an exact value."""
    re: object
    im: object
    precision_bits: int

    def width(self):
        return max(self.re.delta, self.im.delta)

    def contains(self, value: complex) -> bool:
        return (value.real in self.re) and (value.imag in self.im)

    def excludes_zero(self) -> bool:
        return 0 not in self.re or 0 not in self.im

    def midpoint(self) -> complex:
        return complex(float(self.re.mid), float(self.im.mid))

    def to_mpc(self, ctx=None):
        """Midpoint as an mpc of `ctx`, by default a private context at the box precision."""
        ctx = ctx or real_context(self.precision_bits)
        return ctx.mpc(ctx.mpf(self.re.mid._mpi_[0]), ctx.mpf(self.im.mid._mpi_[0]))

    def __str__(self) -> str:
        return f"{self.re} + i*{self.im}"


def _evaluate(a: FieldElement, bits: int):
    iv = _interval_context(bits)
    re = iv.mpf(0)
    im = iv.mpf(0)
    for key, value in a._coords.items():
        term = iv.mpf(value.numerator) / iv.mpf(value.denominator)
        for d in key:
            term = term * _interval_sqrt(bits, d)
        # i^(number of negative radicands)
        phase = _negative_count(key) % 4
        if phase == 0:
            re = re + term
        elif phase == 1:
            im = im + term
        elif phase == 2:
            re = re - term
        else:
            im = im - term
    return iv, re, im


def approx(a: FieldElement, precision_bits: int) -> ComplexBox:
    """
    Interval enclosure of a with width at most 2^(1 - precision_bits).

    Working precision is raised until the requested width is reached.
    """
    if precision_bits < 1:
        raise ValueError("precision_bits must be >= 1")
    if a.is_zero():
        iv = _interval_context(precision_bits)
        return ComplexBox(iv.mpf(0), iv.mpf(0), precision_bits)
    guard = 8 + 2 * len(a.context.radicands)
    while True:
        working = precision_bits + guard
        iv, re, im = _evaluate(a, working)
        tolerance = iv.mpf(2) ** (1 - precision_bits)
        if (re.delta <= tolerance) is True and (im.delta <= tolerance) is True:
            return ComplexBox(re, im, working)
        guard *= 2


def sign(a: FieldElement) -> int:
    """Exact sign of a real element."""
    if not a.is_real():
        raise NotReal(f"sign() of non-real element {a}")
    if a.is_zero():
        return 0
    q = a.rational_value()
    if q is not None:
        return 1 if q > 0 else -1
    bits = max(1, settings().precision_bits)
    while True:
        box = approx(a, bits)
        if (box.re > 0) is True:
            return 1
        if (box.re < 0) is True:
            return -1
        logger.debug(f"sign undecided at {bits} bits, doubling precision")
        bits *= 2


# -- module-level operations -------------------------------------------------

def arith(op: str, a: FieldElement, b: FieldElement) -> FieldElement:
    """Apply 'add', 'sub' or 'mul'."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"Unknown operation: {op}")


def inverse(a: FieldElement) -> FieldElement:
    return a.inverse()


def is_zero(a: FieldElement) -> bool:
    return a.is_zero()


def conjugate(a: FieldElement) -> FieldElement:
    return a.conjugate()


def key_to_json(key: Key) -> str:
    return ",".join(str(d) for d in key)


def key_from_json(text: str) -> Key:
    text = text.strip()
    if not text:
        return ()
    return tuple(sorted(int(part) for part in text.split(",")))


def element_to_json(a: FieldElement) -> Dict[str, str]:
    """{"": "1/2", "-1,5": "3"} encodes 1/2 + 3*sqrt(-1)*sqrt(5)."""
    return {key_to_json(k): str(v) for k, v in sorted(a._coords.items())}


def element_from_json(data, context: FieldContext) -> FieldElement:
    """
    Decode an element. Accepts the subset-key object encoding, or a bare
    rational (int or "p/q" string) as shorthand for a rational element.
    """
    if isinstance(data, bool):
        raise ValueError(f"Not a field element: {data!r}")
    if isinstance(data, (int, str)):
        return FieldElement.rational(context, Fraction(data))
    if not isinstance(data, dict):
        raise ValueError(f"Not a field element: {data!r}")
    coords = {key_from_json(k): Fraction(str(v)) for k, v in data.items()}
    return FieldElement(context, coords)


def context_of(elements: Iterable[FieldElement]) -> FieldContext:
    """Merged context of a collection of elements."""
    context = QQ
    for e in elements:
        context = context.merge(e.context)
    return context
