"""
Hopf surfaces X_t = (C^2 - 0) / <t> for 2x2 matrices t with both eigenvalues
outside the closed unit disc.

Covers moduli membership (both eigenvalues of modulus > 1), the normal-form
classes M0 (distinct eigenvalues), M1 (scalar) and M2 (Jordan block), the
multiplicative dependence lambda1^m = lambda2^n that decides degree one on M0,
and exact verification of invariant functions f(tz) = f(z).
"""

import logging
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

from sympy import divisors, factorint, totient
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from .config import settings
from .exactfield import (
    ContextMismatch,
    FieldContext,
    FieldElement,
    InvalidRadicand,
    OutOfModuliError,
    abs_squared,
    approx,
    as_element,
    element_from_json,
    element_to_json,
    real_context,
    sign,
    square_root,
)
from .exactlinalg import FieldMatrix
from .torus import ExhaustedRetries

logger = logging.getLogger(__name__)

BETTI_1 = 1

# every root of unity in a multi-quadratic field has order dividing 24
ROOT_OF_UNITY_ORDERS = (1, 2, 3, 4, 6, 8, 12, 24)


class HopfError(Exception):
    """Base class for Hopf surface errors."""
    pass


class Singular(HopfError, OutOfModuliError, ValueError):
    pass


class NotInModuli(HopfError, OutOfModuliError):
    """Raised when an eigenvalue of t has modulus <= 1."""
    pass


class NoWitnessForDegree0(HopfError):
    pass


class _Rejected(Exception):
    pass


class HopfClass(str, Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"
    NON_DIAGONALIZABLE_OTHER = "NonDiagonalizableOther"


class HopfVerdict(str, Enum):
    DEGREE1 = "Degree1"
    DEGREE0 = "Degree0"


class WitnessKind(str, Enum):
    POWER_QUOTIENT = "PowerQuotient"
    LINEAR_QUOTIENT = "LinearQuotient"


class Coordinates(str, Enum):
    STANDARD = "standard"
    EIGEN = "eigen"
    CONJUGATE_PAIR = "conjugate-pair"


class DependenceWitness(NamedTuple):
    m: int
    n: int


class Membership(NamedTuple):
    in_moduli: bool
    satisfies_ks_inequalities: bool


@dataclass(frozen=True)
class DependenceResult:
    """Outcome of a dependence search; complete=False means 'none within the bound'."""
    witness: Optional[DependenceWitness]
    complete: bool
    method: str


@dataclass(frozen=True)
class ConjugatePair:
    """a + b*r in K[r]/(r^2 - discriminant), for a discriminant with no root in K."""
    a: FieldElement
    b: FieldElement
    discriminant: FieldElement

    def __mul__(self, other: "ConjugatePair") -> "ConjugatePair":
        return ConjugatePair(
            self.a * other.a + self.b * other.b * self.discriminant,
            self.a * other.b + self.b * other.a,
            self.discriminant,
        )

    def __pow__(self, exponent: int) -> "ConjugatePair":
        result = ConjugatePair(FieldElement.one(self.a.context), FieldElement.zero(self.a.context), self.discriminant)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def swapped(self) -> "ConjugatePair":
        """The image under r -> -r."""
        return ConjugatePair(self.a, -self.b, self.discriminant)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConjugatePair):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def numeric(self, bits: int):
        ctx = real_context(bits)
        root = ctx.sqrt(approx(self.discriminant, bits).to_mpc(ctx))
        return approx(self.a, bits).to_mpc(ctx) + approx(self.b, bits).to_mpc(ctx) * root


@dataclass(frozen=True)
class HopfParam:
    """t = [[alpha, beta], [gamma, delta]] over one field context."""
    alpha: FieldElement
    beta: FieldElement
    gamma: FieldElement
    delta: FieldElement
    context: FieldContext

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], context: Optional[FieldContext] = None) -> "HopfParam":
        matrix = FieldMatrix.from_rows(rows, context)
        if (matrix.nrows, matrix.ncols) != (2, 2):
            raise HopfError(f"t must be 2x2, got {matrix.nrows}x{matrix.ncols}")
        (a, b), (c, d) = matrix.rows
        return cls(a, b, c, d, matrix.context)

    @classmethod
    def diagonal(cls, alpha: Any, delta: Any, context: Optional[FieldContext] = None) -> "HopfParam":
        return cls.from_rows([[alpha, 0], [0, delta]], context)

    @property
    def matrix(self) -> FieldMatrix:
        return FieldMatrix(((self.alpha, self.beta), (self.gamma, self.delta)), self.context)

    @property
    def sigma(self) -> FieldElement:
        return (self.alpha + self.delta) / 2

    @property
    def Delta(self) -> FieldElement:
        diff = self.alpha - self.delta
        return diff * diff / 4 + self.beta * self.gamma

    def det(self) -> FieldElement:
        return self.alpha * self.delta - self.beta * self.gamma

    def is_scalar(self) -> bool:
        return self.beta.is_zero() and self.gamma.is_zero() and self.alpha == self.delta

    def eigenvalues(self) -> Optional[Tuple[FieldElement, FieldElement]]:
        """
        The eigenvalues sigma +- sqrt(Delta) as exact field elements.

        The context grows by one radicand when Delta is rational but not a
        square; None means the eigenvalues need a radical over a non-rational
        Delta and only the conjugate-pair representation is available.
        """
        if self.beta.is_zero() or self.gamma.is_zero():
            return self.alpha, self.delta
        Delta = self.Delta
        root = square_root(Delta)
        if root is None:
            q = Delta.rational_value()
            if q is None:
                return None
            try:
                _, root = self.context.extended_by_sqrt(q)
            except (ContextMismatch, InvalidRadicand) as e:
                logger.debug(f"cannot adjoin sqrt({q}): {e}")
                return None
        sigma = self.sigma
        return sigma + root, sigma - root

    def eigen_pair(self) -> ConjugatePair:
        """lambda1 = sigma + r with r^2 = Delta."""
        ctx = self.context
        return ConjugatePair(self.sigma, FieldElement.one(ctx), self.Delta)

    def conjugated_by(self, u: FieldMatrix) -> "HopfParam":
        """u t u^-1."""
        product = u.matmul(self.matrix).matmul(inverse2(u))
        return HopfParam.from_rows(product.rows, product.context)

    def to_json(self) -> Dict[str, Any]:
        return {
            "radicands": list(self.context.radicands),
            "t": [[element_to_json(e) for e in r] for r in self.matrix.rows],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "HopfParam":
        context = FieldContext(tuple(data.get("radicands", [])))
        return cls.from_rows([[element_from_json(e, context) for e in r] for r in data["t"]], context)


def inverse2(u: FieldMatrix) -> FieldMatrix:
    (a, b), (c, d) = u.rows
    det = a * d - b * c
    if det.is_zero():
        raise Singular("matrix is singular")
    inv = det.inverse()
    return FieldMatrix.from_rows([[d * inv, -b * inv], [-c * inv, a * inv]], u.context)


# -- moduli ------------------------------------------------------------------

def is_in_moduli(t: HopfParam) -> Membership:
    """
    Both eigenvalue moduli > 1, decided without radicals.

    With x, y the squared moduli: P = xy = |det t|^2 and
    S = x + y = 2|sigma|^2 + 2 sqrt(B) where B = |Delta|^2. Then x, y > 1
    exactly when S > 2 and P - S + 1 > 0; both are rewritten as sign tests on
    polynomials in |sigma|^2, B and P.
    """
    det = t.det()
    if det.is_zero():
        raise Singular("t is singular")
    s2 = abs_squared(t.sigma)
    B = abs_squared(t.Delta)
    P = abs_squared(det)

    u = 1 - s2
    if sign(u) < 0:
        sum_ok = True
    else:
        sum_ok = sign(B - u * u) > 0

    v = P + 1 - s2 * 2
    product_ok = sign(v) > 0 and sign(v * v - B * 4) > 0

    trace = t.alpha + t.delta
    diff = t.alpha - t.delta
    ks = sign(abs_squared(trace) - 9) > 0 and sign(abs_squared(diff * diff + t.beta * t.gamma * 4) - 1) < 0
    return Membership(sum_ok and product_ok, ks)


def normal_class(t: HopfParam) -> HopfClass:
    if t.is_scalar():
        return HopfClass.M1
    if t.Delta.is_zero():
        # 2x2, one eigenvalue, not scalar: conjugate to a Jordan block
        return HopfClass.M2
    return HopfClass.M0


# -- multiplicative dependence ----------------------------------------------

def _exponent_vector(q: Fraction) -> Dict[int, int]:
    q = abs(q)
    vector = dict(factorint(q.numerator))
    for p, e in factorint(q.denominator).items():
        vector[p] = vector.get(p, 0) - e
    return {p: e for p, e in vector.items() if e}


def _root_of_unity_order(u: FieldElement) -> Optional[int]:
    if abs_squared(u) != 1:
        return None
    power = FieldElement.one(u.context)
    previous = 0
    for k in ROOT_OF_UNITY_ORDERS:
        power = power * u ** (k - previous)
        previous = k
        if power == 1:
            return k
    return None


def _norm_dependence(alpha: FieldElement, delta: FieldElement) -> Optional[DependenceWitness]:
    # alpha^m = delta^n forces m * v(alpha) = n * v(delta) on norm exponents,
    # so (m, n) is a multiple of the primitive ratio (m0, n0)
    va = _exponent_vector(alpha.norm())
    vd = _exponent_vector(delta.norm())
    if set(va) != set(vd):
        return None
    p = next(iter(vd))
    ratio = Fraction(va[p], vd[p])
    if any(Fraction(va[q]) != ratio * vd[q] for q in vd):
        return None
    m0, n0 = ratio.denominator, ratio.numerator
    k = _root_of_unity_order(alpha ** m0 / delta ** n0)
    if k is None:
        return None
    return DependenceWitness(k * m0, k * n0)


def _log_abs(a: FieldElement, bits: int):
    ctx = real_context(bits)
    return ctx.log(approx(abs_squared(a), bits).to_mpc(ctx).real) / 2


def _bounded_dependence(alpha: FieldElement, delta: FieldElement, bound: int) -> Optional[DependenceWitness]:
    powers: Dict[FieldElement, int] = {}
    power = FieldElement.one(delta.context)
    for n in range(1, bound + 1):
        power = power * delta
        powers.setdefault(power, n)
    power = FieldElement.one(alpha.context)
    for m in range(1, bound + 1):
        power = power * alpha
        n = powers.get(power)
        if n is not None:
            return DependenceWitness(m, n)
    # integer-relation pass beyond the box; candidates are checked exactly
    bits = 256
    relation = real_context(bits).pslq([_log_abs(alpha, bits), _log_abs(delta, bits)],
                                       maxcoeff=bound * bound, maxsteps=10 ** 4)
    if relation:
        m0, n0 = abs(relation[0]), abs(relation[1])
        if m0 and n0:
            k = _root_of_unity_order(alpha ** m0 / delta ** n0)
            if k is not None:
                logger.debug(f"integer relation candidate ({m0}, {n0}) confirmed with root of unity order {k}")
                return DependenceWitness(k * m0, k * n0)
    return None


def mult_dependence(alpha: FieldElement, delta: FieldElement, height_bound: Optional[int] = None) -> DependenceResult:
    """
    Minimal nonzero (m, n) with alpha^m == delta^n.

    The decision is complete unless both absolute norms are units, in which
    case an exact search up to height_bound (plus an integer-relation
    candidate pass) is run and a negative answer is flagged incomplete.
    """
    alpha, delta = as_element(alpha), as_element(delta)
    ctx = alpha.context.merge(delta.context)
    alpha, delta = alpha.promote(ctx), delta.promote(ctx)
    bound = height_bound or settings().hopf_bound
    na, nd = abs(alpha.norm()), abs(delta.norm())
    if na != 1 and nd != 1:
        witness = _norm_dependence(alpha, delta)
        result = DependenceResult(witness, True, "norm-factorization")
    elif (na == 1) != (nd == 1):
        # a unit power can never equal a non-unit power
        result = DependenceResult(None, True, "norm-factorization")
    else:
        logger.debug(f"both norms are units; bounded search up to {bound}")
        witness = _bounded_dependence(alpha, delta, bound)
        result = DependenceResult(witness, witness is not None, "bounded-search")
    if result.witness is not None:
        m, n = result.witness
        if alpha ** m != delta ** n:
            raise HopfError(f"dependence witness {result.witness} failed exact verification")
    return result


def _candidate_orders_bound(t: HopfParam) -> int:
    # a primitive N-th root of unity in a degree-D field needs totient(N) <= D,
    # and totient(N) >= sqrt(N/2)
    D = 2 * t.context.degree
    return 2 * D * D


def pair_dependence(t: HopfParam) -> DependenceResult:
    """
    Dependence for eigenvalues conjugate over K under r -> -r.

    lambda1^m = lambda2^n implies lambda2^m = lambda1^n, hence m = n, so a
    witness exists iff lambda1/lambda2 is a root of unity. Its order is read
    off the argument numerically and confirmed exactly.
    """
    lam = t.eigen_pair()
    Nmax = _candidate_orders_bound(t)
    bits = 4 * Nmax.bit_length() + 64
    ctx = real_context(bits)
    ratio = lam.numeric(bits) / lam.swapped().numeric(bits)
    if abs(abs(ratio) - 1) > ctx.mpf(2) ** (-bits // 2):
        return DependenceResult(None, True, "conjugate-pair")
    turn = ctx.arg(ratio) / (2 * ctx.pi)
    man, exp = turn.man_exp
    frac = Fraction(man) * Fraction(2) ** exp
    N = frac.limit_denominator(Nmax).denominator
    for d in divisors(N):
        if totient(d) > 2 * t.context.degree:
            break
        if lam ** d == lam.swapped() ** d:
            return DependenceResult(DependenceWitness(d, d), True, "conjugate-pair")
    return DependenceResult(None, True, "conjugate-pair")


# -- witnesses ---------------------------------------------------------------

@dataclass
class WitnessFunction:
    """A meromorphic f with f(tz) = f(z), as numerator over denominator."""
    kind: WitnessKind
    m: Optional[int] = None
    n: Optional[int] = None
    c1: Optional[FieldElement] = None
    c2: Optional[FieldElement] = None
    coordinates: Coordinates = Coordinates.STANDARD
    basis_change: Optional[FieldMatrix] = None

    def description(self) -> str:
        var = "w" if self.coordinates != Coordinates.STANDARD else "z"
        if self.kind == WitnessKind.POWER_QUOTIENT:
            top = f"{var}1" if self.m == 1 else f"{var}1^{self.m}"
            bottom = f"{var}2" if self.n == 1 else f"{var}2^{self.n}"
            text = f"{top}/{bottom}"
        else:
            text = f"({var}1 + 2*{var}2 + ({self.c1}))/({var}1 + 2*{var}2 + ({self.c2}))"
        if self.coordinates == Coordinates.EIGEN:
            text += " with w = u^-1 z"
        elif self.coordinates == Coordinates.CONJUGATE_PAIR:
            text += " in an eigenbasis over K(sqrt(Delta))"
        return text

    def to_dict(self) -> Dict[str, Any]:
        context = None
        for e in (self.c1, self.c2):
            if e is not None:
                context = e.context if context is None else context.merge(e.context)
        if self.basis_change is not None:
            context = self.basis_change.context if context is None else context.merge(self.basis_change.context)
        return {
            "kind": self.kind.value,
            "m": self.m,
            "n": self.n,
            "c1": element_to_json(self.c1) if self.c1 is not None else None,
            "c2": element_to_json(self.c2) if self.c2 is not None else None,
            "coordinates": self.coordinates.value,
            "basis_change": self.basis_change.to_json() if self.basis_change is not None else None,
            "radicands": list(context.radicands) if context is not None else [],
            "description": self.description(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WitnessFunction":
        context = FieldContext(tuple(data.get("radicands", [])))
        basis = data.get("basis_change")
        return cls(
            kind=WitnessKind(data["kind"]),
            m=data.get("m"),
            n=data.get("n"),
            c1=element_from_json(data["c1"], context) if data.get("c1") is not None else None,
            c2=element_from_json(data["c2"], context) if data.get("c2") is not None else None,
            coordinates=Coordinates(data.get("coordinates", Coordinates.STANDARD.value)),
            basis_change=FieldMatrix.from_json(basis, context) if basis is not None else None,
        )


def jordan_constants(alpha: FieldElement) -> Tuple[FieldElement, FieldElement]:
    """c1 = -(2a^2 + 9a)/3 and c2 = (2a^2 + 15a)/(3(a - 1))."""
    if alpha == 1:
        raise HopfError("c2 is undefined for alpha = 1")
    square = alpha * alpha
    c1 = -(square * 2 + alpha * 9) / 3
    c2 = (square * 2 + alpha * 15) / ((alpha - 1) * 3)
    return c1, c2


def _eigenvector(t: HopfParam, lam: FieldElement, index: int) -> List[FieldElement]:
    if not t.beta.is_zero():
        return [t.beta, lam - t.alpha]
    if not t.gamma.is_zero():
        return [lam - t.delta, t.gamma]
    one, zero = FieldElement.one(t.context), FieldElement.zero(t.context)
    return [one, zero] if index == 0 else [zero, one]


def eigen_basis(t: HopfParam, eigenvalues: Tuple[FieldElement, FieldElement]) -> Optional[FieldMatrix]:
    """u with u^-1 t u = diag(eigenvalues), or None if t is already that diagonal."""
    if t.beta.is_zero() and t.gamma.is_zero() and (t.alpha, t.delta) == tuple(eigenvalues):
        return None
    v1 = _eigenvector(t, eigenvalues[0], 0)
    v2 = _eigenvector(t, eigenvalues[1], 1)
    return FieldMatrix.from_rows([[v1[0], v2[0]], [v1[1], v2[1]]])


def jordan_basis(t: HopfParam) -> Optional[FieldMatrix]:
    """u with u^-1 t u = [[sigma, 1], [0, sigma]], or None if t is already that block."""
    sigma = t.sigma
    shifted = t.matrix + FieldMatrix.identity(2, t.context) * (-sigma)
    v2 = [0, 1]
    v1 = list(shifted.apply(v2))
    if all(e.is_zero() for e in v1):
        v2 = [1, 0]
        v1 = list(shifted.apply(v2))
    u = FieldMatrix.from_rows([[v1[0], v2[0]], [v1[1], v2[1]]], t.context)
    if u == FieldMatrix.identity(2, u.context):
        return None
    return u


def make_witness(t: HopfParam, report: "HopfReport") -> WitnessFunction:
    if report.verdict != HopfVerdict.DEGREE1:
        raise NoWitnessForDegree0("degree-zero surfaces carry no invariant function")
    if report.hopf_class == HopfClass.M1:
        return WitnessFunction(WitnessKind.POWER_QUOTIENT, m=1, n=1)
    if report.hopf_class == HopfClass.M2:
        c1, c2 = jordan_constants(t.sigma)
        u = jordan_basis(t)
        return WitnessFunction(
            WitnessKind.LINEAR_QUOTIENT, c1=c1, c2=c2,
            coordinates=Coordinates.STANDARD if u is None else Coordinates.EIGEN,
            basis_change=u,
        )
    m, n = report.dependence
    if report.eigenvalues is None:
        return WitnessFunction(WitnessKind.POWER_QUOTIENT, m=m, n=n, coordinates=Coordinates.CONJUGATE_PAIR)
    u = eigen_basis(t, report.eigenvalues)
    return WitnessFunction(
        WitnessKind.POWER_QUOTIENT, m=m, n=n,
        coordinates=Coordinates.STANDARD if u is None else Coordinates.EIGEN,
        basis_change=u,
    )


Poly = Dict[Tuple[int, int], FieldElement]


def _poly_add(p: Poly, q: Poly, scale: int = 1) -> Poly:
    out = dict(p)
    for mono, c in q.items():
        out[mono] = out[mono] + c * scale if mono in out else c * scale
    return {k: v for k, v in out.items() if not v.is_zero()}


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (i, j), a in p.items():
        for (k, l), b in q.items():
            mono = (i + k, j + l)
            out[mono] = out[mono] + a * b if mono in out else a * b
    return {k: v for k, v in out.items() if not v.is_zero()}


def _poly_pow(p: Poly, exponent: int, context: FieldContext) -> Poly:
    result: Poly = {(0, 0): FieldElement.one(context)}
    for _ in range(exponent):
        result = _poly_mul(result, p)
    return result


def _substitute(p: Poly, T: FieldMatrix) -> Poly:
    """p(T z)."""
    ctx = T.context
    (a, b), (c, d) = T.rows
    w1 = {k: v for k, v in {(1, 0): a, (0, 1): b}.items() if not v.is_zero()}
    w2 = {k: v for k, v in {(1, 0): c, (0, 1): d}.items() if not v.is_zero()}
    out: Poly = {}
    for (i, j), coeff in p.items():
        term = _poly_mul(_poly_pow(w1, i, ctx), _poly_pow(w2, j, ctx))
        out = _poly_add(out, {k: v * coeff for k, v in term.items()})
    return out


def witness_polynomials(f: WitnessFunction, context: FieldContext) -> Tuple[Poly, Poly]:
    one = FieldElement.one(context)
    if f.kind == WitnessKind.POWER_QUOTIENT:
        m, n = f.m, f.n
        top = (max(m, 0), max(-n, 0))
        bottom = (max(-m, 0), max(n, 0))
        return {top: one}, {bottom: one}
    two = one * 2
    numerator = {(1, 0): one, (0, 1): two}
    denominator = dict(numerator)
    if not f.c1.is_zero():
        numerator[(0, 0)] = f.c1
    if not f.c2.is_zero():
        denominator[(0, 0)] = f.c2
    return numerator, denominator


def verify_witness(f: WitnessFunction, t: HopfParam) -> bool:
    """
    Decide f(tz) = f(z) as the polynomial identity P(tz)Q(z) - P(z)Q(tz) = 0.

    Eigen-coordinate witnesses are checked against u^-1 t u; conjugate-pair
    witnesses reduce to lambda1^m == lambda2^n in K[r]/(r^2 - Delta).
    """
    if f.coordinates == Coordinates.CONJUGATE_PAIR:
        lam = t.eigen_pair()
        return lam ** f.m == lam.swapped() ** f.n
    T = t.matrix
    if f.basis_change is not None:
        T = inverse2(f.basis_change).matmul(T).matmul(f.basis_change)
    P, Q = witness_polynomials(f, T.context)
    difference = _poly_add(
        _poly_mul(_substitute(P, T), Q),
        _poly_mul(P, _substitute(Q, T)),
        scale=-1,
    )
    return not difference


# -- classification ----------------------------------------------------------

@dataclass
class HopfReport:
    in_moduli: bool
    satisfies_ks_inequalities: bool
    hopf_class: HopfClass
    verdict: HopfVerdict
    eigenvalues: Optional[Tuple[FieldElement, FieldElement]] = None
    dependence: Optional[DependenceWitness] = None
    dependence_complete: Optional[bool] = None
    dependence_method: Optional[str] = None
    witness: Optional[WitnessFunction] = None
    witness_verified: Optional[bool] = None
    b1: int = BETTI_1

    @property
    def bounded_caveat(self) -> bool:
        """Degree0 rests on a bounded search rather than a proof."""
        return self.verdict == HopfVerdict.DEGREE0 and self.dependence_complete is False

    def to_dict(self) -> Dict[str, Any]:
        eig = None
        if self.eigenvalues is not None:
            ctx = self.eigenvalues[0].context.merge(self.eigenvalues[1].context)
            eig = {
                "radicands": list(ctx.radicands),
                "values": [element_to_json(e) for e in self.eigenvalues],
            }
        return {
            "family": "hopf",
            "in_moduli": self.in_moduli,
            "satisfies_ks_inequalities": self.satisfies_ks_inequalities,
            "class": self.hopf_class.value,
            "eigenvalues": eig,
            "dependence": list(self.dependence) if self.dependence else None,
            "dependence_complete": self.dependence_complete,
            "dependence_method": self.dependence_method,
            "bounded_caveat": self.bounded_caveat,
            "witness": self.witness.to_dict() if self.witness else None,
            "witness_verified": self.witness_verified,
            "verdict": self.verdict.value,
            "b1": self.b1,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "HopfReport":
        eig = data.get("eigenvalues")
        eigenvalues = None
        if eig:
            ctx = FieldContext(tuple(eig["radicands"]))
            eigenvalues = tuple(element_from_json(e, ctx) for e in eig["values"])
        dep = data.get("dependence")
        return cls(
            in_moduli=data["in_moduli"],
            satisfies_ks_inequalities=data["satisfies_ks_inequalities"],
            hopf_class=HopfClass(data["class"]),
            verdict=HopfVerdict(data["verdict"]),
            eigenvalues=eigenvalues,
            dependence=DependenceWitness(*dep) if dep else None,
            dependence_complete=data.get("dependence_complete"),
            dependence_method=data.get("dependence_method"),
            witness=WitnessFunction.from_dict(data["witness"]) if data.get("witness") else None,
            witness_verified=data.get("witness_verified"),
            b1=data.get("b1", BETTI_1),
        )


def classify(t: HopfParam, height_bound: Optional[int] = None) -> HopfReport:
    """
    M1 and M2 have degree one; on M0 the degree is one exactly when the
    eigenvalues are multiplicatively dependent. Degree two never occurs.
    """
    membership = is_in_moduli(t)
    if not membership.in_moduli:
        raise NotInModuli(f"an eigenvalue of t = {t.matrix} has modulus <= 1")
    hopf_class = normal_class(t)
    report = HopfReport(
        in_moduli=True,
        satisfies_ks_inequalities=membership.satisfies_ks_inequalities,
        hopf_class=hopf_class,
        verdict=HopfVerdict.DEGREE1,
        eigenvalues=t.eigenvalues(),
    )
    if hopf_class == HopfClass.M0:
        if report.eigenvalues is not None:
            result = mult_dependence(report.eigenvalues[0], report.eigenvalues[1], height_bound)
        else:
            result = pair_dependence(t)
        report.dependence = result.witness
        report.dependence_complete = result.complete
        report.dependence_method = result.method
        if result.witness is None:
            report.verdict = HopfVerdict.DEGREE0
            logger.debug(f"no dependence ({result.method}, complete={result.complete})")
            return report
    report.witness = make_witness(t, report)
    report.witness_verified = verify_witness(report.witness, t)
    if not report.witness_verified:
        logger.warning(f"witness {report.witness.description()} fails f(tz) = f(z) for t = {t.matrix}")
    return report


def sample_diagonal(height: int, seed: int, retries: Optional[int] = None) -> HopfParam:
    """Random diagonal t with rational entries of height <= height and moduli > 1."""
    if height < 2:
        raise ValueError("height must be >= 2 to reach modulus > 1")
    rng = random.Random(seed)
    cap = retries or settings().sample_retries

    def entry() -> Fraction:
        q = Fraction(rng.randint(-height, height), rng.randint(1, height))
        if abs(q) <= 1:
            raise _Rejected()
        return q

    try:
        for attempt in Retrying(stop=stop_after_attempt(cap), retry=retry_if_exception_type(_Rejected)):
            with attempt:
                alpha = entry()
                delta = entry()
    except RetryError:
        raise ExhaustedRetries(f"No diagonal t in moduli after {cap} draws (seed {seed})")
    return HopfParam.diagonal(alpha, delta)
