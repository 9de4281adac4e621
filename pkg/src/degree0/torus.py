"""
Two-dimensional complex tori with normalized period matrix (I, Z).

Decides the Riemann locus S (z21 = n * z12), the locus S0 (z12 = 0) and the
degenerate locus R of Z satisfying an integer relation

    m0 + m1*z11 + m2*z12 + m3*z21 + m4*z22 + m5*det(Z) = 0

with some m1..m5 nonzero. R is decided completely by an integer kernel
lattice instead of enumerating sextuples.
"""

import logging
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, NamedTuple, Optional, Sequence

from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from .config import settings
from .exactfield import (
    FieldContext,
    FieldElement,
    InvalidRadicand,
    OutOfModuliError,
    element_from_json,
    element_to_json,
    split,
)
from .exactlinalg import (
    FieldMatrix,
    IntegerLattice,
    field_row_to_rational_system,
    integer_kernel,
    is_positive_definite,
)

logger = logging.getLogger(__name__)

BETTI_1 = 4


class TorusError(Exception):
    """Base class for torus classification errors."""
    pass


class NotInModuli(TorusError, OutOfModuliError):
    """Raised when Im Z is not positive definite."""
    pass


class ExhaustedRetries(TorusError):
    """Raised when a sampler hits its retry cap."""
    pass


class _Rejected(Exception):
    pass


class SConvention(str, Enum):
    """Which off-diagonal entry is the integer multiple of the other."""
    DISPLAYED = "displayed"      # z21 = n * z12
    TRANSPOSED = "transposed"    # z12 = n * z21


class TorusVerdict(str, Enum):
    DEGREE2 = "Degree2"
    DEGREE0_CERTIFIED = "Degree0Certified"
    INCONCLUSIVE01 = "Inconclusive01"


class Sextuple(NamedTuple):
    m0: int
    m1: int
    m2: int
    m3: int
    m4: int
    m5: int

    @property
    def is_admissible(self) -> bool:
        return any(self[1:])


@dataclass(frozen=True)
class PeriodMatrixZ:
    """The 2x2 block Z of a normalized period matrix, entries in one context."""
    z11: FieldElement
    z12: FieldElement
    z21: FieldElement
    z22: FieldElement
    context: FieldContext

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], context: Optional[FieldContext] = None,
                  validate: bool = True) -> "PeriodMatrixZ":
        matrix = FieldMatrix.from_rows(rows, context)
        if (matrix.nrows, matrix.ncols) != (2, 2):
            raise TorusError(f"Z must be 2x2, got {matrix.nrows}x{matrix.ncols}")
        (a, b), (c, d) = matrix.rows
        Z = cls(a, b, c, d, matrix.context)
        if validate and not is_in_M(Z):
            raise NotInModuli(f"Im Z is not positive definite for Z = {matrix}")
        return Z

    @property
    def matrix(self) -> FieldMatrix:
        return FieldMatrix(((self.z11, self.z12), (self.z21, self.z22)), self.context)

    def det(self) -> FieldElement:
        return self.z11 * self.z22 - self.z12 * self.z21

    def relation_row(self):
        """(1, z11, z12, z21, z22, det Z)."""
        return (FieldElement.one(self.context), self.z11, self.z12, self.z21, self.z22, self.det())

    def to_json(self) -> Dict[str, Any]:
        return {
            "radicands": list(self.context.radicands),
            "Z": [[element_to_json(e) for e in r] for r in self.matrix.rows],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any], validate: bool = True) -> "PeriodMatrixZ":
        context = FieldContext(tuple(data.get("radicands", [])))
        rows = [[element_from_json(e, context) for e in r] for r in data["Z"]]
        return cls.from_rows(rows, context, validate=validate)


def imaginary_part(Z) -> FieldMatrix:
    matrix = Z.matrix if isinstance(Z, PeriodMatrixZ) else FieldMatrix.from_rows(
        Z.rows if isinstance(Z, FieldMatrix) else Z
    )
    return FieldMatrix.from_rows([[split(e).im for e in r] for r in matrix.rows])


def is_in_M(Z) -> bool:
    """True iff Im Z is positive definite."""
    if isinstance(Z, PeriodMatrixZ):
        entries = tuple(tuple(sorted(e.coords.items())) for e in (Z.z11, Z.z12, Z.z21, Z.z22))
        return _in_M_by_coords(Z.context, entries)
    return is_positive_definite(imaginary_part(Z))


@lru_cache(maxsize=1024)
def _in_M_by_coords(context: FieldContext, entries) -> bool:
    # samplers check membership before classify checks it again
    a, b, c, d = (FieldElement(context, dict(coords)) for coords in entries)
    return is_positive_definite(imaginary_part([[a, b], [c, d]]))


def s_membership(Z: PeriodMatrixZ, convention: SConvention = SConvention.DISPLAYED) -> Optional[int]:
    """The n >= 1 with z21 = n * z12 (or the transposed relation), if any."""
    if convention == SConvention.DISPLAYED:
        base, multiple = Z.z12, Z.z21
    else:
        base, multiple = Z.z21, Z.z12
    if base.is_zero():
        return 1 if multiple.is_zero() else None
    # any coordinate where base is nonzero fixes the only candidate ratio
    key, value = next(iter(base.coords.items()))
    ratio = multiple.coefficient(key) / value
    if ratio.denominator != 1 or ratio < 1:
        return None
    n = int(ratio)
    if not (multiple - base * n).is_zero():
        return None
    return n


def is_in_S0(Z: PeriodMatrixZ) -> bool:
    return Z.z12.is_zero()


def degenerate_ratio(Z: PeriodMatrixZ) -> bool:
    return Z.z12.is_zero() and Z.z21.is_zero()


def in_S_tilde(Z: PeriodMatrixZ, convention: SConvention = SConvention.DISPLAYED,
               n: Optional[int] = None) -> bool:
    """Membership in the closed locus S0 together with S; pass n when already known."""
    if is_in_S0(Z):
        return True
    if n is None:
        n = s_membership(Z, convention)
    return n is not None


def r_kernel(Z: PeriodMatrixZ) -> IntegerLattice:
    """All integer sextuples m with m . (1, z11, z12, z21, z22, det Z) = 0."""
    row = Z.relation_row()
    lattice = integer_kernel(field_row_to_rational_system(row, Z.context), ncols=6)
    for m in lattice.basis:
        total = FieldElement.zero(Z.context)
        for coefficient, entry in zip(m, row):
            total = total + entry * coefficient
        if not total.is_zero():
            raise TorusError(f"Kernel vector {m} does not annihilate the relation row")
    return lattice


def admissible_in(lattice: IntegerLattice) -> Optional[Sextuple]:
    """
    A lattice member with some of m1..m5 nonzero, or None.

    Basis vectors without constant and determinant terms are preferred, so a
    purely linear relation between the entries is reported when one exists.
    """
    candidates = [Sextuple(*v) for v in lattice.basis if any(v[1:])]
    if not candidates:
        return None
    linear = [m for m in candidates if m.m0 == 0 and m.m5 == 0]
    return (linear or candidates)[0]


@dataclass
class TorusReport:
    """Classification of one torus."""
    in_M: bool
    s_membership: Optional[int]
    in_S0: bool
    in_S_tilde: bool
    degenerate_ratio: bool
    r_kernel: IntegerLattice
    admissible_witness: Optional[Sextuple]
    verdict: TorusVerdict
    convention: SConvention = SConvention.DISPLAYED
    b1: int = BETTI_1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": "torus",
            "in_M": self.in_M,
            "s_membership": self.s_membership,
            "in_S0": self.in_S0,
            "in_S_tilde": self.in_S_tilde,
            "degenerate_ratio": self.degenerate_ratio,
            "r_kernel": self.r_kernel.to_dict(),
            "admissible_witness": list(self.admissible_witness) if self.admissible_witness else None,
            "verdict": self.verdict.value,
            "convention": self.convention.value,
            "b1": self.b1,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TorusReport":
        witness = data.get("admissible_witness")
        return cls(
            in_M=data["in_M"],
            s_membership=data.get("s_membership"),
            in_S0=data["in_S0"],
            in_S_tilde=data.get("in_S_tilde", False),
            degenerate_ratio=data.get("degenerate_ratio", False),
            r_kernel=IntegerLattice.from_dict(data["r_kernel"]),
            admissible_witness=Sextuple(*witness) if witness else None,
            verdict=TorusVerdict(data["verdict"]),
            convention=SConvention(data.get("convention", SConvention.DISPLAYED.value)),
            b1=data.get("b1", BETTI_1),
        )


def classify(Z: PeriodMatrixZ, convention: SConvention = SConvention.DISPLAYED) -> TorusReport:
    """
    Degree2 for Riemann matrices, Degree0Certified when no admissible relation
    exists, Inconclusive01 otherwise. Degree 1 is never asserted.
    """
    if not is_in_M(Z):
        raise NotInModuli("Im Z is not positive definite")
    n = s_membership(Z, convention)
    kernel = r_kernel(Z)
    witness = admissible_in(kernel)
    if n is not None:
        verdict = TorusVerdict.DEGREE2
    elif witness is None:
        verdict = TorusVerdict.DEGREE0_CERTIFIED
    else:
        verdict = TorusVerdict.INCONCLUSIVE01
    logger.debug(f"torus verdict {verdict.value}: n={n}, kernel rank {kernel.rank}")
    return TorusReport(
        in_M=True,
        s_membership=n,
        in_S0=is_in_S0(Z),
        in_S_tilde=in_S_tilde(Z, convention, n),
        degenerate_ratio=degenerate_ratio(Z),
        r_kernel=kernel,
        admissible_witness=witness,
        verdict=verdict,
        convention=convention,
    )


def random_rational(rng: random.Random, height: int) -> Fraction:
    """Uniform p/q with |p| <= height and 1 <= q <= height."""
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def random_element(rng: random.Random, context: FieldContext, height: int) -> FieldElement:
    return FieldElement(context, {key: random_rational(rng, height) for key in context.basis()})


def sample_M(radicands: Iterable[int], height: int, seed: int, retries: Optional[int] = None) -> PeriodMatrixZ:
    """Deterministic random Z in M with coordinates of height at most `height`."""
    if height < 1:
        raise ValueError("height must be >= 1")
    context = FieldContext(tuple(radicands))
    if not any(d < 0 for d in context.radicands):
        raise InvalidRadicand(f"{context} is real; Im Z would vanish")
    rng = random.Random(seed)
    cap = retries or settings().sample_retries

    def draw() -> PeriodMatrixZ:
        rows = [[random_element(rng, context, height) for _ in range(2)] for _ in range(2)]
        Z = PeriodMatrixZ.from_rows(rows, context, validate=False)
        if not is_in_M(Z):
            raise _Rejected()
        return Z

    try:
        for attempt in Retrying(stop=stop_after_attempt(cap), retry=retry_if_exception_type(_Rejected)):
            with attempt:
                Z = draw()
    except RetryError:
        raise ExhaustedRetries(f"No Z in M after {cap} draws (seed {seed}, height {height})")
    return Z
