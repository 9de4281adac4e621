"""
K3 surfaces through their period points.

A period point lambda lies on the quadric A(lambda, lambda) = 0 of the
intersection form A. A nonconstant meromorphic function would give a nontrivial
line bundle, whose Chern class is an integer vector m with A(lambda, m) = 0, so
an empty integer kernel certifies degree zero.
"""

import logging
import random
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from .config import settings
from .exactfield import (
    FieldContext,
    FieldElement,
    OutOfModuliError,
    as_element,
    context_of,
    element_from_json,
    element_to_json,
)
from .exactlinalg import (
    DimensionMismatch,
    Inertia,
    IntegerLattice,
    NotSymmetric,
    field_row_to_rational_system,
    integer_kernel,
    signature,
)
from .torus import random_element

logger = logging.getLogger(__name__)

K3_DIM = 22
K3_SIGNATURE = Inertia(3, 19, 0)


class K3Error(Exception):
    """Base class for K3 errors."""
    pass


class WrongSignature(K3Error, OutOfModuliError, ValueError):
    pass


class NotOnQuadric(K3Error, OutOfModuliError):
    """Raised when A(lambda, lambda) != 0."""
    pass


class CannotSolveAtHeight(K3Error):
    """Raised when the quadric sampler finds no solvable draw."""
    pass


class _Rejected(Exception):
    pass


class K3Verdict(str, Enum):
    DEGREE0_CERTIFIED = "Degree0Certified"
    HAS_LINE_BUNDLES = "HasLineBundles"


@dataclass(frozen=True)
class K3Invariants:
    """Hodge and Betti numbers shared by every K3 surface."""
    b1: int = 0
    b2: int = 22
    b_plus: int = 3
    h20: int = 1
    h02: int = 1
    h11: int = 20
    q: int = 0
    p_g: int = 1

    def __post_init__(self):
        if self.b2 != 2 * self.h20 + self.h11:
            raise K3Error(f"b2 = {self.b2} does not match 2*h20 + h11 = {2 * self.h20 + self.h11}")
        if self.q != irregularity(self.b1):
            raise K3Error(f"q = {self.q} does not match b1 = {self.b1}")

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


def irregularity(b1: int) -> int:
    """q = b1/2 for even b1 (Kahler), (b1 - 1)/2 for odd b1."""
    return b1 // 2 if b1 % 2 == 0 else (b1 - 1) // 2


def classify_by_betti(b1: int) -> Optional[str]:
    """The family of degree-zero surfaces with this first Betti number."""
    return {4: "torus", 1: "hopf", 0: "k3"}.get(b1)


# -- intersection forms -----------------------------------------------------

HYPERBOLIC_PLANE = ((0, 1), (1, 0))

# Cartan matrix of E8, nodes 1-3-4-5-6-7-8 in a chain with node 2 on node 4
_E8_EDGES = ((0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3))


def _e8(scale: int) -> Tuple[Tuple[int, ...], ...]:
    rows = [[0] * 8 for _ in range(8)]
    for i in range(8):
        rows[i][i] = 2 * scale
    for i, j in _E8_EDGES:
        rows[i][j] = rows[j][i] = -scale
    return tuple(tuple(r) for r in rows)


_BLOCKS = {
    "U": HYPERBOLIC_PLANE,
    "E8": _e8(1),
    "E8(-1)": _e8(-1),
}


@dataclass(frozen=True)
class IntersectionForm:
    """A symmetric integer matrix, the pairing on H^2 in a chosen basis."""
    matrix: Tuple[Tuple[int, ...], ...]
    name: Optional[str] = None

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.matrix)
        object.__setattr__(self, "matrix", rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionMismatch("Intersection form must be a nonempty square matrix")
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(i + 1, n)):
            raise NotSymmetric("Intersection form must be symmetric")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @classmethod
    def direct_sum(cls, blocks: Iterable["IntersectionForm"], name: Optional[str] = None) -> "IntersectionForm":
        blocks = list(blocks)
        n = sum(b.dim for b in blocks)
        rows = [[0] * n for _ in range(n)]
        offset = 0
        for b in blocks:
            for i, r in enumerate(b.matrix):
                for j, x in enumerate(r):
                    rows[offset + i][offset + j] = x
            offset += b.dim
        return cls(tuple(tuple(r) for r in rows), name)

    @classmethod
    def preset(cls, name: str) -> "IntersectionForm":
        """
        Named forms: "U", "E8", "E8(-1)", "k3" (U^3 + E8(-1)^2) and sums such as
        "U+U" or "U^2+E8(-1)".
        """
        text = name.strip()
        if text.startswith("preset:"):
            text = text[len("preset:"):]
        label = text
        if text.lower() == "k3":
            text = "U^3+E8(-1)^2"
        blocks = []
        for token in text.replace(" ", "").split("+"):
            base, _, power = token.partition("^")
            if base not in _BLOCKS:
                raise K3Error(f"Unknown lattice block: {base}")
            count = int(power) if power else 1
            blocks.extend([cls(_BLOCKS[base], base)] * count)
        if not blocks:
            raise K3Error(f"Empty lattice preset: {name}")
        return cls.direct_sum(blocks, label)

    def hyperbolic_pair(self) -> Optional[Tuple[int, int]]:
        """First (p, q) with A_pp = A_qq = 0 and A_pq != 0."""
        for p in range(self.dim):
            if self.matrix[p][p]:
                continue
            for q in range(p + 1, self.dim):
                if not self.matrix[q][q] and self.matrix[p][q]:
                    return p, q
        return None

    def row_pairing(self, vector: Sequence[Any]) -> List[Any]:
        """The row vector x^t A."""
        if len(vector) != self.dim:
            raise DimensionMismatch(f"Vector of length {len(vector)} for a form of dimension {self.dim}")
        out = []
        for j in range(self.dim):
            acc = 0
            for i, x in enumerate(vector):
                a = self.matrix[i][j]
                if a:
                    acc = x * a + acc
            out.append(acc)
        return out

    def pairing(self, x: Sequence[Any], y: Sequence[Any]) -> Any:
        """A(x, y) = x^t A y."""
        if len(y) != self.dim:
            raise DimensionMismatch(f"Vector of length {len(y)} for a form of dimension {self.dim}")
        acc = 0
        for r, b in zip(self.row_pairing(x), y):
            acc = r * b + acc
        return acc

    def to_json(self) -> Any:
        return f"preset:{self.name}" if self.name else [list(r) for r in self.matrix]

    @classmethod
    def from_json(cls, data: Any) -> "IntersectionForm":
        if isinstance(data, str):
            return cls.preset(data)
        return cls(tuple(tuple(r) for r in data))


@dataclass(frozen=True)
class FormReport:
    dim: int
    inertia: Inertia
    is_k3: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "signature": list(self.inertia), "is_k3": self.is_k3}


def check_form(A: IntersectionForm, expect_k3: bool = False) -> FormReport:
    """Exact inertia; with expect_k3, dimension 22 and signature (3, 19) are required."""
    inertia = signature(A.matrix)
    is_k3 = A.dim == K3_DIM and inertia == K3_SIGNATURE
    if expect_k3 and not is_k3:
        raise WrongSignature(
            f"Expected a K3 lattice of dimension {K3_DIM} and signature (3, 19), "
            f"got dimension {A.dim} and signature {tuple(inertia)}"
        )
    return FormReport(A.dim, inertia, is_k3)


# -- period points ----------------------------------------------------------

@dataclass(frozen=True)
class PeriodPoint:
    coords: Tuple[FieldElement, ...]
    context: FieldContext

    def __post_init__(self):
        if all(c.is_zero() for c in self.coords):
            raise K3Error("A period point cannot be the zero vector")

    @classmethod
    def from_values(cls, values: Sequence[Any], context: Optional[FieldContext] = None) -> "PeriodPoint":
        ctx = context_of(v for v in values if isinstance(v, FieldElement))
        if context is not None:
            ctx = context.merge(ctx)
        return cls(tuple(as_element(v, ctx).promote(ctx) for v in values), ctx)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def to_json(self) -> Dict[str, Any]:
        return {
            "radicands": list(self.context.radicands),
            "lambda": [element_to_json(c) for c in self.coords],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "PeriodPoint":
        context = FieldContext(tuple(data.get("radicands", [])))
        return cls.from_values([element_from_json(e, context) for e in data["lambda"]], context)


@dataclass(frozen=True)
class LineBundleClass:
    """Integer Chern class m with A(lambda, m) = 0."""
    m: Tuple[int, ...]

    def __post_init__(self):
        if not any(self.m):
            raise K3Error("A line bundle class must be nonzero")


def _check_dims(lam: PeriodPoint, A: IntersectionForm) -> None:
    if lam.dim != A.dim:
        raise DimensionMismatch(f"Period point of dimension {lam.dim} for a form of dimension {A.dim}")


def on_quadric(lam: PeriodPoint, A: IntersectionForm) -> bool:
    _check_dims(lam, A)
    return as_element(A.pairing(lam.coords, lam.coords), lam.context).is_zero()


def picard_kernel(lam: PeriodPoint, A: IntersectionForm) -> IntegerLattice:
    """All m in Z^dim with A(lambda, m) = 0."""
    _check_dims(lam, A)
    if not on_quadric(lam, A):
        logger.warning("picard kernel requested for a point off the quadric")
    row = [as_element(x, lam.context) for x in A.row_pairing(lam.coords)]
    lattice = integer_kernel(field_row_to_rational_system(row, lam.context), ncols=A.dim)
    for m in lattice.basis:
        if not as_element(A.pairing(lam.coords, m), lam.context).is_zero():
            raise K3Error(f"Kernel vector {m} fails A(lambda, m) = 0")
    return lattice


def _shortest(lattice: IntegerLattice) -> Optional[LineBundleClass]:
    if lattice.is_trivial():
        return None
    best = min(lattice.basis, key=lambda v: (sum(abs(x) for x in v), v))
    return LineBundleClass(best)


@dataclass
class K3Report:
    on_quadric: bool
    kernel: IntegerLattice
    witness: Optional[LineBundleClass]
    verdict: K3Verdict
    form_dim: int
    note: Optional[str] = None
    invariants: K3Invariants = K3Invariants()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": "k3",
            "on_quadric": self.on_quadric,
            "kernel": self.kernel.to_dict(),
            "kernel_rank": self.kernel.rank,
            "witness": list(self.witness.m) if self.witness else None,
            "verdict": self.verdict.value,
            "form_dim": self.form_dim,
            "note": self.note,
            "invariants": self.invariants.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "K3Report":
        witness = data.get("witness")
        return cls(
            on_quadric=data["on_quadric"],
            kernel=IntegerLattice.from_dict(data["kernel"]),
            witness=LineBundleClass(tuple(witness)) if witness else None,
            verdict=K3Verdict(data["verdict"]),
            form_dim=data["form_dim"],
            note=data.get("note"),
        )


UNDECIDED_NOTE = "line bundles exist; degree in {0, 1, 2} is not decided"


def classify(lam: PeriodPoint, A: IntersectionForm) -> K3Report:
    if not on_quadric(lam, A):
        raise NotOnQuadric("A(lambda, lambda) != 0")
    kernel = picard_kernel(lam, A)
    if kernel.is_trivial():
        return K3Report(True, kernel, None, K3Verdict.DEGREE0_CERTIFIED, A.dim)
    return K3Report(True, kernel, _shortest(kernel), K3Verdict.HAS_LINE_BUNDLES, A.dim, note=UNDECIDED_NOTE)


def sample_quadric(A: IntersectionForm, radicands: Iterable[int], height: int, seed: int,
                   retries: Optional[int] = None) -> PeriodPoint:
    """
    Random point on the quadric: every coordinate but one of a hyperbolic pair
    is drawn at the given height and the last is solved linearly.
    """
    if height < 1:
        raise ValueError("height must be >= 1")
    pair = A.hyperbolic_pair()
    if pair is None:
        raise CannotSolveAtHeight("form has no hyperbolic pair to solve against")
    _, q = pair
    context = FieldContext(tuple(radicands))
    rng = random.Random(seed)
    cap = retries or settings().sample_retries

    def draw() -> PeriodPoint:
        coords = [random_element(rng, context, height) for _ in range(A.dim)]
        coords[q] = FieldElement.zero(context)
        # A(lambda, lambda) = L * lambda_q + C because A_qq = 0
        constant = as_element(A.pairing(coords, coords), context)
        linear = as_element(A.row_pairing(coords)[q], context) * 2
        if linear.is_zero():
            raise _Rejected()
        coords[q] = -constant / linear
        return PeriodPoint(tuple(coords), context)

    try:
        for attempt in Retrying(stop=stop_after_attempt(cap), retry=retry_if_exception_type(_Rejected)):
            with attempt:
                lam = draw()
    except RetryError:
        raise CannotSolveAtHeight(f"No solvable draw after {cap} attempts (seed {seed}, height {height})")
    return lam
