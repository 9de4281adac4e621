"""
Input loading for degree0.

Reads JSON job files, validates them per family and builds the exact objects
the classifiers consume. Also holds the built-in named examples.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .exactfield import FieldError
from .exactlinalg import LinalgError
from .hopf import HopfError, HopfParam
from .k3 import IntersectionForm, K3Error, PeriodPoint
from .torus import PeriodMatrixZ, TorusError

logger = logging.getLogger(__name__)

FAMILIES = ("torus", "hopf", "k3")


class InputError(Exception):
    """Raised when an input file or example cannot be turned into a job."""
    pass


EXAMPLES: Dict[str, Tuple[str, Dict[str, Any]]] = {
    "siegel": ("torus", {
        "radicands": [-1, 2, 3, 5, 7],
        "Z": [[{"-1,5": "1"}, {"-1,2": "1"}],
              [{"-1,7": "1"}, {"-1,3": "1"}]],
    }),
    "shafarevich": ("torus", {
        "radicands": [-1, 2],
        "Z": [[{"-1": "1"}, {"2": "1"}],
              [0, {"-1": "1"}]],
    }),
    "diag35": ("hopf", {"radicands": [], "t": [[3, 0], [0, 5]]}),
    "diag28": ("hopf", {"radicands": [], "t": [[2, 0], [0, 8]]}),
    "diag22": ("hopf", {"radicands": [], "t": [[2, 0], [0, 2]]}),
    "jordan2": ("hopf", {"radicands": [], "t": [[2, 1], [0, 2]]}),
    "k3-toy-certified": ("k3", {
        "form": "preset:U+U",
        "radicands": [2, 3],
        "lambda": [1, {"2": "1"}, {"3": "1"}, {"2,3": "-1/3"}],
    }),
    "k3-toy-bundles": ("k3", {
        "form": "preset:U+U",
        "radicands": [2],
        "lambda": [1, {"2": "1"}, {"2": "1"}, -1],
    }),
}


class InputValidator:
    """Validates job data before it is turned into exact objects."""

    REQUIRED_FIELDS = {
        "torus": ["Z"],
        "hopf": ["t"],
        "k3": ["form", "lambda"],
    }

    @classmethod
    def validate(cls, family: str, data: Any) -> Tuple[bool, List[str]]:
        """
        Validate job data for a family.

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        errors = []
        if family not in FAMILIES:
            return False, [f"Unknown family: {family}"]
        if not isinstance(data, dict):
            return False, ["Job must be a JSON object"]

        for field in cls.REQUIRED_FIELDS[family]:
            if field not in data:
                errors.append(f"Missing required field: {field}")

        radicands = data.get("radicands", [])
        if not isinstance(radicands, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in radicands):
            errors.append("Field 'radicands' must be a list of integers")

        if family == "torus" and "Z" in data and not cls._is_square(data["Z"], 2):
            errors.append("Field 'Z' must be a 2x2 matrix")
        if family == "hopf":
            if "t" in data and not cls._is_square(data["t"], 2):
                errors.append("Field 't' must be a 2x2 matrix")
            bound = data.get("height_bound")
            if bound is not None and (not isinstance(bound, int) or bound < 1):
                errors.append("Field 'height_bound' must be a positive integer")
        if family == "k3":
            form = data.get("form")
            if form is not None and not isinstance(form, (str, list)):
                errors.append("Field 'form' must be a preset name or an integer matrix")
            lam = data.get("lambda")
            if lam is not None and (not isinstance(lam, list) or not lam):
                errors.append("Field 'lambda' must be a nonempty list")

        return len(errors) == 0, errors

    @staticmethod
    def _is_square(matrix: Any, n: int) -> bool:
        return isinstance(matrix, list) and len(matrix) == n and all(
            isinstance(r, list) and len(r) == n for r in matrix
        )


def parse_radicands(text: Optional[str]) -> Tuple[int, ...]:
    """Parse '-1,2,3' into (-1, 2, 3)."""
    if text is None or not text.strip():
        return ()
    try:
        return tuple(int(part) for part in text.replace(" ", "").split(",") if part)
    except ValueError:
        raise InputError(f"Radicands must be comma-separated integers, got {text!r}")


def load_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    if not path.exists():
        raise InputError(f"Input file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"Invalid JSON in {path}: {e}")


def load_example(name: str, family: Optional[str] = None) -> Dict[str, Any]:
    if name not in EXAMPLES:
        raise InputError(f"Unknown example {name!r}; available: {', '.join(sorted(EXAMPLES))}")
    example_family, data = EXAMPLES[name]
    if family is not None and family != example_family:
        raise InputError(f"Example {name!r} is a {example_family} example, not {family}")
    return json.loads(json.dumps(data))


def load_job(family: str, input_path: Optional[str] = None, example: Optional[str] = None) -> Dict[str, Any]:
    """Read the job data from exactly one of a file or a named example."""
    if (input_path is None) == (example is None):
        raise InputError("Give exactly one of --input or --example")
    data = load_json(input_path) if input_path is not None else load_example(example, family)
    is_valid, errors = InputValidator.validate(family, data)
    if not is_valid:
        raise InputError("; ".join(errors))
    return data


def _build(builder, data: Dict[str, Any]):
    try:
        return builder(data)
    except (FieldError, LinalgError, ValueError, ZeroDivisionError, KeyError, TypeError) as e:
        raise InputError(f"Invalid input: {e}")


def parse_torus(data: Dict[str, Any]) -> PeriodMatrixZ:
    """Build Z without the moduli check; classification reports membership."""
    def build(d):
        try:
            return PeriodMatrixZ.from_json(d, validate=False)
        except TorusError as e:
            raise InputError(str(e))
    return _build(build, data)


def parse_hopf(data: Dict[str, Any]) -> HopfParam:
    def build(d):
        try:
            return HopfParam.from_json(d)
        except HopfError as e:
            raise InputError(str(e))
    return _build(build, data)


def parse_k3(data: Dict[str, Any], form_override: Optional[str] = None) -> Tuple[PeriodPoint, IntersectionForm]:
    def build(d):
        try:
            form = IntersectionForm.from_json(form_override or d["form"])
            lam = PeriodPoint.from_json(d)
        except K3Error as e:
            raise InputError(str(e))
        if lam.dim != form.dim:
            raise InputError(f"lambda has {lam.dim} coordinates but the form has rank {form.dim}")
        return lam, form
    return _build(build, data)
