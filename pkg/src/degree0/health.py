"""
Health checks for degree0.

Verifies the configured limits and the numeric backends before a command
runs, and that an output location can be written.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple

from .config import Config, settings

logger = logging.getLogger(__name__)

# (property, minimum, maximum)
SETTING_RANGES = [
    ("precision_bits", 16, 1 << 16),
    ("max_radicands", 1, 16),
    ("sample_retries", 1, 10**7),
    ("workers", 1, 256),
    ("hopf_bound", 1, 10**4),
]


def check_settings(config: Optional[Config] = None) -> List[str]:
    """
    Check that every numeric setting parses and lies in its range.

    Returns:
        List of setting issues
    """
    config = config or settings()
    issues = []
    for name, low, high in SETTING_RANGES:
        try:
            value = getattr(config, name)
        except ValueError as e:
            issues.append(str(e))
            logger.warning(f"Malformed setting {name}: {e}")
            continue
        if not low <= value <= high:
            issues.append(f"Setting {name}={value} outside [{low}, {high}]")
            logger.warning(f"Setting {name}={value} outside [{low}, {high}]")
    return issues


def check_numeric_backends() -> List[str]:
    """
    Check that interval arithmetic and integer factorisation are usable.

    Returns:
        List of backend issues
    """
    issues = []
    try:
        from mpmath import iv
        if 2 not in iv.sqrt(2) ** 2:
            issues.append("mpmath interval arithmetic gave an enclosure of sqrt(2)**2 that misses 2")
    except Exception as e:
        issues.append(f"mpmath interval arithmetic unavailable: {e}")
        logger.error(f"mpmath check failed: {e}")
    try:
        from sympy import factorint
        if factorint(12) != {2: 2, 3: 1}:
            issues.append("sympy factorint returned a wrong factorisation")
    except Exception as e:
        issues.append(f"sympy factorisation unavailable: {e}")
        logger.error(f"sympy check failed: {e}")
    return issues


def check_output_path(output: Optional[str]) -> List[str]:
    """
    Check that the directory receiving `output` exists or can be created, and is writable.

    Returns:
        List of permission issues
    """
    if output is None:
        return []
    issues = []
    directory = Path(output).parent
    try:
        directory.mkdir(parents=True, exist_ok=True)
        marker = directory / ".degree0_health_check"
        marker.touch()
        marker.unlink()
    except (PermissionError, OSError) as e:
        issues.append(f"Cannot write to {directory}: {e}")
        logger.warning(f"Permission issue: {e}")
    return issues


def run_health_check(output: Optional[str] = None, config: Optional[Config] = None) -> Tuple[bool, List[str]]:
    """
    Run all health checks.

    Returns:
        Tuple of (success, list of issues)
    """
    logger.debug("Running pre-run health checks")

    all_issues = []
    for label, check in (
        ("Settings", lambda: check_settings(config)),
        ("Backend", check_numeric_backends),
        ("Output", lambda: check_output_path(output)),
    ):
        try:
            all_issues.extend(check())
        except Exception as e:
            all_issues.append(f"{label} check failed: {e}")
            logger.error(f"{label} check failed: {e}")

    success = len(all_issues) == 0

    if success:
        logger.debug("All health checks passed")
    else:
        logger.error(f"Health checks failed with {len(all_issues)} issues")
        for issue in all_issues:
            logger.error(f"  - {issue}")

    return success, all_issues
