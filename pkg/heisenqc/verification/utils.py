"""
Helpers for the verification module.

Formats check results as icon-prefixed lines, one block per group.
"""

from __future__ import annotations

from itertools import groupby
from typing import Iterable

from .suites import CheckResult

ICON_PASS = "✅"
ICON_FAIL = "❌"
ICON_GROUP = "🧪"


def format_check(result: CheckResult) -> str:
    icon = ICON_PASS if result.passed else ICON_FAIL
    return f"\t{icon} {result.name}: {result.value:.3g} (tolerance {result.tolerance:.3g})"


def format_results(results: Iterable[CheckResult]) -> str:
    """
    Build a multi-line summary grouped by suite, for example:

    🧪 group: 5/5 passed
    	✅ associativity: 1.1e-16 (tolerance 1e-10)
    """
    blocks = []
    for group, items in groupby(results, key=lambda r: r.group):
        items = list(items)
        passed = sum(r.passed for r in items)
        lines = [f"{ICON_GROUP} {group}: {passed}/{len(items)} passed"]
        lines.extend(format_check(r) for r in items)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)
