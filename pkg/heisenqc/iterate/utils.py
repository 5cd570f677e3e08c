"""
Helpers for the iterate module: console summaries of iteration reports.
"""

from __future__ import annotations

import numpy as np

from .scheme import IterationReport

ICON_LOOP = "🔁"
ICON_STEP = "👣"
ICON_SPREAD = "📊"


def format_iteration_summary(report: IterationReport) -> str:
    """
    Example output:

    🔁 Iteration m=2 (2 steps):
    	👣 Step 1: r=1.02, K=1.01
    	📊 Spread: 1.07, exp(-c_m)=0.92
    """
    lines = [f"{ICON_LOOP} Iteration m={report.m} ({report.completed_steps} steps):"]
    for j, (r, K) in enumerate(zip(report.radii, report.K_steps), start=1):
        lines.append(f"\t{ICON_STEP} Step {j}: r={r:.6g}, K={K:.6g}")
    lines.append(f"\t{ICON_SPREAD} Spread: {report.spread:.6g}, exp(-c_m)={float(np.exp(-report.c_m)):.6g}")
    return "\n".join(lines)
