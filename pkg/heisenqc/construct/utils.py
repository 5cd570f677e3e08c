"""
Helpers for the construct module: console summaries of construction reports.
"""

from __future__ import annotations

ICON_BUILD = "🏗️"
ICON_ORIGIN = "📍"
ICON_GAP = "📏"
ICON_GROWTH = "📈"


def format_construct_summary(report: dict) -> str:
    c1, c2, c3 = report["potential"]["c"]
    lines = [f"{ICON_BUILD} Potential over {report['potential']['poles']} poles (mass {report['psi_mass']:.6g}):"]
    lines.append(f"\t{ICON_ORIGIN} Correction c: ({c1:.6g}, {c2:.6g}, {c3:.6g})")
    lines.append(f"\t{ICON_ORIGIN} |v(0)|: {report['field_at_origin_norm']:.3g}")
    lines.append(f"\t{ICON_GAP} sup |zeta| on B({report['zeta']['radius']:g}): {report['zeta']['sup']:.6g}")
    growth = report["growth_constants"]
    lines.append(f"\t{ICON_GROWTH} Growth constants: C_phi={growth['phi']:.4g}, C_Z={growth['z']:.4g}")
    lines.append(f"\t{ICON_GROWTH} Strain budget c: {report['strain']['c']:.6g}")
    lines.append(f"\t{ICON_GAP} lambda spread: {report['lambda']['spread']:.4g}")
    return "\n".join(lines)
