"""
Helpers for the potential module: console summaries of potential reports.
"""

from __future__ import annotations

ICON_MEASURE = "🧮"
ICON_CHECK = "✅"
ICON_WARN = "⚠️"
ICON_LADDER = "🪜"


def _ladder_str(ladder, errors) -> str:
    return "; ".join(f"{k:g}: {e:.3g}" for k, e in zip(ladder, errors))


def format_potential_summary(report: dict) -> str:
    adm = report["admissibility"]
    icon = ICON_CHECK if adm["admissible"] else ICON_WARN
    values = report["values"]
    lines = [f"{ICON_MEASURE} Log potential on {report['grid']['points']} points of B({report['grid']['radius']:g}):"]
    lines.append(f"\t{icon} Admissible: {adm['admissible']} (total variation {adm['total_variation']:.6g})")
    if values["min"] is not None:
        lines.append(f"\t{ICON_MEASURE} Range: [{values['min']:.6g}, {values['max']:.6g}], {values['at_atom']} at atoms")
    reg, res = report["regularization"], report["restriction"]
    lines.append(f"\t{ICON_LADDER} Smoothing errors: {_ladder_str(reg['ladder'], reg['errors'])}")
    lines.append(f"\t{ICON_LADDER} Restriction errors: {_ladder_str(res['ladder'], res['errors'])}")
    return "\n".join(lines)
