"""
Helpers for the flow module: console summaries of flow reports.
"""

from __future__ import annotations

ICON_FLOW = "🌀"
ICON_TARGET = "🎯"
ICON_SCALE = "⚖️"
ICON_STRAIN = "📐"


def _point_str(point) -> str:
    return "(" + ", ".join(f"{c:.6g}" for c in point) + ")"


def format_flow_summary(report: dict) -> str:
    lines = [f"{ICON_FLOW} Flow of {report['potential']} for time {report['time']:g} ({report['steps']} steps):"]
    lines.append(f"\t{ICON_TARGET} Endpoint: {_point_str(report['endpoint'])}")
    lines.append(f"\t{ICON_TARGET} RK4 error estimate: {report['integration_error']:.3g}")
    jac = report["jacobian"]
    lines.append(f"\t{ICON_SCALE} Jacobian routes spread: {jac['spread']:.3g}")
    if "spread_with_volume" in jac:
        lines.append(f"\t{ICON_SCALE} With volume route: {jac['spread_with_volume']:.3g}")
    dil = report["dilatation"]
    lines.append(f"\t{ICON_STRAIN} Strain budget c: {report['strain']['c']:.6g}")
    lines.append(f"\t{ICON_STRAIN} Dilatation: {dil['analytic_max']:.6g} (bound {dil['bound']:.6g})")
    return "\n".join(lines)
