"""
Helpers for the metric module: console summaries of comparability reports.
"""

from __future__ import annotations

ICON_RULER = "📏"
ICON_PAIR = "🔗"
ICON_WARN = "⚠️"


def _stats_str(stats: dict) -> str:
    return f"[{stats['min']:.4g}, {stats['max']:.4g}] spread {stats['spread']:.4g}"


def format_metric_summary(report: dict) -> str:
    lines = [f"{ICON_RULER} Comparability over {report['n_pairs']} pairs, weight {report['omega']}:"]
    lines.append(f"\t{ICON_PAIR} rho_F / rho_w: {_stats_str(report['rho_f_over_rho_w'])}")
    lines.append(f"\t{ICON_PAIR} d_w / rho_F: {_stats_str(report['d_w_over_rho_f'])}")
    lines.append(f"\t{ICON_PAIR} Empirical L: {report['L']:.6g}")
    lines.append(f"\t{ICON_RULER} Doubling quotient max: {report['doubling']['max']:.6g}")
    if report["unconverged"]:
        lines.append(f"\t{ICON_WARN} {report['unconverged']} pairs flagged by the optimizer")
    return "\n".join(lines)
