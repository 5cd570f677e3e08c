"""
Subcommands of the heisenqc driver and the rows of its help screen.

main.py maps argv to these enums and registers one handler per member.
"""

from enum import Enum
from dataclasses import dataclass


class Command:
    """
    Namespace for all CLI commands organized by category.

    Usage:
        Command.Experiments.FLOW
        Command.General.HELP
    """

    class Experiments(str, Enum):
        """Commands that compute and write reports."""
        VERIFY = "verify"
        FLOW = "flow"
        POTENTIAL = "potential"
        CONSTRUCT = "construct"
        ITERATE = "iterate"
        METRIC = "metric"

    class General(str, Enum):
        """General commands."""
        HELP = "help"


@dataclass
class CommandHelp:
    """Command help information including outputs and description."""
    outputs: str
    description: str

    def format(self, command_name: str, width: int = 40) -> str:
        """Format command help for display."""
        cmd_with_outputs = f"{command_name} {self.outputs}".strip()
        return f"  {cmd_with_outputs:.<{width}} {self.description}"


COMMAND_HELP = {
    Command.Experiments.VERIFY: CommandHelp(
        outputs="[--filter NAME]",
        description="Run the invariant suite → verify_report.json"
    ),
    Command.Experiments.FLOW: CommandHelp(
        outputs="",
        description="Flow of a catalogue potential → flow_report.json, trajectory.csv"
    ),
    Command.Experiments.POTENTIAL: CommandHelp(
        outputs="",
        description="Log potential of a measure → potential_report.json, potential_values.csv"
    ),
    Command.Experiments.CONSTRUCT: CommandHelp(
        outputs="",
        description="Potential built from a map and a density → construct_report.json"
    ),
    Command.Experiments.ITERATE: CommandHelp(
        outputs="",
        description="Iterative composition scheme → iterate_report.json, iterate_ratios.csv"
    ),
    Command.Experiments.METRIC: CommandHelp(
        outputs="",
        description="Distance comparability suite → metric_report.json, comparability.csv"
    ),
    Command.General.HELP: CommandHelp(
        outputs="",
        description="Show this help message"
    ),
}