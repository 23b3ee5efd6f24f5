"""Report and snapshot writers."""

from .writers import (
    echo_config,
    summary_text,
    write_convergence,
    write_snapshot,
    write_structure,
    write_trajectory,
)

__all__ = [
    "echo_config",
    "summary_text",
    "write_convergence",
    "write_snapshot",
    "write_structure",
    "write_trajectory",
]
