"""
Subcommands of the command-line interface.
"""

from .cluster import cmd_cluster
from .diagnose import cmd_diagnose
from .fit import cmd_fit
from .run import cmd_run
from .simulate import cmd_simulate

COMMANDS = {
    'cluster': cmd_cluster,
    'fit': cmd_fit,
    'simulate': cmd_simulate,
    'diagnose': cmd_diagnose,
    'run': cmd_run,
}

__all__ = ['COMMANDS', 'cmd_cluster', 'cmd_diagnose', 'cmd_fit', 'cmd_run', 'cmd_simulate']
