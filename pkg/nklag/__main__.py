import sys

from rich.traceback import install as traceback_install

from .cli import dispatch

# Install rich traceback handler for a better traceback experience
traceback_install(show_locals=False)

sys.exit(dispatch())
