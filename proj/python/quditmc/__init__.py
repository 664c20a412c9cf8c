"""Monte Carlo estimation of average gate fidelity for prime-level qudits.

Thin wrapper re-exporting the compiled extension module.
"""
from _quditmc import *  # noqa: F401,F403
from _quditmc import __doc__  # noqa: F401
