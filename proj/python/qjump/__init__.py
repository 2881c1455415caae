"""Quantum-trajectory simulator for a damped optical cavity.

The compiled extension carries the full API; this package re-exports it so
both the installed wheel (qjump._qjump) and a build-tree module on
PYTHONPATH work.
"""

try:
    from ._qjump import *  # noqa: F401,F403
    from ._qjump import __doc__ as _ext_doc  # noqa: F401
except ImportError:  # build-tree layout: _qjump.so next to the package
    from _qjump import *  # noqa: F401,F403
