"""Anisotropic minimal graph toolkit."""

try:
    from ._amg import *  # noqa: F401,F403
    from ._amg import __version__  # noqa: F401
except ImportError:  # running against a bare build tree
    from _amg import *  # noqa: F401,F403
    from _amg import __version__  # noqa: F401
