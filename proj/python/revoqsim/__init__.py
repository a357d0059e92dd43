"""Python surface of the revoqsim C++ core.

Everything of substance lives in the compiled extension; this package
re-exports it. The extension sits inside the package for wheel installs and
on sys.path for in-tree CMake builds.
"""

try:
    from ._revoqsim import *  # noqa: F401,F403
    from ._revoqsim import __version__  # noqa: F401
except ImportError:
    from _revoqsim import *  # noqa: F401,F403
    from _revoqsim import __version__  # noqa: F401
