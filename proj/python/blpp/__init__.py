"""Brownian last passage percolation in scaled polymer coordinates.

The heavy lifting lives in the C++ extension ``blpp._core``; this package
re-exports its surface. Build the extension with scikit-build-core
(``pip install .``) or point PYTHONPATH at a CMake build tree.
"""

try:
    from blpp._core import *  # noqa: F401,F403
    from blpp._core import __version__  # noqa: F401
except ImportError:  # pragma: no cover - dev layout with the module beside us
    from _core import *  # type: ignore # noqa: F401,F403
    from _core import __version__  # type: ignore # noqa: F401
