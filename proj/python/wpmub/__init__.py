"""Wave-plate MUB toolkit: which mutually unbiased bases a single wave plate realizes."""

try:
    from ._wpmub import *  # noqa: F401,F403
except ImportError:  # extension built out-of-tree (e.g. straight CMake build)
    from _wpmub import *  # noqa: F401,F403
