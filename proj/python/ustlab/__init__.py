"""Exact uniform-spanning-tree statistics: transfer currents, degree
PMFs, joint cumulants, lattice constants, and samplers."""

try:
    from ._ustlab import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    from _ustlab import *  # noqa: F401,F403  (in-tree build directory)
