"""Exact simulation and numerical certification of bifractional Brownian motion."""

try:
    from ._bifbm import *  # noqa: F401,F403  (installed wheel layout)
    from ._bifbm import __version__, SCHEMA_VERSION  # noqa: F401
except ImportError:  # build-tree layout: extension sits next to the package
    from _bifbm import *  # noqa: F401,F403
    from _bifbm import __version__, SCHEMA_VERSION  # noqa: F401
