"""Bayesian model calibration with embedded model-form uncertainty.

Thin wrapper over the compiled module; see the repository README for the
full command-line interface and file formats.
"""

try:
    from ._embcal import *  # noqa: F401,F403  (installed package layout)
    from ._embcal import __doc__ as _doc
except ImportError:  # in-tree test layout: extension next to the package
    from _embcal import *  # noqa: F401,F403
    from _embcal import __doc__ as _doc

__doc__ = _doc or __doc__
