"""News classification pipeline: preprocessing, sparse and dense features,
collapsed-Gibbs LDA auto-labelling, classical classifiers and single/multi
label metrics. The heavy lifting lives in the C++ extension `_core`."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__doc__ = _core_doc
__version__ = "0.1.0"
