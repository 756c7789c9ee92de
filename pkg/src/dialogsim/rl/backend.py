"""Selects the compiled kernel module when available, numpy otherwise.

DIALOGSIM_FORCE_NUMPY=1 pins the fallback (used by the backend benchmark and
for debugging numerical differences).
"""

import os

if os.environ.get("DIALOGSIM_FORCE_NUMPY"):
    from . import _qnet_np as kernels
else:
    try:
        from . import _qnetc as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _qnet_np as kernels

BACKEND = kernels.NAME
forward = kernels.forward
loss_and_grads = kernels.loss_and_grads
