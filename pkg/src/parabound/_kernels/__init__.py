"""Kernel backend selection.

The compiled extension is preferred when it imports; the numpy fallback
is used otherwise.  Setting PARABOUND_PURE=1 in the environment forces
the fallback (useful for benchmarking and debugging).
"""

import os

from . import _pure as pure

if os.environ.get("PARABOUND_PURE", "") not in ("", "0"):
    impl = pure
else:
    try:
        from . import _fast as impl  # type: ignore[no-redef]
    except ImportError:
        impl = pure

BACKEND = impl.BACKEND

flux_faces_1d = impl.flux_faces_1d
dflux_faces_1d = impl.dflux_faces_1d
diffusivity_faces_1d = impl.diffusivity_faces_1d
tridiag_solve = impl.tridiag_solve
flux_faces_2d = impl.flux_faces_2d
newton_faces_2d = impl.newton_faces_2d
diffusivity_faces_2d = impl.diffusivity_faces_2d
trunc_pow_sum = impl.trunc_pow_sum
masked_max = impl.masked_max
