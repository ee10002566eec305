"""Backend selection for the simulation kernels.

Prefers the compiled extension (leakmeter._speedups); falls back to the
pure-Python twin when the extension was not built. Set LEAKMETER_PURE_PYTHON=1
to force the fallback, e.g. for the backend parity tests or the benchmark.
Both backends produce byte-identical output for equal arguments.
"""

import os

if os.environ.get("LEAKMETER_PURE_PYTHON"):
    from . import _pykernels as _impl

    BACKEND = "pure-python"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "pure-python"

dc_kernel = _impl.dc_kernel
crowds_kernel = _impl.crowds_kernel
