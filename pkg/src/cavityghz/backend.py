"""Kernel backend selection.

The compiled Cython kernels are preferred when the extension was built;
otherwise the pure-numpy fallback is used.  Set ``CAVITYGHZ_KERNELS`` to
``compiled`` or ``python`` to force one side (useful for the benchmark and for
debugging).
"""

import os

_choice = os.environ.get("CAVITYGHZ_KERNELS", "auto").strip().lower()

if _choice in ("", "auto"):
    try:
        from . import _kernels as kernels

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels

        KERNEL_BACKEND = "python"
elif _choice == "compiled":
    from . import _kernels as kernels

    KERNEL_BACKEND = "compiled"
elif _choice == "python":
    from . import _kernels_py as kernels

    KERNEL_BACKEND = "python"
else:
    raise ImportError(
        f"CAVITYGHZ_KERNELS must be 'auto', 'compiled' or 'python', got {_choice!r}"
    )


def backend_name() -> str:
    """Name of the kernel implementation selected at import time."""
    return KERNEL_BACKEND
