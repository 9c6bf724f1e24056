"""Normalized difference image of two co-registered acquisitions.

Each output pixel is ``|a - b| / (a + b)``, which lies in [0, 1] and is
invariant to a common positive rescaling of both inputs. A pixel where
both inputs are zero maps to 0: two sensors agreeing on "nothing there"
is no evidence of change.
"""

from __future__ import annotations

import numpy as np

from .validation import check_image, check_same_shape


def difference_image(img1, img2) -> np.ndarray:
    """Pixelwise normalized absolute difference of two intensity grids."""
    a = check_image(img1, "img1")
    b = check_image(img2, "img2")
    check_same_shape(a, b, "difference_image inputs")
    num = np.abs(a - b)
    den = a + b
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def quantize(diff, levels: int = 256) -> np.ndarray:
    """Map a [0, 1] difference image to integer grey levels 0..levels-1.

    ``levels=256`` reproduces the usual 8-bit grey-level image; rounding
    is IEEE round-half-to-even.
    """
    d = check_image(diff, "diff")
    if d.size and d.max() > 1.0:
        raise ValueError("quantize expects values in [0, 1]")
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    return np.rint(d * (levels - 1))
