"""Pure-numpy banded-convolution kernel (fallback backend)."""

import numpy as np


def convolve_banded(psi: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """out[i] = sum_j kernel[half + i - j] * psi[j], truncated at the edges.

    Same contract as the compiled backend: kernel has odd length 2*half + 1
    indexed by the offset i - j; out-of-ladder contributions are dropped.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    kernel = np.asarray(kernel, dtype=np.complex128)
    if kernel.ndim != 1 or psi.ndim != 1:
        raise ValueError("psi and kernel must be one-dimensional")
    if kernel.size % 2 != 1:
        raise ValueError("kernel length must be odd")
    half = kernel.size // 2
    return np.convolve(psi, kernel)[half:half + psi.size]
