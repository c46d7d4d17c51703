import numpy as np
import pytest

from whquant import fft_grid, make_weight


@pytest.fixture(scope="session")
def grid256():
    return fft_grid(256, 0.125)


@pytest.fixture(scope="session")
def weights():
    return {
        "ww": make_weight("weyl_wigner"),
        "cs": make_weight("coherent_state"),
        "gauss": make_weight("gaussian", sigma_l=1.0, sigma_p=1.5),
        "shifted": make_weight("separable", lam="exp(-(q-0.5)^2/2)", mu="exp(-p^2/2)"),
        "bj": make_weight("born_jordan"),
    }


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))
