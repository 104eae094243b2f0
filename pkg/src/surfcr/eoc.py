"""Experimental orders of convergence."""
import numpy as np


def eoc(errors, h):
    """Observed orders log(e_k/e_{k+1}) / log(h_k/h_{k+1}) between consecutive levels."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(h, dtype=float)
    if e.shape != h.shape:
        raise ValueError("errors and mesh sizes must have the same length")
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(e[:-1] / e[1:]) / np.log(h[:-1] / h[1:])
