import math

import numpy as np
import pytest

from devband import BandParams, assemble, max_diameter, sample_midline

L = 3.0
D = 0.3
B = 0.1


@pytest.fixture(scope="session")
def band600():
    return assemble(BandParams(l=L, d=D, b=B, n=600))


@pytest.fixture(scope="session")
def curve600(band600):
    return sample_midline(band600, 600)


@pytest.fixture(scope="session")
def narrow_band():
    """Zero-width band at the critical diameter: the narrow-limit case."""
    return assemble(BandParams(l=L, d=max_diameter(L), b=0.0, n=600))


@pytest.fixture(scope="session")
def narrow_curve(narrow_band):
    return sample_midline(narrow_band, 600)


@pytest.fixture(scope="session")
def moebius_points(narrow_curve):
    return narrow_curve.points


def circle_points(n=60, r=1.0):
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return np.column_stack([r * np.cos(th), r * np.sin(th), np.zeros(n)])


def oracle_line_energy(P, eps, tol=1e-5):
    """Independent scalar reimplementation of the gated discrete line energy
    used by the optimizer, kept in the tests as a gradient oracle."""
    e = np.roll(P, -1, axis=0) - P
    el = np.linalg.norm(e, axis=1)
    t = e / el[:, None]
    tp = np.roll(t, 1, axis=0)
    cr = np.cross(tp, t)
    crn = np.linalg.norm(cr, axis=1)
    theta = np.arctan2(crn, np.einsum("ij,ij->i", tp, t))
    defined = theta >= tol
    b = np.zeros_like(cr)
    b[defined] = cr[defined] / crn[defined, None]
    m = 0.5 * (np.roll(el, 1) + el)
    K = np.where(defined, theta / m, 0.0)
    bn = np.roll(b, -1, axis=0)
    sind = np.einsum("ij,ij->i", t, np.cross(b, bn))
    cosd = np.einsum("ij,ij->i", b, bn)
    W = np.where(defined & np.roll(defined, -1),
                 np.arctan2(sind, cosd) / el, 0.0)
    dens = (K * K + W * W) ** 2 / (K * K + eps * eps)
    return float((dens * m).sum())
