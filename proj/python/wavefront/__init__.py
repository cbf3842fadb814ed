"""Semi-wavefronts of scalar convolution equations.

Models are given as dicts (or JSON files) in the same format as the
``wavefront`` command-line tool.
"""

import json
import os

import numpy as np

from . import _wavefront
from ._wavefront import Model, WavefrontError

__all__ = [
    "Model",
    "Profile",
    "WavefrontError",
    "analyze",
    "chi",
    "load_model",
    "min_speed",
    "model",
    "scan",
    "solve",
    "uniqueness_speed",
    "verify",
]

__version__ = _wavefront.version()


def model(spec, base_dir=""):
    """Build a Model from a dict."""
    return Model.from_json(json.dumps(spec), str(base_dir))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return Model.from_json(text, os.path.dirname(os.path.abspath(path)))


def _as_model(m):
    return m if isinstance(m, Model) else model(m)


def chi(m, z, c=None):
    return _wavefront.chi(_as_model(m), complex(z), c)


def analyze(m, c=None):
    """Real zeros of chi and strip data as a dict."""
    return json.loads(_wavefront.analyze(_as_model(m), c))


def min_speed(m):
    """(c_star, z_star)."""
    return _wavefront.min_speed(_as_model(m))


def uniqueness_speed(m):
    return _wavefront.uniqueness_speed(_as_model(m))


class Profile:
    """Solved profile: grid ``t``, values ``phi`` and solver metadata."""

    def __init__(self, t, phi, meta):
        self.t = t
        self.phi = phi
        self.meta = meta

    @property
    def plateau(self):
        return self.meta["plateau"]

    @property
    def converged(self):
        return self.meta["convergence"]["converged"]

    @property
    def decay_fit(self):
        return self.meta.get("decay_fit")

    def crossing(self, level):
        i = int(np.argmax(self.phi >= level))
        if self.phi[i] < level:
            return None
        if i == 0:
            return float(self.t[0])
        t0, t1, v0, v1 = self.t[i - 1], self.t[i], self.phi[i - 1], self.phi[i]
        return float(t0 + (level - v0) * (t1 - t0) / (v1 - v0))

    def __repr__(self):
        return f"<wavefront.Profile n={len(self.t)} plateau={self.plateau:.6g} converged={self.converged}>"


def solve(m, c=None, grid=(-60.0, 40.0, 4096), tol=1e-10, max_iter=200000, damping=0.5):
    t, phi, meta = _wavefront.solve(_as_model(m), c, tuple(grid), tol, max_iter, damping)
    return Profile(t, phi, json.loads(meta))


def verify(m, c=None, grid=(-60.0, 40.0, 4096), probe_tol=1e-3, shifts=(0.0, 2.5)):
    return json.loads(_wavefront.verify(_as_model(m), c, tuple(grid), probe_tol, list(shifts)))


def scan(m, c=None, y_max=50.0, nx=201, ny=2001):
    return json.loads(_wavefront.scan(_as_model(m), c, y_max, nx, ny))
