"""Spectral instability under finite covers of discrete surfaces."""

import json

from ._nodalcover import (
    Complex,
    Cover,
    NodalcoverError,
    abelian_mu,
    complex_from_json,
    count_subgroups,
    cyclic_cover,
    eigenpairs,
    load_complex,
    load_cover,
    make_surface,
    unstable_cover,
)
from . import _nodalcover as _core

__all__ = [
    "Complex",
    "Cover",
    "NodalcoverError",
    "abelian_mu",
    "complex_from_json",
    "count_subgroups",
    "cyclic_cover",
    "eigenpairs",
    "load_complex",
    "load_cover",
    "make_surface",
    "unstable_cover",
    "spectrum",
    "nodal_domains",
    "verdict",
    "respec",
    "cli",
]


def spectrum(complex_, m=6, kind="graph", dense=False, tol=1e-10, seed=7):
    return json.loads(_core.spectrum_json(complex_, m, kind, dense, tol, seed))


def nodal_domains(complex_, vector, zero_eps=1e-8):
    return json.loads(_core.nodal_json(complex_, vector, zero_eps))


def verdict(base, cover, eigen=1, margin=1e-8):
    return json.loads(_core.verdict_json(base, cover, eigen, margin))


def respec(n=50, seed=1):
    return json.loads(_core.respec_json(n, seed))


def cli(*args):
    """Run the command-line tool in-process; returns (exit code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
