import json
import math

import numpy as np
import pytest

import nodalcover as nc


def test_cycle_double_cover():
    c12 = nc.make_surface("cycle", [12])
    assert c12.vertex_count == 12
    cover = nc.unstable_cover(c12, eigen=1, domain=0, degree=2)
    assert cover.degree == 2 and cover.connected
    assert cover.total.vertex_count == 24
    report = nc.verdict(c12, cover, eigen=1)
    assert report["verdict"] == "strictly-unstable"
    assert report["base"]["open"] == 1
    assert report["cover"]["open"] == 3


def test_spectrum_matches_closed_form():
    s = nc.spectrum(nc.make_surface("cycle", [10]), m=10, dense=True)
    expect = sorted(2 - 2 * math.cos(2 * math.pi * k / 10) for k in range(10))
    assert np.allclose(s["values"], expect, atol=1e-9)


def test_nodal_domains_of_eigenvector():
    torus = nc.make_surface("grid_torus", [8, 8])
    values, vectors = nc.eigenpairs(torus, m=4)
    assert vectors.shape == (64, 4)
    phi = np.array([math.cos(2 * math.pi * (x + 0.5) / 8) for y in range(8) for x in range(8)])
    d = nc.nodal_domains(torus, phi)
    assert len(d["domains"]) == 2


def test_complex_json_round_trip():
    g2 = nc.make_surface("genus_g_polygon", [2, 3])
    back = nc.complex_from_json(g2.to_json())
    assert back.euler_characteristic == g2.euler_characteristic == -2


def test_group_helpers():
    assert nc.count_subgroups("free", 2, 3) == 13
    assert nc.count_subgroups("surface", 2, 2) == 15
    assert nc.abelian_mu([2, 4, 6]) == 3
    assert nc.respec(30, 4)["pass"]


def test_errors_raise():
    with pytest.raises(nc.NodalcoverError):
        nc.make_surface("sphere", [1])


def test_cli_in_process(tmp_path):
    out = tmp_path / "c.json"
    code, _, _ = nc.cli("surface", "make", "--kind", "cycle", "--params", "6", "-o", out)
    assert code == 0
    code, text, _ = nc.cli("surface", "info", "--input", out)
    assert code == 0 and json.loads(text)["vertices"] == 6
    assert nc.cli("bogus")[0] == 2
