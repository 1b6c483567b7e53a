import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import LinearRing

import oracles
from confeig.conformal import (
    ConformalMap,
    DomainFileError,
    PerturbSpec,
    boundary_trace,
    derivative_trace,
    injectivity_diagnostic,
    load_domain,
    perturb,
    save_domain,
)


def green_area(cmap, nodes=4096):
    # (1/2) closed integral of Im(conj(z) dz), trapezoid on the exact tangent
    bd = oracles.Boundary(cmap.r, cmap.coeffs, nodes)
    return 0.5 * np.sum(np.imag(np.conj(bd.z) * bd.dz)) * bd.h


small = st.floats(-0.12, 0.12)


@st.composite
def univalent_maps(draw):
    r = draw(st.floats(0.6, 1.8))
    L = draw(st.integers(1, 4))
    coeffs = [complex(draw(small), draw(small))]
    for n in range(1, L + 1):
        coeffs.append(complex(draw(small), draw(small)) * r ** (n + 1) / n)
    return ConformalMap(r, tuple(coeffs))


@settings(max_examples=40, deadline=None)
@given(univalent_maps())
def test_area_formula_matches_polygon_area(cmap):
    assert cmap.area() == pytest.approx(green_area(cmap), rel=1e-10)


def test_named_domains():
    assert ConformalMap.disk(2.0).area() == pytest.approx(4 * np.pi)
    assert ConformalMap.ellipse(0.2).area() == pytest.approx(np.pi * 1.2 * 0.8)
    h = ConformalMap.hourglass(1.0)
    assert h.degree == 3
    assert h.area() == pytest.approx(np.pi * (1 - 0.49 - 3 * 0.0625))


def test_traces_match_direct_evaluation():
    cmap = ConformalMap(1.3, (0.1j, 0.2, 0.0, -0.05))
    t = np.linspace(0, 2 * np.pi, 37)
    w = cmap.r * np.exp(1j * t)
    assert np.allclose(boundary_trace(cmap)(t), cmap(w), atol=1e-13)
    assert np.allclose(derivative_trace(cmap)(t), cmap.derivative(w), atol=1e-13)


def test_normalized_map_has_unit_radius_and_same_image():
    cmap = ConformalMap(1.7, (0.3, 0.4, -0.2))
    nm = cmap.normalized()
    t = np.linspace(0, 2 * np.pi, 11)
    assert nm.r == 1.0
    assert np.allclose(nm(np.exp(1j * t)) * cmap.r, cmap(cmap.r * np.exp(1j * t)))


def test_perturb_adds_single_coefficient():
    p = perturb(ConformalMap.ellipse(0.2), PerturbSpec(3, 0.01))
    assert p.coeffs == (0, 0.2, 0, 0.01)
    with pytest.raises(ValueError):
        PerturbSpec(0, 0.1)


@pytest.mark.parametrize("cmap", [ConformalMap.disk(), ConformalMap.ellipse(0.6), ConformalMap.hourglass(1.0)])
def test_injectivity_accepts_known_domains(cmap):
    assert injectivity_diagnostic(cmap)


def test_injectivity_rejects_reversed_orientation():
    # image of |w| = 1 is the reversed ellipse; the map is not univalent outside
    assert not injectivity_diagnostic(ConformalMap(1.0, (0, 2.0)))


def test_injectivity_rejects_self_crossing_boundary():
    cmap = ConformalMap(1.0, (0, 0, 0, 0.6))
    assert not LinearRing(np.c_[cmap(np.exp(2j * np.pi * np.arange(512) / 512)).real,
                                cmap(np.exp(2j * np.pi * np.arange(512) / 512)).imag]).is_simple
    assert not injectivity_diagnostic(cmap)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.6), st.integers(2, 5))
def test_injectivity_agrees_with_simple_ring_oracle(amp, L):
    cmap = ConformalMap(1.0, tuple([0] * L + [amp]))
    z = cmap(np.exp(2j * np.pi * np.arange(1024) / 1024))
    ring = LinearRing(np.c_[z.real, z.imag])
    # w + a w^{-L} is univalent exactly when L a < 1
    expect = L * amp < 1
    if abs(L * amp - 1) > 0.02:
        assert injectivity_diagnostic(cmap, 1024) == expect
        if not expect and amp * (L + 1) > 1.05:
            assert not ring.is_simple


def test_injectivity_needs_enough_nodes():
    with pytest.raises(ValueError):
        injectivity_diagnostic(ConformalMap.disk(), 16)


@pytest.mark.parametrize("suffix", [".json", ".toml"])
def test_domain_file_round_trip(tmp_path, suffix):
    cmap = ConformalMap(1.2, (0.1 + 0.2j, -0.3, 0.0, 0.05j))
    path = tmp_path / f"dom{suffix}"
    save_domain(cmap, path)
    back = load_domain(path)
    assert back == cmap
    assert back.fingerprint() == cmap.fingerprint()


def test_domain_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"r": -1, "coeffs": []}))
    with pytest.raises(DomainFileError):
        load_domain(bad)
    bad.write_text("{not json")
    with pytest.raises(DomainFileError):
        load_domain(bad)
    with pytest.raises(DomainFileError):
        load_domain(tmp_path / "missing.json")
    bad.write_text(json.dumps({"r": 1, "coeffs": [[1, 2, 3]]}))
    with pytest.raises(DomainFileError):
        load_domain(bad)
