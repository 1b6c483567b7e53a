import math

import numpy as np
import pytest

from confeig.audit import J01, P1, audit_spectra, expand_multiplicities, normalize_area, polya_frequency
from confeig.bessel import disk_eigenvalues


def _disk_lists(count):
    d = [(e.lam, e.multiplicity) for e in disk_eigenvalues("dirichlet", count)]
    n = [(e.lam, e.multiplicity) for e in disk_eigenvalues("neumann", count + 1) if e.omega > 0]
    return d, n


def test_disk_spectra_pass_everything():
    d, n = _disk_lists(12)
    lines = audit_spectra(math.pi, d, n)
    assert all(line.passed for line in lines)
    fk = next(line for line in lines if line.check == "faber-krahn")
    sw = next(line for line in lines if line.check == "szego-weinberger")
    # both are equalities on the disk
    assert fk.lhs == pytest.approx(fk.rhs, rel=1e-14)
    assert sw.lhs == pytest.approx(sw.rhs, rel=1e-14)


def test_violations_are_reported():
    lines = audit_spectra(math.pi, dirichlet=[J01**2 * 0.99], neumann=[P1**2 * 1.01, 100.0])
    failed = {(line.check, line.k) for line in lines if not line.passed}
    assert failed == {("faber-krahn", None), ("szego-weinberger", None), ("polya", 2)}
    assert all(line.format().startswith(("PASS", "FAIL")) for line in lines)
    lines = audit_spectra(math.pi, dirichlet=[6.0, 14.0], neumann=[3.3, 14.5])
    failed = {(line.check, line.k) for line in lines if not line.passed}
    assert failed == {("friedlander", 2), ("polya", 2)}


def test_rtol_loosens_comparisons():
    assert audit_spectra(math.pi, dirichlet=[J01**2 * (1 - 1e-9)])[0].passed
    assert not audit_spectra(math.pi, dirichlet=[J01**2 * (1 - 1e-9)], rtol=0)[0].passed
    assert not audit_spectra(math.pi, dirichlet=[J01**2 * (1 - 1e-5)])[0].passed


def test_multiplicities_expand():
    assert expand_multiplicities([3.0, (1.0, 2)]) == [1.0, 1.0, 3.0]
    lines = audit_spectra(1.0, neumann=[(2.0, 2)])
    assert [line.k for line in lines if line.check == "polya"] == [1, 2]


def test_input_validation():
    with pytest.raises(ValueError):
        audit_spectra(0.0, [1.0])
    with pytest.raises(ValueError):
        audit_spectra(1.0)
    with pytest.raises(ValueError):
        normalize_area([1.0], -1.0)


def test_area_normalization():
    assert normalize_area([2.0, 4.0], 0.25).tolist() == [1.0, 2.0]
    assert normalize_area([1.0], 2 * np.pi, np.pi)[0] == pytest.approx(math.sqrt(2))
    assert polya_frequency(1, math.pi) == pytest.approx(2.0)
