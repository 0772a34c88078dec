import math

import numpy as np
import pytest

try:
    import wpmub
except ImportError:
    import _wpmub as wpmub


def test_bloch_anchor():
    r = wpmub.bloch_from_single_waveplate(0.0, 120.0)
    assert np.allclose(r, [0.0, 0.0, 1.0])
    t0 = math.degrees(0.25 * math.acos(-1.0 / 3.0))
    r = wpmub.bloch_from_single_waveplate(t0, 120.0)
    assert np.allclose(r, np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0))


def test_unitary_shape():
    u = wpmub.waveplate_unitary(22.5, 180.0)
    assert u.shape == (2, 2)
    assert np.allclose(u @ u.conj().T, np.eye(2))


def test_two_mub_angles():
    t1, t2 = wpmub.two_mub_angles(180.0)
    assert t1 == pytest.approx(11.25, abs=1e-9)
    assert (t2 - -11.25) % 180.0 == pytest.approx(0.0, abs=1e-9)


def test_solver_finds_canonical_family():
    fams = wpmub.solve_complete_mub(120.0, starts=120, seed=1)
    assert fams
    triples = []
    for fam in fams:
        triples.append(fam["base"]["thetas_deg"])
        triples.extend(t["thetas_deg"] for t in fam["images"])
    assert any(
        abs(t[0]) < 0.01 and abs(t[1] - 27.37) < 0.01 and abs(t[2] - 117.37) < 0.01
        for t in triples
    )


def test_budgets():
    b = wpmub.single_plate_mub_budget(120.0)
    assert b["phase"] == pytest.approx(4.0 / 3.0)
    assert b["axis"] == pytest.approx(32.0)
    q = wpmub.qwp_hwp_mub_budget()
    assert q["h"] == pytest.approx(48.0)
    assert q["q"] == pytest.approx(20.0)


def test_tomography_roundtrip():
    rho = wpmub.named_state("D", 0.9)
    est = wpmub.linear_inversion_single(rho, "twp", photons=2_000_000, seed=7)
    assert np.abs(est - rho).max() < 0.01
    proj = wpmub.project_to_physical(est)
    w = np.linalg.eigvalsh(proj)
    assert w.min() > -1e-12
    assert np.trace(proj).real == pytest.approx(1.0)
