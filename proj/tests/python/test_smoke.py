import cmath
import json
import math

import pytest

import tcethermo as tc

LOG2 = math.log(2.0)
ROOT = cmath.exp(2j * math.pi / 3)


def z2():
    return tc.RationalMap.polynomial([0, 0, 1])


def test_map_basics():
    t = z2()
    assert t.degree == 2
    assert t(2.0) == 4.0
    assert t(None) is None
    pre = t.preimages(1.0)
    assert sorted(p[0].real for p in pre) == pytest.approx([-1.0, 1.0])
    with pytest.raises(ValueError):
        tc.RationalMap.polynomial([1, 2])


def test_pressure_closed_forms():
    t = z2()
    assert tc.pressure_tree(t, tc.Observable.constant(0.0), ROOT, 10) == pytest.approx(LOG2, abs=1e-12)
    assert tc.pressure_tree(t, tc.Observable.neg_t_log_deriv(1.0), ROOT, 10) == pytest.approx(0.0, abs=1e-12)
    assert tc.log_eigenvalue(t, tc.Observable.constant(0.3), ROOT, 12) == pytest.approx(LOG2 + 0.3, abs=1e-12)


def test_conformal_atoms():
    atoms, weights = tc.conformal_atoms(z2(), tc.Observable.constant(0.0), ROOT, 6)
    assert len(atoms) == 64
    assert sum(weights) == pytest.approx(1.0)
    assert all(abs(abs(z) - 1.0) < 1e-12 for z in atoms)


def test_bridge_and_exact_tail():
    assert tc.itinerary(-1j, 3) == 0b110
    exact = math.log(60460 / 2**20) / 20
    assert tc.sft_exact_tail(0.0, 0.0, 20, 0.7) == pytest.approx(exact, abs=1e-12)
    tail = tc.preimage_tail(z2(), tc.Observable.constant(0.0), tc.Observable.symbol_frequency(), ROOT, 12, 0.75)
    assert tail == pytest.approx(tc.sft_exact_tail(0.0, 0.0, 12, 0.75), abs=1e-12)


def test_rate_function_of_symbol_frequency():
    q = [k * 0.05 for k in range(-120, 121)]
    p = tc.pressure_curve(z2(), tc.Observable.constant(0.0), tc.Observable.symbol_frequency(), q, ROOT, 12)
    s = [0.2, 0.5, 0.8]
    rate = tc.rate_function(q, p, s)
    for si, ri in zip(s, rate):
        assert ri == pytest.approx(LOG2 + si * math.log(si) + (1 - si) * math.log(1 - si), abs=2e-3)


def test_sft():
    import numpy as np

    golden = tc.WeightedSft(np.array([[1, 1], [1, 0]], dtype=np.int32), np.zeros((2, 2)))
    assert golden.pressure() == pytest.approx(math.log((1 + math.sqrt(5)) / 2), abs=1e-14)
    p, pi = golden.equilibrium()
    assert golden.qstar(pi) == pytest.approx(0.0, abs=1e-12)
    assert np.asarray(p).sum() == pytest.approx(1.0)
    s = tc.random_sft(7)
    assert 0.0 <= s.entropy() <= math.log(s.alphabet) + 1e-12
    with pytest.raises(ValueError):
        tc.WeightedSft(np.array([[1, 0], [0, 1]], dtype=np.int32), np.zeros((2, 2)))


def test_run_config(tmp_path):
    cfg = {"kind": "sft-oracle", "seed": 3, "params": {"count": 5}}
    status, summary = tc.run(cfg, out=str(tmp_path), threads=1)
    assert status == 0
    assert "sft shifts 5" in summary
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 3
    assert (tmp_path / "sft.csv").exists()
    with pytest.raises(ValueError):
        tc.run({"kind": "sft-oracle", "bogus": 1})
