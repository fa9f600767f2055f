import numpy as np
import pytest

from siet.code import Codebook, LayerProbabilities
from siet.constellation import Constellation
from siet.energy import (
    HarvesterModel,
    codeword_energy,
    constant_composition_energy,
    constant_composition_profile,
    energy_profile,
    eop,
    profile_from_energies,
    write_profile_csv,
)


def test_symbol_energy_defaults():
    m = HarvesterModel()
    assert m.symbol_energy(1.0) == pytest.approx(0.0034 + 0.3829)


def test_codeword_energy_examples():
    c = Constellation.from_arrays([1.0], [2], radii=[0.5])
    assert codeword_energy([0, 1], c, HarvesterModel()) == pytest.approx(0.7726, abs=1e-12)
    assert codeword_energy([0, 1], c, HarvesterModel(0.0, 0.0)) == 0.0
    big = Constellation.from_arrays([20.0], [5])
    assert codeword_energy([g % 5 for g in range(100)], big, HarvesterModel()) == pytest.approx(6_126_536.0, rel=1e-14)


def test_constant_composition_energy_examples():
    c = Constellation.from_arrays([2.0, 1.0], [1, 1], radii=[0.4, 0.4])
    assert constant_composition_energy(LayerProbabilities((1.0, 0.0)), c, HarvesterModel(1.0, 0.0), 1) == 4.0
    assert constant_composition_energy(LayerProbabilities((0.5, 0.5)), c, HarvesterModel(1.0, 1.0), 2) == 22.0


def test_constant_composition_energy_matches_each_codeword(enumerated_n10):
    c, cb = enumerated_n10
    m = HarvesterModel()
    e = constant_composition_energy(LayerProbabilities((0.5, 0.5)), c, m, 10)
    every = cb.layer_counts_per_codeword() @ m.symbol_energy(c.amplitudes)
    np.testing.assert_allclose(every, e, rtol=1e-13)
    sample = cb.codewords[:: cb.M // 200]
    assert all(codeword_energy(w, c, m) == pytest.approx(e, rel=1e-13) for w in sample)
    prof = energy_profile(cb, c, m)
    assert prof.num_levels == 1 and prof.multiplicities.tolist() == [cb.M]


def test_profile_levels_and_multiplicities():
    p = profile_from_energies([2.0, 1.0, 3.0, 2.0])
    assert p.levels.tolist() == [1.0, 2.0, 3.0]
    assert p.multiplicities.tolist() == [1, 2, 1]
    assert p.M == 4


def test_mixed_toy_codebook_profile():
    # two distinct words per layer need a second symbol per layer
    c = Constellation.from_arrays([2.0, 1.0], [2, 2], radii=[0.4, 0.4])
    cb = Codebook(np.array([[0, 0, 0], [1, 1, 1], [2, 2, 2], [3, 3, 3]]), (2, 2))
    prof = energy_profile(cb, c, HarvesterModel(1.0, 0.0))
    assert prof.levels.tolist() == [3.0, 12.0]
    assert prof.multiplicities.tolist() == [2, 2]


def test_eop_examples():
    p = profile_from_energies([1.0, 2.0, 2.0, 3.0])
    assert eop(p, 2.5) == 0.75
    assert eop(p, 0.0) == 0.0
    assert eop(p, 1.0) == 0.0  # strict inequality
    cc = constant_composition_profile(22.0, 10)
    assert eop(cc, 22.0) == 0.0
    assert eop(cc, 22.0000001) == 1.0
    with pytest.raises(ValueError):
        eop(p, -1.0)


def test_write_profile_csv(tmp_path):
    p = profile_from_energies([1.0, 2.0, 2.0])
    write_profile_csv(p, tmp_path / "cw.csv", tmp_path / "lv.csv")
    assert (tmp_path / "lv.csv").read_text().splitlines() == ["level_index,level,multiplicity", "0,1,1", "1,2,2"]
    assert len((tmp_path / "cw.csv").read_text().splitlines()) == 4


def test_exact_profile_matches_tolerant_profile():
    c = Constellation.from_arrays([2.0, 1.0], [2, 2], radii=[0.4, 0.4])
    cb = Codebook(np.array([[0, 2, 2], [1, 0, 3], [2, 3, 0], [0, 1, 1], [3, 3, 3]]), (2, 2))
    m = HarvesterModel(0.1, 0.3)
    a, b = energy_profile(cb, c, m), energy_profile(cb, c, m, exact=True)
    assert b.multiplicities.tolist() == [1, 2, 1, 1] == a.multiplicities.tolist()
    np.testing.assert_allclose(a.levels, b.levels, rtol=1e-15)
    np.testing.assert_allclose(a.per_codeword, b.per_codeword, rtol=1e-15)
