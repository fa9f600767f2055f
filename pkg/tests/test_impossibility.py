import math

import numpy as np
import pytest

from siet.code import LayerProbabilities, TypeVector
from siet.constellation import Constellation
from siet.energy import constant_composition_profile, eop, profile_from_energies
from siet.errors import DegenerateConstellation, ZeroTypeEntry
from siet.impossibility import (
    dep_lower_bound,
    dep_lower_bound_raw,
    energy_rate_cap,
    energy_rate_caps,
    eop_lower_bound,
    farthest_symbol_distances,
    impossibility_report,
    rate_alphabet_cap,
    rate_upper_exact,
    rate_upper_stirling,
    rate_upper_stirling_nats,
)

Q_1 = 0.15865525393145705141
LOG_Q_40 = -804.60844201375378817
FIGBR_BITS = 3.0685438214289015103  # log2(100! / (10!)^10) / 100, exact integer arithmetic
BPSK = Constellation.from_arrays([1.0], [2], radii=[0.5])


def test_dep_lower_bound_hand_example():
    # sum_l n P |x - xbar|^2 = 2 * (0.5*4 + 0.5*4) = 8; sqrt(8 / (2*4)) = 1
    assert dep_lower_bound(BPSK, LayerProbabilities((1.0,)), 2, 2, 4.0) == pytest.approx(Q_1, abs=1e-12)
    t = TypeVector((0.5, 0.5), (2,))
    assert dep_lower_bound(BPSK, t, 2, 2, 4.0) == pytest.approx(Q_1, abs=1e-12)


def test_dep_lower_bound_limits():
    assert dep_lower_bound(BPSK, (1.0,), 2, 2, 1e-6) == 0.0
    with pytest.raises(ValueError):
        dep_lower_bound(BPSK, (1.0,), 2, 1, 1.0)
    raw = dep_lower_bound_raw(BPSK, (1.0,), 2, 10**6, 100.0)
    assert raw > 1.0
    assert dep_lower_bound(BPSK, (1.0,), 2, 10**6, 100.0) == 1.0
    assert dep_lower_bound_raw(BPSK, (1.0,), 2, math.inf, 1.0) == math.inf


def test_dep_lower_bound_log_domain_for_huge_M():
    # M ~ e^600 with a tail probability ~ e^-805 must not overflow to inf*0
    # n=800 gives a Q-function argument of 40
    raw = dep_lower_bound_raw(BPSK, (1.0,), 800, math.exp(600.0), 1.0)
    assert raw == pytest.approx(math.exp(600.0 + LOG_Q_40), rel=1e-9)


def test_farthest_symbol_distances():
    c = Constellation.from_arrays([3.0, 1.0], [2, 2], [0.0, math.pi / 2], [0.5, 0.5])
    np.testing.assert_allclose(farthest_symbol_distances(c), [6.0, 6.0, math.sqrt(10), math.sqrt(10)])
    with pytest.raises(DegenerateConstellation):
        farthest_symbol_distances(Constellation.from_arrays([1.0], [1]))


def test_rate_upper_exact_examples():
    t = TypeVector((0.1,) * 10, (10,))
    assert rate_upper_exact(100, t) == pytest.approx(FIGBR_BITS, abs=1e-12)
    assert rate_upper_exact(2, TypeVector((1.0,), (1,))) == 0.0
    for n in (10, 20, 50):
        assert rate_upper_exact(n, TypeVector((0.2,) * 5, (5,))) <= rate_alphabet_cap(5)


def test_rate_upper_stirling_examples():
    t = TypeVector((0.1,) * 10, (10,))
    assert rate_upper_stirling(100, t) >= rate_upper_exact(100, t)
    n = 7
    assert rate_upper_stirling_nats(n, TypeVector((1.0,), (1,))) == pytest.approx((1 / 12 - 1 / 13) / n**2, abs=1e-16)
    with pytest.raises(ZeroTypeEntry):
        rate_upper_stirling(4, TypeVector((0.5, 0.5, 0.0), (3,)))


def test_rate_upper_stirling_converges_to_entropy():
    t = TypeVector((0.25, 0.25, 0.5), (3,))
    h_bits = 1.5
    prev = None
    for n in (100, 1000, 10000, 100000):
        gap = abs(rate_upper_stirling(n, t) - h_bits)
        assert gap <= 2 * math.log2(n) / n
        if prev is not None:
            assert gap < prev
        prev = gap


def test_eop_lower_bound_is_eop():
    p = profile_from_energies([1.0, 2.0, 2.0, 3.0])
    for B in (0.0, 1.0, 1.5, 2.0, 2.5, 3.5):
        assert eop_lower_bound(p, B) == eop(p, B)


def test_energy_rate_cap_inclusive_rule_examples():
    p = profile_from_energies([1.0, 2.0, 2.0, 3.0])
    assert energy_rate_cap(p, 0.25, "inclusive") == 1.0
    assert energy_rate_cap(p, 0.75, "inclusive") == 2.0
    assert energy_rate_cap(p, 1.0, "inclusive") == 3.0


def test_energy_rate_cap_supremum_rule():
    p = profile_from_energies([1.0, 2.0, 2.0, 3.0])
    # B = 2 already has outage 1/4, so it is the largest target at delta = 0.25
    assert energy_rate_cap(p, 0.25) == 2.0
    assert eop(p, 2.0) <= 0.25 < eop(p, 2.0 + 1e-9)
    assert energy_rate_cap(p, 0.75) == 3.0
    assert energy_rate_cap(p, 0.0) == 1.0
    assert energy_rate_cap(p, 1.0) == 3.0


def test_energy_rate_cap_special_profiles():
    distinct = profile_from_energies([5.0, 1.0, 3.0, 4.0])
    for rule in ("supremum", "inclusive"):
        assert energy_rate_cap(distinct, 0.2, rule) == 1.0
        assert energy_rate_cap(distinct, 0.0, rule) == 1.0
    cc = constant_composition_profile(7.5, 12)
    for d in (0.0, 0.3, 1.0):
        assert energy_rate_cap(cc, d) == 7.5
    with pytest.raises(ValueError):
        energy_rate_cap(cc, 1.5)
    with pytest.raises(ValueError):
        energy_rate_cap(cc, 0.5, "nearest")
    assert energy_rate_caps(cc, [0.0, 1.0]) == [(0.0, 7.5), (1.0, 7.5)]


def test_impossibility_report_fields():
    c = Constellation.from_arrays([20.0, 10.0], [5, 5], radii=[1.0, 1.0])
    lp = LayerProbabilities((0.5, 0.5))
    prof = constant_composition_profile(1234.0, 5)
    rep = impossibility_report(c, lp, 20, 1000, 1.0, prof, 1000.0, [0.5])
    row = rep.csv_row()
    assert tuple(row) == rep.CSV_FIELDS
    assert all(row[k] == row[k] for k in row)  # no NaN
    assert row["delta_min"] == 0.0 and row["B_cap_at_delta"] == 1234.0
    rep0 = impossibility_report(c, LayerProbabilities((1.0, 0.0)), 20, 10, 1.0, prof, 1.0, [0.0])
    assert math.isnan(rep0.rate_stirling_bits)
