import csv
import io
import textwrap
from pathlib import Path

import pytest

from siet.cli import main
from siet.code import read_codebook
from siet.config import parse_scenario

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def write(tmp_path, body, name="s.yaml"):
    p = tmp_path / name
    p.write_text(textwrap.dedent(body))
    return str(p)


def test_bounds_smoke(capsys):
    code, out, _ = run(capsys, "bounds", "--config", str(CONFIGS / "bounds.yaml"))
    assert code == 0
    imp_text, ach_text = out.split("\n\n")
    imp = rows(imp_text)[0]
    assert list(imp) == ["n", "M", "sigma2", "eps_min", "R_exact_bits", "R_stirling_bits", "delta_min", "B_cap_at_delta"]
    assert all(v not in ("", "nan") for v in imp.values())
    ach = rows(ach_text)[0]
    assert ach["B_cap_at_delta"] == imp["B_cap_at_delta"]


def test_bounds_writes_two_files(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert run(capsys, "bounds", "--config", str(CONFIGS / "bounds.yaml"), "--out", str(out))[0] == 0
    assert (tmp_path / "b_impossibility.csv").exists() and (tmp_path / "b_achievability.csv").exists()


def test_bounds_is_deterministic(capsys):
    a = run(capsys, "bounds", "--config", str(CONFIGS / "bounds.yaml"))[1]
    b = run(capsys, "bounds", "--config", str(CONFIGS / "bounds.yaml"))[1]
    assert a == b


def test_bounds_sampled_codebook_caps_agree(tmp_path, capsys):
    cfg = write(tmp_path, """
        constellation: {amplitudes: [4.5, 2.0], counts: [4, 4], radii: [1.2, 0.9]}
        code: {n: 8, layer_probs: [0.5, 0.5], M: 64, mode: sample, seed: 7}
        energy: {B: 100, deltas: [0.0]}
        channel: {sigma2: 1.0}
    """)
    code, out, _ = run(capsys, "bounds", "--config", cfg)
    imp_text, ach_text = out.split("\n\n")
    assert code == 0
    assert rows(imp_text)[0]["B_cap_at_delta"] == rows(ach_text)[0]["B_cap_at_delta"]


def test_radius_too_large_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, """
        constellation: {amplitudes: [1.0], counts: [1], radii: [3.0]}
        code: {n: 4, layer_probs: [1.0]}
        channel: {sigma2: 1.0}
    """)
    code, _, err = run(capsys, "bounds", "--config", cfg)
    assert code == 2
    assert "RadiusTooLarge" in err


def test_invalid_constellation_lists_violations(tmp_path, capsys):
    cfg = write(tmp_path, """
        constellation: {amplitudes: [10, 5], counts: [4, 4], radii: [6, 6], peak_amplitude: 10}
        code: {n: 8, layer_probs: [0.5, 0.5]}
        channel: {sigma2: 1.0}
    """)
    code, _, err = run(capsys, "bounds", "--config", cfg)
    assert code == 2
    assert "inter-layer separation" in err and "symbols per layer" in err


def test_unrealizable_type_exit_3(tmp_path, capsys):
    cfg = write(tmp_path, """
        constellation: {amplitudes: [20, 10], counts: [5, 5]}
        code: {n: 7, layer_probs: [0.5, 0.5]}
        channel: {sigma2: 1.0}
    """)
    code, _, err = run(capsys, "bounds", "--config", cfg)
    assert code == 3
    assert "UnrealizableType" in err


def test_sweep_two_layer_tradeoff(capsys):
    code, out, _ = run(capsys, "sweep-figbr", "--config", str(CONFIGS / "two_layer_tradeoff.yaml"))
    assert code == 0
    data = rows(out)
    assert list(data[0]) == ["p", "A2", "energy_e", "R_exact_nats", "R_exact_bits"]
    assert len(data) == 33
    half = [r for r in data if float(r["p"]) == 0.5]
    assert all(abs(float(r["R_exact_nats"]) - 2.127) <= 0.005 for r in half)
    assert all(abs(float(r["R_exact_bits"]) - 3.069) <= 0.005 for r in half)
    full = [r for r in data if float(r["p"]) == 1.0]
    assert all(r["energy_e"] == "6126536" for r in full)


def test_sweep_regions(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "sweep-regions", "--config", str(CONFIGS / "regions.yaml"), "--out", str(out))
    assert code == 0
    data = rows(out.read_text())
    assert {"epsilon", "p1", "p2", "p3", "R_bits", "B", "pareto"} <= set(data[0])
    # overwrite, never append
    run(capsys, "sweep-regions", "--config", str(CONFIGS / "regions.yaml"), "--out", str(out))
    assert len(rows(out.read_text())) == len(data)


def test_sweep_regions_infeasible_geometry(tmp_path, capsys):
    cfg = write(tmp_path, """
        constellation: {amplitudes: [5, 4, 3], counts: [1, 1, 1]}
        code: {n: 6}
        channel: {sigma2: 1.0}
        sweep: {epsilon: ["1e-6"]}
    """)
    code, _, err = run(capsys, "sweep-regions", "--config", cfg)
    assert code == 2 and "InfeasibleGeometry" in err


def test_verify_passes_and_se_scales(capsys):
    code, out, _ = run(capsys, "verify", "--config", str(CONFIGS / "verify.yaml"), "--trials", "10000")
    assert code == 0
    small = rows(out)
    assert [r["check"] for r in small] == ["disk", "circular_dep", "equal_radius_dep"]
    assert all(r["pass"] == "1" for r in small)
    assert float(small[0]["closed_form"]) == pytest.approx(0.63212, abs=5e-6)
    code, out, _ = run(capsys, "verify", "--config", str(CONFIGS / "verify.yaml"), "--trials", "1000000")
    assert code == 0
    big = rows(out)
    ratio = float(small[0]["se"]) / float(big[0]["se"])
    assert 9.0 < ratio < 11.0


def test_verify_failure_exit_1(tmp_path, capsys, monkeypatch):
    # offset one closed form so its Monte Carlo comparison must fail
    import siet.sweeps

    exact = siet.sweeps.dep_equal_radius
    monkeypatch.setattr(siet.sweeps, "dep_equal_radius", lambda r, n, s2: exact(r, n, s2) + 0.05)
    code, out, _ = run(capsys, "verify", "--config", str(CONFIGS / "verify.yaml"), "--trials", "20000")
    assert code == 1
    assert [r["pass"] for r in rows(out)] == ["1", "1", "0"]


def test_construct_and_simulate(tmp_path, capsys):
    cb_path = tmp_path / "cb.txt"
    cfg = str(CONFIGS / "verify.yaml")
    assert run(capsys, "construct", "--config", cfg, "--out", str(cb_path))[0] == 0
    cb = read_codebook(cb_path)
    assert cb.M == 64 and cb.n == 8
    code, out, _ = run(capsys, "simulate", "--config", cfg, "--codebook", str(cb_path), "--decoder", "circular", "--trials", "2000", "--seed", "5")
    assert code == 0
    row = rows(out)[0]
    assert row["decoder"] == "circular" and row["trials"] == "2000" and row["seed"] == "5"
    code, out2, _ = run(capsys, "simulate", "--config", cfg, "--codebook", str(cb_path), "--decoder", "circular", "--trials", "2000", "--seed", "5", "--shards", "4")
    assert out2 == out


def test_config_decimal_strings_and_defaults():
    sc = parse_scenario({
        "constellation": {"amplitudes": ["2.5", 1], "counts": [2, 2], "radii": "0.25"},
        "channel": {"sigma2": "1e-1", "trials": "1e4"},
    })
    assert sc.sigma2 == 0.1 and sc.trials == 10000
    assert list(sc.constellation.radii) == [0.25, 0.25]
    assert sc.model.k1 == 0.0034 and sc.model.k2 == 0.3829
    with pytest.raises(ValueError):
        parse_scenario({"channel": {}})


def test_missing_sigma2_is_an_error(tmp_path, capsys):
    cfg = write(tmp_path, """
        constellation: {amplitudes: [20, 10], counts: [5, 5]}
        code: {n: 10, layer_probs: [0.5, 0.5]}
    """)
    code, _, err = run(capsys, "bounds", "--config", cfg)
    assert code == 2 and "sigma2" in err


def test_tradeoff_alias_matches(capsys):
    cfg = str(CONFIGS / "two_layer_tradeoff.yaml")
    assert run(capsys, "sweep-tradeoff", "--config", cfg)[1] == run(capsys, "sweep-figbr", "--config", cfg)[1]
