"""Tests for the Monte Carlo harness, CSV interchange, and the CLI."""

import filecmp

import numpy as np
import pytest

from srbc.harness import (
    CSV_HEADER,
    SimCurve,
    SystemConfig,
    compare_theory_sim,
    emit_csv,
    parse_csv,
    run_ber_sweep,
    run_cfo_study,
    run_compare,
    run_pmd_sweep,
    run_retx,
    run_roc,
    simulate_frame_failures,
)
from srbc import cli
from srbc.waveform import ConfigurationError


def small_curve():
    meta = {"scheme": "ook", "N": "64", "gamma": "0.25", "pfa_target": "0.001",
            "cfo": "0.0", "seed": "7", "trials": "1000"}
    return SimCurve(np.array([0.0, 10.0]), np.array([0.5, 0.25]),
                    np.array([0.01, 0.02]), meta)


def test_config_defaults_and_coercion():
    cfg = SystemConfig()
    assert cfg.scheme == "ook" and cfg.n == 64 and cfg.zeta == 1
    assert cfg.cp_len == 8
    assert SystemConfig(scheme="fsk2").zeta == 2
    coerced = SystemConfig(gamma_mag=1, trials=2.0 * 100, sigma_v=2)
    assert isinstance(coerced.gamma_mag, float) and coerced.gamma_mag == 1.0
    assert isinstance(coerced.trials, int) and coerced.trials == 200
    assert coerced.plan().n_data == 32
    replaced = cfg.replace(snr_db=(5.0,))
    assert replaced.snr_db == (5.0,) and replaced.scheme == "ook"


def test_config_validation():
    with pytest.raises(ConfigurationError):
        SystemConfig(n=100)
    with pytest.raises(ConfigurationError):
        SystemConfig(snr_db=(10.0, 5.0))
    with pytest.raises(ConfigurationError):
        SystemConfig(gamma_mag=1.5)
    with pytest.raises(ConfigurationError):
        SystemConfig(channel_mode="awgn")
    assert SystemConfig(l_direct=9).cp_len == 8  # memory 8 just fits
    with pytest.raises(ConfigurationError):
        SystemConfig(l_direct=10)  # memory exceeds the n=64 prefix
    with pytest.raises(ConfigurationError):
        SystemConfig(trials=0)
    with pytest.raises(ConfigurationError):
        SystemConfig(pfa_target=0.0)


def test_sim_curve_validation():
    curve = small_curve()
    assert curve.meta["scheme"] == "ook"
    with pytest.raises(ValueError):
        SimCurve(np.array([0.0]), np.array([0.5, 0.5]),
                 np.array([0.01, 0.01]), curve.meta)
    with pytest.raises(ValueError):
        SimCurve(np.array([0.0]), np.array([1.5]), np.array([0.01]), curve.meta)
    with pytest.raises(ValueError):
        SimCurve(np.array([0.0]), np.array([0.5]), np.array([-0.01]), curve.meta)
    with pytest.raises(ValueError):
        SimCurve(np.array([0.0]), np.array([0.5]), np.array([0.01]),
                 {"scheme": "ook"})


def test_csv_round_trip_and_exact_bytes(tmp_path):
    curve = small_curve()
    path = tmp_path / "curve.csv"
    emit_csv(curve, path)
    text = path.read_bytes().decode()
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "0.0,0.5,0.01,ook,64,0.25,0.001,0.0,7,1000"
    assert lines[2] == "10.0,0.25,0.02,ook,64,0.25,0.001,0.0,7,1000"
    back = parse_csv(path)
    assert np.array_equal(back.abscissa, curve.abscissa)
    assert np.array_equal(back.values, curve.values)
    assert np.array_equal(back.confidence_halfwidth, curve.confidence_halfwidth)
    assert back.meta == curve.meta


def test_csv_parse_rejects_bad_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(CSV_HEADER) + "\n")
    with pytest.raises(ValueError):
        parse_csv(empty)
    wrong = tmp_path / "wrong.csv"
    wrong.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        parse_csv(wrong)


def test_runs_are_thread_and_rerun_deterministic(tmp_path):
    base = SystemConfig(scheme="fsk2", n=64, gamma_mag=0.25,
                        snr_db=(5.0, 15.0), trials=20_000,
                        channel_mode="iid", seed=157)
    paths = []
    for threads in (1, 4):
        curve = run_ber_sweep(base.replace(threads=threads))
        path = tmp_path / f"t{threads}.csv"
        emit_csv(curve, path)
        paths.append(path)
    assert filecmp.cmp(*paths, shallow=False)
    again = tmp_path / "again.csv"
    emit_csv(run_ber_sweep(base), again)
    assert filecmp.cmp(paths[0], again, shallow=False)


def test_silent_tag_hits_false_alarm_floor():
    # with a zero reflection coefficient the detector sees pure noise,
    # so it misses at one minus the false-alarm target
    cfg = SystemConfig(scheme="ook", n=64, gamma_mag=0.0,
                       snr_db=(0.0, 20.0), trials=200_000,
                       channel_mode="iid", seed=163, pfa_target=1e-3)
    curve = run_pmd_sweep(cfg, target_events=None)
    for value, ci in zip(curve.values, curve.confidence_halfwidth):
        assert abs(value - 0.999) < max(4 * ci, 5e-4), (value, ci)


def test_silent_tag_fsk_is_a_coin_flip():
    cfg = SystemConfig(scheme="fsk1", n=64, gamma_mag=0.0, snr_db=(10.0,),
                       trials=50_000, channel_mode="iid", seed=167)
    curve = run_ber_sweep(cfg, target_events=None)
    assert abs(curve.values[0] - 0.5) < 5 * curve.confidence_halfwidth[0]


def test_roc_endpoints_and_monotonicity():
    cfg = SystemConfig(scheme="ook", n=64, gamma_mag=0.5, snr_db=(10.0,),
                       trials=20_000, seed=173)
    etas = np.array([0.0, 1.0, 2.0, 4.0, 8.0])
    curve = run_roc(cfg, etas)
    assert curve.values.shape == (5,)
    assert curve.abscissa[-1] == 1.0 and curve.values[-1] == 1.0
    assert (np.diff(curve.abscissa) >= 0).all()
    assert (np.diff(curve.values) >= 0).all()
    with pytest.raises(ConfigurationError):
        run_roc(cfg.replace(snr_db=(0.0, 10.0)), etas)


def test_confidence_shrinks_with_trials():
    base = SystemConfig(scheme="fsk2", n=64, gamma_mag=0.25, snr_db=(10.0,),
                        channel_mode="iid", seed=179)
    small = run_ber_sweep(base.replace(trials=20_000), target_events=None)
    large = run_ber_sweep(base.replace(trials=80_000), target_events=None)
    ratio = small.confidence_halfwidth[0] / large.confidence_halfwidth[0]
    assert abs(ratio - 2.0) < 0.3, ratio
    assert small.meta["trials"] == "20000" and large.meta["trials"] == "80000"


def test_retx_floor_and_clean_channel():
    silent = SystemConfig(scheme="fsk2", n=64, gamma_mag=0.0, snr_db=(10.0,),
                          trials=2_000, seed=181)
    floor = run_retx(silent, target_events=None)
    assert floor.values[0] > 0.9
    clean = SystemConfig(scheme="fsk2", n=64, gamma_mag=1.0, snr_db=(200.0,),
                         trials=2_000, seed=191)
    spotless = run_retx(clean, target_events=None)
    assert spotless.values[0] == 0.0


def test_primary_ber_ignores_tag_amplitude():
    base = SystemConfig(scheme="fsk2", n=64, snr_db=(5.0, 10.0),
                        trials=3_000, seed=193)
    quiet = run_ber_sweep(base.replace(gamma_mag=0.0), target="primary",
                          target_events=None)
    loud = run_ber_sweep(base.replace(gamma_mag=1.0), target="primary",
                         target_events=None)
    assert np.array_equal(quiet.values, loud.values)
    assert 0.0 < quiet.values[0] < 0.5


def test_cfo_study_zero_offset_matches_plain_sweep():
    cfg = SystemConfig(scheme="fsk2", n=64, gamma_mag=0.5, snr_db=(10.0,),
                       trials=10_000, seed=197)
    plain = run_ber_sweep(cfg, target_events=None)
    zero, shifted = run_cfo_study(cfg, (0.0, 0.1), target_events=None)
    assert np.array_equal(zero.values, plain.values)
    assert zero.meta["cfo"] == "0.0" and shifted.meta["cfo"] == "0.1"
    assert shifted.values[0] > zero.values[0]


def test_frame_failures_reproducible():
    cfg = SystemConfig(scheme="ook", n=64, gamma_mag=0.5, snr_db=(15.0,),
                       trials=512, seed=199)
    a = simulate_frame_failures(cfg, 15.0, 300, np.random.default_rng(3))
    b = simulate_frame_failures(cfg, 15.0, 300, np.random.default_rng(3))
    assert a == b and 0 <= a <= 300


def test_compare_smoke():
    cfg = SystemConfig(scheme="fsk2", n=64, gamma_mag=0.5,
                       snr_db=(5.0, 15.0), trials=50_000,
                       channel_mode="iid", seed=211)
    theory, sim, rows, ok = run_compare(cfg)
    assert ok, rows
    assert len(rows) == 2 and all(r["checked"] for r in rows)
    bad_sim = SimCurve(sim.abscissa, np.clip(sim.values * 3 + 0.2, 0, 1),
                       sim.confidence_halfwidth, sim.meta)
    _, all_ok = compare_theory_sim(theory, bad_sim)
    assert not all_ok


def test_cli_theory_and_config_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# sweep setup\nscheme = fsk2\ngamma_mag = 0.5\n"
                    "snr_db = 10, 20\nn = 64\n")
    out = tmp_path / "theory.csv"
    code = cli.main(["theory", "--config", str(conf), "--gamma", "0.25",
                     "--out", str(out)])
    assert code == 0
    curve = parse_csv(out)
    assert curve.meta["scheme"] == "fsk2"
    assert curve.meta["gamma"] == "0.25"  # the flag out-ranks the file
    assert curve.abscissa.tolist() == [10.0, 20.0]


def test_cli_simulation_commands(tmp_path):
    out = tmp_path / "pmd.csv"
    code = cli.main(["pmd", "--channel-mode", "iid", "--snr", "10",
                     "--trials", "100000", "--seed", "5", "--out", str(out)])
    assert code == 0
    assert parse_csv(out).meta["seed"] == "5"
    roc_out = tmp_path / "roc.csv"
    code = cli.main(["roc", "--snr", "10", "--trials", "5000",
                     "--eta-grid", "0.0,2.0,5.0", "--out", str(roc_out)])
    assert code == 0
    assert parse_csv(roc_out).values[-1] <= 1.0
    cfo_out = tmp_path / "cfo.csv"
    code = cli.main(["cfo", "--scheme", "fsk2", "--snr", "10", "--trials",
                     "3000", "--eps-grid", "0.0,0.05", "--out", str(cfo_out)])
    assert code == 0
    assert parse_csv(tmp_path / "cfo_eps0.csv").meta["cfo"] == "0.0"
    assert parse_csv(tmp_path / "cfo_eps0.05.csv").meta["cfo"] == "0.05"


def test_cli_rejects_bad_input(tmp_path):
    out = tmp_path / "x.csv"
    assert cli.main(["pmd", "--n", "100", "--out", str(out)]) == 2
    conf = tmp_path / "bad.conf"
    conf.write_text("unknown_key = 3\n")
    assert cli.main(["theory", "--config", str(conf), "--out", str(out)]) == 2
