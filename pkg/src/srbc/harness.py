"""Config-driven Monte Carlo experiment runner.

Every random draw comes from a generator seeded by (seed, point index,
batch index) over a fixed batch geometry, and the adaptive stop rule
scans batch results in index order, so a run's numbers depend only on
its configuration — never on the worker-thread count or on completion
order.  Results are curves (abscissa, value, 95% confidence halfwidth)
plus a flat string metadata block, written to and read back from CSV
losslessly.

Two channel modes are available: "tdl" draws tapped-delay-line fading
and runs the full time-domain pipeline, while "iid" draws an
independent complex-normal gain per subcarrier — the analytical model's
own assumptions — and exists to validate the analysis module.
"""
from __future__ import annotations

import csv
import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis
from .backscatter import apply_backscatter, bd_waveform
from .channel import (CfoSpec, add_awgn, apply_cfo, apply_channel,
                      complex_normal, sample_channels, snr_to_noise_variance)
from .crc import crc5_check_many, crc5_encode_many
from .detector import (fsk_detect, fsk_metrics, ook_detect, ook_test_statistic,
                       primary_detect)
from .waveform import (SCHEMES, ConfigurationError, FreqGrid, TimeSignal,
                       build_subcarrier_plan, map_symbols, ofdm_demodulate,
                       ofdm_modulate)

CSV_HEADER = ("abscissa", "value", "ci95", "scheme", "N", "gamma",
              "pfa_target", "cfo", "seed", "trials")
DFT_SIZES = (64, 128, 256, 512)
CHANNEL_MODES = ("tdl", "iid")
TARGET_ERROR_EVENTS = 100
FRAME_PAYLOAD_BITS = 7
FRAME_BITS = 12
_BATCH_SYMBOLS = 2048
_BATCH_FRAMES = 512


@dataclass(frozen=True)
class SystemConfig:
    """One experiment's full parameterization.

    ``snr_db`` accepts a scalar or a strictly increasing grid and is
    stored as a tuple.  ``zeta`` defaults to the scheme's natural
    spacing (1, except 2 for fsk2, whose plan needs two nulls per data
    bin).  ``trials`` caps the per-point Monte Carlo budget; runs stop
    early once enough error events accumulate.
    """

    scheme: str = "ook"
    n: int = 64
    zeta: int | None = None
    gamma_mag: float = 0.25
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    cfo_eps: float = 0.0
    l_direct: int = 4
    l_forward: int = 4
    sigma_v: float = 1.0
    pfa_target: float = 1e-3
    trials: int = 200_000
    seed: int = 20260801
    channel_mode: str = "tdl"
    crc_preset: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("gamma_mag", "cfo_eps", "sigma_v", "pfa_target"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("n", "l_direct", "l_forward", "trials", "seed",
                     "crc_preset", "threads"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.scheme not in SCHEMES:
            raise ConfigurationError(
                f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        if self.n not in DFT_SIZES:
            raise ConfigurationError(
                f"DFT size must be one of {DFT_SIZES}, got {self.n}")
        if self.zeta is None:
            object.__setattr__(self, "zeta", 2 if self.scheme == "fsk2" else 1)
        snr = np.atleast_1d(np.asarray(self.snr_db, dtype=np.float64))
        if snr.ndim != 1 or len(snr) == 0 or not np.isfinite(snr).all():
            raise ConfigurationError("snr_db must be a finite scalar or vector")
        if len(snr) > 1 and np.any(np.diff(snr) <= 0):
            raise ConfigurationError("snr_db grid must be strictly increasing")
        object.__setattr__(self, "snr_db", tuple(float(s) for s in snr))
        if not 0.0 <= self.gamma_mag <= 1.0:
            raise ConfigurationError(
                f"gamma_mag must lie in [0, 1], got {self.gamma_mag}")
        if self.l_direct < 1 or self.l_forward < 1:
            raise ConfigurationError("channels need at least one tap")
        if max(self.l_direct, self.l_forward) - 1 > self.cp_len:
            raise ConfigurationError(
                f"channel memory exceeds the cyclic prefix ({self.cp_len})")
        if self.sigma_v <= 0:
            raise ConfigurationError(f"sigma_v must be > 0, got {self.sigma_v}")
        if not 0.0 < self.pfa_target < 1.0:
            raise ConfigurationError(
                f"pfa_target must lie in (0, 1), got {self.pfa_target}")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.channel_mode not in CHANNEL_MODES:
            raise ConfigurationError(
                f"channel_mode must be one of {CHANNEL_MODES}, got {self.channel_mode!r}")
        if not 0 <= self.crc_preset < 32:
            raise ConfigurationError(
                f"crc_preset must be a 5-bit value, got {self.crc_preset}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {self.threads}")
        build_subcarrier_plan(self.scheme, self.n, self.zeta)

    @property
    def cp_len(self) -> int:
        return self.n // 8

    def plan(self):
        return build_subcarrier_plan(self.scheme, self.n, self.zeta)

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class SimCurve:
    """A measured curve: values with confidence halfwidths and metadata.

    Values are probabilities; a not-a-number entry marks a point whose
    computation failed and is rejected only where finiteness matters.
    ``meta`` holds exactly the flat string fields of the CSV schema.
    """

    abscissa: np.ndarray
    values: np.ndarray
    confidence_halfwidth: np.ndarray
    meta: dict

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        self.confidence_halfwidth = np.asarray(self.confidence_halfwidth,
                                               dtype=np.float64)
        if not (self.abscissa.ndim == self.values.ndim
                == self.confidence_halfwidth.ndim == 1):
            raise ValueError("curve columns must be one-dimensional")
        if not (len(self.abscissa) == len(self.values)
                == len(self.confidence_halfwidth) >= 1):
            raise ValueError("curve columns must share a nonzero length")
        finite = np.isfinite(self.values)
        if np.any((self.values[finite] < 0) | (self.values[finite] > 1)):
            raise ValueError("curve values must be probabilities in [0, 1]")
        if np.any(~(self.confidence_halfwidth >= 0)):
            raise ValueError("confidence halfwidths must be >= 0")
        expected = set(CSV_HEADER[3:])
        if set(self.meta) != expected:
            raise ValueError(f"meta must carry exactly the fields {sorted(expected)}")
        self.meta = {k: str(self.meta[k]) for k in CSV_HEADER[3:]}


def _config_meta(cfg: SystemConfig) -> dict:
    return {
        "scheme": cfg.scheme,
        "N": str(cfg.n),
        "gamma": repr(float(cfg.gamma_mag)),
        "pfa_target": repr(float(cfg.pfa_target)),
        "cfo": repr(float(cfg.cfo_eps)),
        "seed": str(cfg.seed),
        "trials": str(cfg.trials),
    }


def _ci95(p: np.ndarray, trials) -> np.ndarray:
    return 1.96 * np.sqrt(np.maximum(p * (1.0 - p), 0.0) / np.maximum(trials, 1))


# ---------------------------------------------------------------------------
# Deterministic batched Monte Carlo engine


def _batch_rng(seed: int, point_index: int, batch_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=seed,
                                 spawn_key=(point_index, batch_index))
    return np.random.default_rng(seq)


def _batch_sizes(total: int, batch_size: int) -> list:
    n_batches = math.ceil(total / batch_size)
    sizes = [batch_size] * n_batches
    sizes[-1] = total - batch_size * (n_batches - 1)
    return sizes


def _accumulate(batch_fn, total: int, seed: int, point_index: int, *,
                threads: int = 1, n_channels: int = 1,
                stop_channel: int | None = None,
                target_events: int = TARGET_ERROR_EVENTS,
                batch_size: int = _BATCH_SYMBOLS):
    """Sum batch counts under the in-order adaptive stop rule.

    ``batch_fn(rng, size)`` returns (counts vector, trials consumed).
    Batches are executed in waves, possibly concurrently, but the stop
    rule walks results in batch order and discards everything past the
    stopping batch, so the outcome is schedule-independent.
    """
    sizes = _batch_sizes(total, batch_size)
    counts = np.zeros(n_channels, dtype=np.int64)
    used = 0

    def run(j):
        return batch_fn(_batch_rng(seed, point_index, j), sizes[j])

    def scan(results):
        nonlocal used
        for c, t in results:
            counts[:] += np.asarray(c, dtype=np.int64)
            used += int(t)
            if (stop_channel is not None
                    and counts[stop_channel] >= target_events):
                return True
        return False

    wave = max(8, 4 * threads)
    if threads == 1:
        for start in range(0, len(sizes), wave):
            js = range(start, min(start + wave, len(sizes)))
            if scan(map(run, js)):
                break
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for start in range(0, len(sizes), wave):
                js = range(start, min(start + wave, len(sizes)))
                if scan(pool.map(run, js)):
                    break
    return counts, used


# ---------------------------------------------------------------------------
# Link simulation kernels


def _require_tdl(cfg: SystemConfig, why: str) -> None:
    if cfg.channel_mode != "tdl":
        raise ConfigurationError(f"{why} needs channel_mode='tdl'")


def _bd_waves(cfg: SystemConfig, plan):
    return (bd_waveform(cfg.scheme, 0, plan.zeta, plan.n),
            bd_waveform(cfg.scheme, 1, plan.zeta, plan.n))


def _tdl_grid(rng, size, cfg, plan, bits, noise, waves):
    """Full time-domain link for one batch of symbols.

    Returns the demodulated grid, the channel draw, and the primary data
    bits, so callers can detect either the tag bit or the primary data.
    """
    data_bits = rng.integers(0, 2, size=(size, plan.n_data))
    sig = ofdm_modulate(map_symbols(1.0 - 2.0 * data_bits, plan), cfg.cp_len)
    ch = sample_channels(cfg.l_direct, cfg.l_forward, cfg.sigma_v, rng,
                         plan.n, shape=(size,))
    direct = apply_channel(sig, ch.taps_direct)
    forward = apply_channel(sig, ch.taps_forward)
    r0 = apply_backscatter(forward, waves[0], cfg.gamma_mag)
    r1 = apply_backscatter(forward, waves[1], cfg.gamma_mag)
    reflected = np.where((np.asarray(bits) == 1)[:, None], r1.samples, r0.samples)
    received = TimeSignal(
        direct.samples + ch.taps_backward[:, 0][:, None] * reflected, cfg.cp_len)
    received = add_awgn(received, noise, rng)
    if cfg.cfo_eps:
        received = apply_cfo(received, CfoSpec(cfg.cfo_eps))
    return ofdm_demodulate(received), ch, data_bits


def _iid_grid(rng, size, cfg, plan, bits, noise):
    """Per-subcarrier model: independent unit gains on the landing bins.

    Matches the analytical error model bin for bin; only the detection
    bins carry signal structure, the rest of the grid is noise.
    """
    bits = np.asarray(bits)
    nvar_bin = noise.variance * plan.n
    values = complex_normal(rng, (size, plan.n), nvar_bin)
    hb = complex_normal(rng, (size,), cfg.sigma_v ** 2)
    g0 = complex_normal(rng, (size, len(plan.kb0)), 1.0)
    g1 = complex_normal(rng, (size, len(plan.kb1)), 1.0)
    amp = cfg.gamma_mag * hb
    if plan.scheme == "ook":
        values[:, plan.kb0] += (amp * bits)[:, None] * g0
    else:
        values[:, plan.kb0] += (amp * (bits == 0))[:, None] * g0
        values[:, plan.kb1] += (amp * (bits == 1))[:, None] * g1
    return FreqGrid(values)


def _bd_grid(rng, size, cfg, plan, bits, noise, waves):
    if cfg.channel_mode == "iid":
        return _iid_grid(rng, size, cfg, plan, bits, noise), None, None
    return _tdl_grid(rng, size, cfg, plan, bits, noise, waves)


def _decide_bits(grid, plan, eta):
    if plan.scheme == "ook":
        return np.asarray(ook_detect(ook_test_statistic(grid, plan), eta))
    return np.asarray(fsk_detect(*fsk_metrics(grid, plan)))


def _ook_threshold(cfg: SystemConfig, snr_db: float, n_b: int) -> float:
    w_bin = analysis.noise_bin_variance(snr_db)
    noise = analysis.ExpMixSpec(np.full(n_b, 1.0 / w_bin))
    return analysis.optimal_threshold(cfg.pfa_target, noise)


# ---------------------------------------------------------------------------
# Experiment runners


def run_pmd_sweep(cfg: SystemConfig,
                  target_events: int | None = TARGET_ERROR_EVENTS) -> SimCurve:
    """Missed-detection probability of the OOK tag bit across the SNR grid.

    The detection threshold at each point is set analytically to hit
    ``pfa_target``; the trial cap must allow at least 100 expected false
    alarms (trials >= 100 / pfa_target) so that operating point is
    meaningful.
    """
    if cfg.scheme != "ook":
        raise ConfigurationError("the missed-detection sweep is defined for ook")
    if cfg.cfo_eps:
        _require_tdl(cfg, "simulating a frequency offset")
    if cfg.trials * cfg.pfa_target < TARGET_ERROR_EVENTS:
        raise ConfigurationError(
            f"trials must be at least {TARGET_ERROR_EVENTS}/pfa_target "
            f"= {math.ceil(TARGET_ERROR_EVENTS / cfg.pfa_target)}, got {cfg.trials}")
    plan = cfg.plan()
    waves = _bd_waves(cfg, plan)
    stop = None if target_events is None else 0
    events = TARGET_ERROR_EVENTS if target_events is None else target_events
    values, halfwidths = [], []
    for i, snr in enumerate(cfg.snr_db):
        noise = snr_to_noise_variance(snr, plan)
        eta = _ook_threshold(cfg, snr, len(plan.kb0))

        def kernel(rng, size):
            bits = np.ones(size, dtype=np.int8)
            grid, _, _ = _bd_grid(rng, size, cfg, plan, bits, noise, waves)
            stat = ook_test_statistic(grid, plan)
            return np.array([np.count_nonzero(stat <= eta)]), size

        counts, used = _accumulate(kernel, cfg.trials, cfg.seed, i,
                                   threads=cfg.threads, stop_channel=stop,
                                   target_events=events)
        p = counts[0] / used
        values.append(p)
        halfwidths.append(float(_ci95(p, used)))
    return SimCurve(np.asarray(cfg.snr_db), values, halfwidths, _config_meta(cfg))


def run_roc(cfg: SystemConfig, eta_grid) -> SimCurve:
    """Detection-vs-false-alarm pairs for OOK at one SNR point.

    Every threshold in ``eta_grid`` is applied to the same simulated
    statistic pools under both hypotheses; the curve comes back sorted
    by false-alarm probability.
    """
    if cfg.scheme != "ook":
        raise ConfigurationError("the ROC sweep is defined for ook")
    if len(cfg.snr_db) != 1:
        raise ConfigurationError("the ROC is computed at exactly one SNR point")
    if cfg.cfo_eps:
        _require_tdl(cfg, "simulating a frequency offset")
    etas = np.asarray(eta_grid, dtype=np.float64)
    if etas.ndim != 1 or len(etas) == 0 or np.any(~(etas >= 0)):
        raise ValueError("eta_grid must be a nonempty vector of thresholds >= 0")
    plan = cfg.plan()
    waves = _bd_waves(cfg, plan)
    noise = snr_to_noise_variance(cfg.snr_db[0], plan)
    k = len(etas)

    def kernel(rng, size):
        bits0 = np.zeros(size, dtype=np.int8)
        bits1 = np.ones(size, dtype=np.int8)
        grid0, _, _ = _bd_grid(rng, size, cfg, plan, bits0, noise, waves)
        grid1, _, _ = _bd_grid(rng, size, cfg, plan, bits1, noise, waves)
        stat0 = ook_test_statistic(grid0, plan)
        stat1 = ook_test_statistic(grid1, plan)
        above0 = np.count_nonzero(stat0[:, None] > etas[None, :], axis=0)
        above1 = np.count_nonzero(stat1[:, None] > etas[None, :], axis=0)
        return np.concatenate([above0, above1]), size

    counts, used = _accumulate(kernel, cfg.trials, cfg.seed, 0,
                               threads=cfg.threads, n_channels=2 * k,
                               stop_channel=None)
    pfa = counts[:k] / used
    pd = counts[k:] / used
    order = np.argsort(pfa, kind="stable")
    return SimCurve(pfa[order], pd[order], _ci95(pd[order], used),
                    _config_meta(cfg))


def run_ber_sweep(cfg: SystemConfig, target: str = "bd",
                  target_events: int | None = TARGET_ERROR_EVENTS) -> SimCurve:
    """Bit error rate across the SNR grid.

    ``target="bd"`` measures the tag bit through the non-coherent
    detector (fsk1/fsk2); ``target="primary"`` measures the coherent
    BPSK data bits on the direct link, per data bit, with the tag
    reflecting random bits in the background.
    """
    if target not in ("bd", "primary"):
        raise ValueError(f"target must be 'bd' or 'primary', got {target!r}")
    if cfg.cfo_eps:
        _require_tdl(cfg, "simulating a frequency offset")
    if target == "bd" and cfg.scheme not in ("fsk1", "fsk2"):
        raise ConfigurationError(
            "the tag bit error rate compares two hypothesis sets; use fsk1 or fsk2")
    if target == "primary":
        _require_tdl(cfg, "primary-link detection")
    plan = cfg.plan()
    waves = _bd_waves(cfg, plan)
    stop = None if target_events is None else 0
    events = TARGET_ERROR_EVENTS if target_events is None else target_events
    values, halfwidths = [], []
    for i, snr in enumerate(cfg.snr_db):
        noise = snr_to_noise_variance(snr, plan)

        def kernel(rng, size):
            bits = rng.integers(0, 2, size=size).astype(np.int8)
            grid, ch, data_bits = _bd_grid(rng, size, cfg, plan, bits, noise,
                                           waves)
            if target == "bd":
                decided = _decide_bits(grid, plan, None)
                return np.array([np.count_nonzero(decided != bits)]), size
            decided = primary_detect(grid, ch, plan)
            errors = np.count_nonzero(decided != data_bits)
            return np.array([errors]), size * plan.n_data

        counts, used = _accumulate(kernel, cfg.trials, cfg.seed, i,
                                   threads=cfg.threads, stop_channel=stop,
                                   target_events=events)
        p = counts[0] / used
        values.append(p)
        halfwidths.append(float(_ci95(p, used)))
    return SimCurve(np.asarray(cfg.snr_db), values, halfwidths, _config_meta(cfg))


def run_cfo_study(cfg: SystemConfig, eps_grid,
                  target_events: int | None = TARGET_ERROR_EVENTS) -> list:
    """One tag BER curve per frequency offset, on shared random draws.

    Reusing the (seed, point, batch) streams across offsets pairs the
    sweeps, so degradation factors between curves are not washed out by
    independent sampling noise.
    """
    eps = np.atleast_1d(np.asarray(eps_grid, dtype=np.float64))
    if len(eps) == 0 or not np.isfinite(eps).all():
        raise ValueError("eps_grid must be a nonempty finite vector")
    _require_tdl(cfg, "simulating a frequency offset")
    return [run_ber_sweep(cfg.replace(cfo_eps=float(e)), "bd", target_events)
            for e in eps]


def _retx_kernel(cfg, plan, noise, eta, waves):
    def kernel(rng, size):
        payloads = rng.integers(0, 2, size=(size, FRAME_PAYLOAD_BITS))
        tx = crc5_encode_many(payloads, cfg.crc_preset)
        grid, _, _ = _bd_grid(rng, size * FRAME_BITS, cfg, plan,
                              tx.reshape(-1), noise, waves)
        decided = _decide_bits(grid, plan, eta).reshape(size, FRAME_BITS)
        failures = np.count_nonzero(~crc5_check_many(decided, cfg.crc_preset))
        return np.array([failures]), size

    return kernel


def run_retx(cfg: SystemConfig,
             target_events: int | None = TARGET_ERROR_EVENTS) -> SimCurve:
    """Frame retransmission probability across the SNR grid.

    Frames carry 7 payload bits plus 5 check bits, one bit per OFDM
    symbol over independent channel draws; a frame counts as
    retransmitted when the receiver-side check fails.  ``trials`` caps
    the frame count per point.
    """
    if cfg.cfo_eps:
        _require_tdl(cfg, "simulating a frequency offset")
    plan = cfg.plan()
    waves = _bd_waves(cfg, plan)
    stop = None if target_events is None else 0
    events = TARGET_ERROR_EVENTS if target_events is None else target_events
    values, halfwidths = [], []
    for i, snr in enumerate(cfg.snr_db):
        noise = snr_to_noise_variance(snr, plan)
        eta = (_ook_threshold(cfg, snr, len(plan.kb0))
               if cfg.scheme == "ook" else None)
        kernel = _retx_kernel(cfg, plan, noise, eta, waves)
        counts, used = _accumulate(kernel, cfg.trials, cfg.seed, i,
                                   threads=cfg.threads, stop_channel=stop,
                                   target_events=events,
                                   batch_size=_BATCH_FRAMES)
        p = counts[0] / used
        values.append(p)
        halfwidths.append(float(_ci95(p, used)))
    return SimCurve(np.asarray(cfg.snr_db), values, halfwidths, _config_meta(cfg))


def simulate_frame_failures(cfg: SystemConfig, snr_db: float, n_frames: int,
                            rng: np.random.Generator) -> int:
    """Count check failures over ``n_frames`` frames using one generator.

    Single-threaded companion to the sweep runner for callers that hold
    their own generator; frames are processed in fixed-size chunks so
    memory stays bounded.
    """
    plan = cfg.plan()
    waves = _bd_waves(cfg, plan)
    noise = snr_to_noise_variance(snr_db, plan)
    eta = (_ook_threshold(cfg, snr_db, len(plan.kb0))
           if cfg.scheme == "ook" else None)
    kernel = _retx_kernel(cfg, plan, noise, eta, waves)
    failures = 0
    done = 0
    while done < n_frames:
        size = min(_BATCH_FRAMES, n_frames - done)
        counts, _ = kernel(rng, size)
        failures += int(counts[0])
        done += size
    return failures


# ---------------------------------------------------------------------------
# CSV plumbing and theory comparison


def emit_csv(curve, path) -> None:
    """Write one curve per file under the pinned column schema."""
    halfwidths = getattr(curve, "confidence_halfwidth", None)
    if halfwidths is None:
        halfwidths = np.zeros(len(curve.values))
    if len(curve.values) == 0:
        raise ValueError("refusing to write an empty curve")
    meta = [str(curve.meta[k]) for k in CSV_HEADER[3:]]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for a, v, c in zip(curve.abscissa, curve.values, halfwidths):
            writer.writerow([repr(float(a)), repr(float(v)), repr(float(c))]
                            + meta)


def parse_csv(path) -> SimCurve:
    """Read a curve back; the inverse of emit_csv."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path} does not carry the expected curve header")
    if len(rows) < 2:
        raise ValueError(f"{path} holds no curve points")
    meta_cols = [row[3:] for row in rows[1:]]
    if any(cols != meta_cols[0] for cols in meta_cols):
        raise ValueError(f"{path} mixes points from different runs")
    data = np.array([[float(x) for x in row[:3]] for row in rows[1:]])
    meta = dict(zip(CSV_HEADER[3:], meta_cols[0]))
    return SimCurve(data[:, 0], data[:, 1], data[:, 2], meta)


def compare_theory_sim(theory_curve, sim_curve, min_prob: float = 1e-3):
    """Check simulated points against analytical ones where both resolve.

    A point is checked when the analytical value is finite and at least
    ``min_prob``; it passes when the gap is within the larger of 10% of
    the analytical value and three confidence halfwidths.  Returns the
    per-point rows and an overall verdict that also fails on any
    non-finite analytical value.
    """
    th_x = np.asarray(theory_curve.abscissa, dtype=np.float64)
    sim_x = np.asarray(sim_curve.abscissa, dtype=np.float64)
    if th_x.shape != sim_x.shape or not np.allclose(th_x, sim_x):
        raise ValueError("curves are defined on different abscissas")
    rows = []
    all_ok = True
    for x, t, s, ci in zip(th_x, theory_curve.values, sim_curve.values,
                           sim_curve.confidence_halfwidth):
        t, s, ci = float(t), float(s), float(ci)
        if not np.isfinite(t):
            rows.append({"abscissa": x, "theory": t, "sim": s, "ci95": ci,
                         "tol": np.nan, "checked": True, "ok": False})
            all_ok = False
            continue
        checked = t >= min_prob
        tol = max(0.1 * t, 3.0 * ci)
        ok = (not checked) or abs(t - s) <= tol
        rows.append({"abscissa": x, "theory": t, "sim": s, "ci95": ci,
                     "tol": tol, "checked": checked, "ok": ok})
        all_ok = all_ok and ok
    return rows, all_ok


def run_compare(cfg: SystemConfig):
    """Analytical curve vs. iid-mode simulation on the config's SNR grid.

    Returns (theory curve, simulated curve, comparison rows, verdict).
    """
    if cfg.scheme == "ook":
        kind = "OOK_PMD"
    else:
        kind = "FSK_BER"
    params = analysis.TheoryParams(cfg.scheme, cfg.n, cfg.gamma_mag, cfg.zeta,
                                   cfg.sigma_v, cfg.pfa_target)
    theory = analysis.theory_sweep(kind, np.asarray(cfg.snr_db), params)
    sim_cfg = cfg.replace(channel_mode="iid", cfo_eps=0.0)
    if kind == "OOK_PMD":
        sim = run_pmd_sweep(sim_cfg)
    else:
        sim = run_ber_sweep(sim_cfg, "bd")
    rows, ok = compare_theory_sim(theory, sim)
    return theory, sim, rows, ok
