"""Monte-Carlo BER of the dual-hop DF OFDM link.

Each trial draws an independent channel per hop (block fading, no Doppler)
and sends ``symbols_per_trial`` OFDM symbols across it. The relay makes hard
decisions and re-modulates. Trials are grouped into fixed-size chunks, each
with its own RNG substream keyed by ``(master_seed, distance index, chunk
index)``, so results do not depend on how many workers run the chunks.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from ..catalog import OfdmNumerology, default_catalog
from ..errors import ConfigError
from ..fading import FadingModel
from ..propagation import received_power
from ..relay import LinkSpec, RelayScenario
from .channel import FLAT, TYPICAL_URBAN, PowerDelayProfile, awgn, convolve_taps, draw_taps, frequency_response
from .ofdm import DEFAULT_NUMEROLOGY, data_tones, ofdm_demodulate, ofdm_modulate
from .receiver import equalize_and_decide, null_tones, repetition_combine

log = logging.getLogger(__name__)

# kT0 over the 24 x 31.25 kHz occupied data band: 10 log10(k * 290 * 750e3)
NOISE_POWER_DBW = -145.22
REPETITION_MODES = ("independent", "shared")


@dataclass(frozen=True)
class SimConfig:
    scenario: RelayScenario
    distance_grid: Tuple[float, ...]
    mcs: int = 10
    pdp: PowerDelayProfile = TYPICAL_URBAN
    trials: int = 500_000  # cap per distance point
    master_seed: int = 2017
    min_errors: int = 100
    chunk_trials: int = 4096
    symbols_per_trial: int = 1
    noise_power_dbw: float = NOISE_POWER_DBW
    numerology: OfdmNumerology = DEFAULT_NUMEROLOGY
    repetition_fading: str = "shared"
    hop_flip: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        grid = tuple(float(d) for d in self.distance_grid)
        object.__setattr__(self, "distance_grid", grid)
        if not grid:
            raise ConfigError("distance grid is empty")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise ConfigError("distance grid must be sorted ascending")
        if min(grid) < 1.0:
            raise ConfigError("distances must be >= 1 m")
        if self.mcs not in (0, 10):
            raise ConfigError(f"simulator supports MCS0 and MCS10 only, got MCS{self.mcs}")
        if self.trials < 1 or self.chunk_trials < 1 or self.symbols_per_trial < 1:
            raise ConfigError("trials, chunk_trials and symbols_per_trial must be >= 1")
        if self.min_errors < 0:
            raise ConfigError("min_errors must be >= 0")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.repetition_fading not in REPETITION_MODES:
            raise ConfigError(f"repetition_fading must be one of {REPETITION_MODES}")
        if self.hop_flip is not None and not all(0.0 <= p <= 1.0 for p in self.hop_flip):
            raise ConfigError("hop_flip probabilities must lie in [0, 1]")
        self.pdp.check_fits(self.numerology)

    @property
    def copies(self) -> int:
        return default_catalog().mcs[self.mcs].repetition

    @property
    def bits_per_trial(self) -> int:
        return self.symbols_per_trial * self.numerology.data_tones

    def chunk_sizes(self) -> List[int]:
        full, rest = divmod(self.trials, self.chunk_trials)
        return [self.chunk_trials] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class BerEstimate:
    distance: float
    error_count: int
    bit_count: int
    trials: int
    hop1_errors: int = 0
    hop2_errors: int = 0
    discarded: int = 0

    @property
    def ber(self) -> float:
        return self.error_count / self.bit_count if self.bit_count else float("nan")

    @property
    def ci_halfwidth(self) -> float:
        """95% normal-approximation half-width of the binomial estimate."""
        p = self.ber
        return 1.96 * math.sqrt(p * (1.0 - p) / self.bit_count) if self.bit_count else float("nan")

    @property
    def sigma(self) -> float:
        return self.ci_halfwidth / 1.96

    @property
    def hop1_ber(self) -> float:
        return self.hop1_errors / self.bit_count

    @property
    def hop2_ber(self) -> float:
        return self.hop2_errors / self.bit_count


@dataclass(frozen=True)
class HopPhy:
    """Absolute per-tone signal amplitude and noise variance (watts) for one hop."""

    amplitude: float
    noise_var: float
    pdp: PowerDelayProfile

    @property
    def snr_db(self) -> float:
        if self.noise_var == 0:
            return math.inf
        return 10.0 * math.log10(self.amplitude**2 / self.noise_var)


def hop_pdp(fading: FadingModel, pdp: PowerDelayProfile) -> PowerDelayProfile:
    if fading.kind == "none":
        return FLAT.with_los(math.inf)
    if fading.kind == "rician":
        return pdp.with_los(fading.k_factor_db)
    return pdp.with_los(None)


def hop_phy(link: LinkSpec, distance: float, cfg: SimConfig) -> HopPhy:
    """Scale a hop so each data tone's mean SNR equals P_rx / N from the link budget.

    P_rx is the path-loss-only budget (fading is simulated, not margined);
    N is the configured band noise plus the receiver noise figure. Both are
    split evenly over the data tones; pilots ride at the same per-tone level.
    """
    prx_dbw = received_power(link.tx, link.rx, link.deployment, distance, 0.0) - 30.0
    n_tones = cfg.numerology.data_tones
    signal_w = 10.0 ** (prx_dbw / 10.0) / n_tones
    noise_w = 10.0 ** ((cfg.noise_power_dbw + link.rx.noise_figure) / 10.0) / n_tones
    return HopPhy(math.sqrt(signal_w), noise_w, hop_pdp(link.fading, cfg.pdp))


def transmit_hop(bits, hop: HopPhy, rng: np.random.Generator, copies: int = 1, shared: bool = False,
                 numerology: OfdmNumerology = DEFAULT_NUMEROLOGY):
    """Send ``bits`` of shape ``(n_trials, n_bits)`` over one hop.

    Returns ``(decided_bits, null_mask)`` where ``null_mask`` flags trials
    whose channel had a spectral null on a data tone.
    """
    n = bits.shape[0]
    tx = ofdm_modulate(bits, numerology) * hop.amplitude  # (n, S, samples)
    n_draws = 1 if (copies == 1 or shared) else copies
    taps = draw_taps(hop.pdp, (n, n_draws), rng)
    rx = convolve_taps(tx[:, None], taps[:, :, None, :])  # (n, draws, S, samples)
    if n_draws < copies:
        rx = np.broadcast_to(rx, (n, copies) + rx.shape[2:])
    if hop.noise_var > 0:
        rx = rx + awgn(rx.shape, hop.noise_var, rng)
    y = data_tones(ofdm_demodulate(rx, numerology), numerology)  # (n, copies, S, 24)
    h = data_tones(frequency_response(taps, numerology.fft_size), numerology)[:, :, None, :]
    bad = null_tones(h).any(axis=(1, 2, 3))
    if copies == 1:
        decided = equalize_and_decide(y[:, 0], h[:, 0])
    else:
        decided = repetition_combine(y[:, 0], y[:, 1], h[:, 0], h[:, -1])
    return decided.reshape(n, -1), bad


def chunk_rng(master_seed: int, dist_idx: int, chunk_idx: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(dist_idx, chunk_idx))
    return np.random.Generator(np.random.PCG64(ss))


def run_chunk(cfg: SimConfig, dist_idx: int, chunk_idx: int, n_trials: int) -> np.ndarray:
    """Error tallies ``[errors, bits, hop1_errors, hop2_errors, discarded]`` for one chunk."""
    rng = chunk_rng(cfg.master_seed, dist_idx, chunk_idx)
    s = cfg.scenario
    distance = cfg.distance_grid[dist_idx]
    bits = rng.integers(0, 2, size=(n_trials, cfg.bits_per_trial), dtype=np.uint8).astype(bool)
    if cfg.hop_flip is not None:
        p1, p2 = cfg.hop_flip
        at_rs = bits ^ (rng.random(bits.shape) < p1)
        at_dst = at_rs ^ (rng.random(bits.shape) < p2)
        bad = np.zeros(n_trials, dtype=bool)
    else:
        links = s.hops()
        dists = [s.ap_rs_distance, s.ap_rs_distance]
        dists[s.swept_hop - 1] = distance
        shared = cfg.repetition_fading == "shared"
        phy1 = hop_phy(links[0], dists[0], cfg)
        phy2 = hop_phy(links[1], dists[1], cfg)
        at_rs, bad1 = transmit_hop(bits, phy1, rng, cfg.copies, shared, cfg.numerology)
        at_dst, bad2 = transmit_hop(at_rs, phy2, rng, cfg.copies, shared, cfg.numerology)
        bad = bad1 | bad2
    keep = ~bad
    n_keep = int(keep.sum())
    return np.array(
        [
            int((at_dst[keep] != bits[keep]).sum()),
            n_keep * cfg.bits_per_trial,
            int((at_rs[keep] != bits[keep]).sum()),
            int((at_dst[keep] != at_rs[keep]).sum()),
            n_trials - n_keep,
        ],
        dtype=np.int64,
    )


def _run_chunk_args(args):
    return run_chunk(*args)


def _estimate_point(cfg: SimConfig, dist_idx: int, executor=None, lookahead: int = 1) -> BerEstimate:
    sizes = cfg.chunk_sizes()
    total = np.zeros(5, dtype=np.int64)
    trials = 0
    pos = 0
    while pos < len(sizes):
        wave = list(range(pos, min(pos + lookahead, len(sizes))))
        jobs = [(cfg, dist_idx, c, sizes[c]) for c in wave]
        results = list(executor.map(_run_chunk_args, jobs)) if executor else [run_chunk(*j) for j in jobs]
        stop = False
        # consume strictly in chunk order so the stopping point is worker-independent
        for c, res in zip(wave, results):
            total += res
            trials += sizes[c]
            if total[0] >= cfg.min_errors:
                stop = True
                break
        if stop:
            break
        pos = wave[-1] + 1
    if total[4]:
        log.warning("discarded %d trials with null channel tones at %.1f m", total[4], cfg.distance_grid[dist_idx])
    return BerEstimate(
        distance=cfg.distance_grid[dist_idx],
        error_count=int(total[0]),
        bit_count=int(total[1]),
        trials=trials,
        hop1_errors=int(total[2]),
        hop2_errors=int(total[3]),
        discarded=int(total[4]),
    )


def simulate_relay(cfg: SimConfig, workers: int = 1) -> List[BerEstimate]:
    """End-to-end BER at every point of ``cfg.distance_grid``."""
    if workers <= 1:
        return [_estimate_point(cfg, i) for i in range(len(cfg.distance_grid))]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return [_estimate_point(cfg, i, ex, lookahead=workers) for i in range(len(cfg.distance_grid))]


@dataclass(frozen=True)
class LinkBer:
    error_count: int
    bit_count: int
    trials: int = 0
    error_sq: int = 0  # sum over trials of (errors in trial)^2

    @property
    def ber(self) -> float:
        return self.error_count / self.bit_count

    @property
    def sigma(self) -> float:
        """Binomial standard error; too small when errors cluster within a trial."""
        p = self.ber
        return math.sqrt(p * (1.0 - p) / self.bit_count)

    @property
    def sigma_trials(self) -> float:
        """Standard error from the spread of per-trial error counts.

        Block fading makes the bits of one trial share a channel, so this is
        the honest yardstick for fading runs.
        """
        n = self.trials
        if n < 2:
            return math.nan
        bits_per_trial = self.bit_count / n
        mean = self.error_count / n
        var = (self.error_sq - n * mean * mean) / (n - 1)
        return math.sqrt(max(var, 0.0) / n) / bits_per_trial


def simulate_link(snr_db: float, pdp: PowerDelayProfile = FLAT, copies: int = 1, trials: int = 100_000,
                  seed: int = 0, symbols_per_trial: int = 1, shared: bool = True,
                  chunk_trials: int = 8192) -> LinkBer:
    """BER of a single OFDM hop at a given mean per-tone SNR (per copy).

    ``pdp`` with ``los_k_db=inf`` and one tap is an AWGN channel; a plain
    single tap is flat Rayleigh block fading.
    """
    hop = HopPhy(1.0, 10.0 ** (-snr_db / 10.0), pdp)
    errors = bits_total = sq = kept = 0
    done = 0
    idx = 0
    while done < trials:
        n = min(chunk_trials, trials - done)
        rng = chunk_rng(seed, 0, idx)
        bits = rng.integers(0, 2, size=(n, 24 * symbols_per_trial), dtype=np.uint8).astype(bool)
        dec, bad = transmit_hop(bits, hop, rng, copies, shared)
        keep = ~bad
        per_trial = (dec[keep] != bits[keep]).sum(axis=1)
        errors += int(per_trial.sum())
        sq += int((per_trial.astype(np.int64) ** 2).sum())
        kept += int(keep.sum())
        bits_total += int(keep.sum()) * bits.shape[1]
        done += n
        idx += 1
    return LinkBer(errors, bits_total, kept, sq)


def measure_tone_snr(link: LinkSpec, distance: float, cfg: SimConfig, trials: int = 20_000, seed: int = 0) -> float:
    """Mean received per-tone SNR (dB) before equalization, from simulated samples."""
    hop = hop_phy(link, distance, cfg)
    rng = chunk_rng(seed, 0, 0)
    bits = rng.integers(0, 2, size=(trials, cfg.bits_per_trial), dtype=np.uint8).astype(bool)
    tx = ofdm_modulate(bits, cfg.numerology) * hop.amplitude
    taps = draw_taps(hop.pdp, (trials,), rng)
    clean = convolve_taps(tx, taps[:, None, :])
    noise = awgn(clean.shape, hop.noise_var, rng)
    sig = data_tones(ofdm_demodulate(clean, cfg.numerology), cfg.numerology)
    nz = data_tones(ofdm_demodulate(noise, cfg.numerology), cfg.numerology)
    return 10.0 * math.log10(np.mean(np.abs(sig) ** 2) / np.mean(np.abs(nz) ** 2))


def predicted_tone_snr_db(link: LinkSpec, distance: float, cfg: SimConfig) -> float:
    """Link-budget SNR: P_rx (no fade margin) over band noise plus noise figure."""
    prx_dbw = received_power(link.tx, link.rx, link.deployment, distance, 0.0) - 30.0
    return prx_dbw - (cfg.noise_power_dbw + link.rx.noise_figure)


CSV_COLUMNS = ("distance_m", "ber", "bits", "ci95")


def format_csv(estimates: Iterable[BerEstimate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for e in estimates:
        w.writerow([repr(e.distance), repr(e.ber), e.bit_count, repr(e.ci_halfwidth)])
    return buf.getvalue()


def write_csv(estimates: Iterable[BerEstimate], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(estimates))
