"""Monte-Carlo experiment driver: FER/ANV curves, computation CCDFs, sweeps.

Every trial draws its codeword data and channel noise from streams keyed by
(master_seed, trial_index, lane), so aggregates are independent of the
execution schedule and adding trials never changes earlier per-trial
outcomes.  Trials are independent work items merged by integer addition.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .channel import DATA_LANE, NOISE_LANE, SnrSpec, snr_to_sigma2, trial_rng
from .construction import cached_table
from .encoder import CONV_3211
from .fano import DecodeRecord, FanoConfig, _fano_decode
from .metric import build_bias, genie_drift
from .rate_profile import CodeSpec, partial_rates, rm_profile
from .sc_demapper import LLR_CAP

#: CCDF abscissas: 20 log-spaced points per decade over 1..10^4.
CCDF_EDGES = 10.0 ** (np.arange(0, 81) / 20.0)

_UNLIMITED = np.int64(2 ** 62)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: code, operating points, metric rule, decoder knobs."""

    n_code: int = 128
    k_info: int = 64
    snr_db_list: tuple[float, ...] = (2.5,)
    convention: str = "EbN0"
    rule: str = "cutoff_scaled"
    alpha: float = 1.0
    b_info: float | None = None
    b_frozen: float = 0.0
    delta: float = 2.0
    mnv: int | None = None
    trials: int = 10000
    target_errors: int | None = 100
    master_seed: int = 1
    threads: int = 1
    noiseless: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.snr_db_list:
            raise ValueError("snr list must be nonempty")

    def code_spec(self) -> CodeSpec:
        info = rm_profile(self.n_code, self.k_info)
        return CodeSpec(n_code=self.n_code, k_info=self.k_info,
                        info_set=info, conn_poly=CONV_3211)


@dataclass
class AggregateStats:
    """Order-independent per-operating-point counters and derived figures."""

    snr_db: float
    convention: str
    rule: str
    alpha: float
    delta: float
    mnv: int | None
    frames: int = 0
    frame_errors: int = 0
    mnv_hits: int = 0
    sum_visits: int = 0
    sum_visits_sq: float = 0.0
    frames_correct: int = 0
    sum_visits_correct: int = 0
    hist_c: np.ndarray = field(default_factory=lambda: np.zeros(len(CCDF_EDGES) + 1, dtype=np.int64))
    hist_c1: np.ndarray = field(default_factory=lambda: np.zeros(len(CCDF_EDGES) + 1, dtype=np.int64))
    sum_c1_correct: int = 0
    n_code: int = 128
    r_over_r0: float = float("nan")

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else float("nan")

    @property
    def anv(self) -> float:
        return self.sum_visits / (self.frames * self.n_code) if self.frames else float("nan")

    @property
    def anv_se(self) -> float:
        if self.frames < 2:
            return float("nan")
        mean = self.sum_visits / self.frames
        var = max(self.sum_visits_sq / self.frames - mean * mean, 0.0)
        return math.sqrt(var / self.frames) / self.n_code

    @property
    def anv_correct(self) -> float:
        if not self.frames_correct:
            return float("nan")
        return self.sum_visits_correct / (self.frames_correct * self.n_code)

    @property
    def mean_c1_correct(self) -> float:
        return self.sum_c1_correct / self.frames_correct if self.frames_correct else float("nan")

    def ccdf_empirical(self) -> np.ndarray:
        """P(C > L) over correct frames at each entry of CCDF_EDGES."""
        if not self.frames_correct:
            return np.full(len(CCDF_EDGES), float("nan"))
        above = np.cumsum(self.hist_c[::-1])[::-1]
        return above[1:] / self.frames_correct

    def ccdf_c1_empirical(self) -> np.ndarray:
        """P(C_1 >= L) over correct frames at each entry of CCDF_EDGES."""
        if not self.frames_correct:
            return np.full(len(CCDF_EDGES), float("nan"))
        above = np.cumsum(self.hist_c1[::-1])[::-1]
        return above[1:] / self.frames_correct

    def merge_arrays(self, err: bool, visits: int, hit: bool, c1: int) -> None:
        self.frames += 1
        self.frame_errors += int(err)
        self.mnv_hits += int(hit)
        self.sum_visits += visits
        self.sum_visits_sq += float(visits) ** 2
        if not err:
            self.frames_correct += 1
            self.sum_visits_correct += visits
            c_val = visits / self.n_code
            # bin by "edges strictly below C" so the C-CCDF is a strict P(C > L);
            # the C1 histogram keeps exact-edge hits, matching P(C1 >= L)
            self.hist_c[int(np.searchsorted(CCDF_EDGES, c_val, side="left"))] += 1
            self.hist_c1[int(np.searchsorted(CCDF_EDGES, float(c1), side="right"))] += 1
            self.sum_c1_correct += c1


@dataclass(frozen=True)
class RunPoint:
    """Fully-resolved inputs of one simulation point (picklable)."""

    spec: CodeSpec
    info_idx: np.ndarray
    info_mask: np.ndarray
    taps: np.ndarray
    bias: np.ndarray
    delta: float
    mnv: int | None
    sigma2: float
    master_seed: int
    noiseless: bool


@njit(cache=True)
def _trial_decode(data_bits, noise, sigma2, noiseless, info_idx, info_mask,
                  taps, bias, delta, mnv, v_true, u_true, x, llrs, v_hat,
                  u_hat, visits_by_depth, gamma_path, zval, ranks, work, wa):
    n = info_mask.shape[0]
    # encode: profile insertion, convolution, polar butterfly
    for i in range(n):
        v_true[i] = 0
    for j in range(info_idx.shape[0]):
        v_true[info_idx[j]] = data_bits[j]
    m = taps.shape[0]
    for i in range(n):
        acc = np.uint8(0)
        jmax = i if i < m - 1 else m - 1
        for j in range(jmax + 1):
            if taps[j]:
                acc ^= v_true[i - j]
        u_true[i] = acc
    for i in range(n):
        x[i] = u_true[i]
    h = n
    while h > 1:
        half = h // 2
        start = 0
        while start < n:
            for j in range(start, start + half):
                x[j] ^= x[j + half]
            start += h
        h = half
    # channel LLRs
    if noiseless:
        for i in range(n):
            llrs[i] = LLR_CAP if x[i] == 0 else -LLR_CAP
    else:
        for i in range(n):
            val = 2.0 * ((1.0 - 2.0 * x[i]) + noise[i]) / sigma2
            if val > LLR_CAP:
                val = LLR_CAP
            elif val < -LLR_CAP:
                val = -LLR_CAP
            llrs[i] = val
    visits, hit = _fano_decode(llrs, info_mask, taps, bias, delta, mnv, v_hat,
                               u_hat, visits_by_depth, gamma_path, zval, ranks,
                               work, wa)
    err = False
    for i in range(n):
        if v_hat[i] != v_true[i]:
            err = True
            break
    return err, visits, hit, visits_by_depth[0]


class _TrialRunner:
    """Reusable buffers + per-trial entry point for one RunPoint."""

    def __init__(self, point: RunPoint):
        n = point.spec.n_code
        self.point = point
        self.n = n
        self.k = point.spec.k_info
        self.v_true = np.zeros(n, dtype=np.uint8)
        self.u_true = np.zeros(n, dtype=np.uint8)
        self.x = np.zeros(n, dtype=np.uint8)
        self.v_hat = np.zeros(n, dtype=np.uint8)
        self.llrs = np.zeros(n, dtype=np.float64)
        self.u_hat = np.zeros(n, dtype=np.uint8)
        self.visits_by_depth = np.zeros(n, dtype=np.int64)
        self.gamma_path = np.zeros(n + 1, dtype=np.float64)
        self.zval = np.zeros(n, dtype=np.float64)
        self.ranks = np.zeros(n, dtype=np.int8)
        self.work = np.empty(n, dtype=np.float64)
        self.wa = np.empty(n, dtype=np.uint8)
        self.sigma = math.sqrt(point.sigma2)
        self.mnv = _UNLIMITED if point.mnv is None else np.int64(point.mnv)

    def run(self, trial_index: int):
        p = self.point
        data = trial_rng(p.master_seed, trial_index, DATA_LANE).integers(
            0, 2, self.k).astype(np.uint8)
        if p.noiseless:
            noise = self.llrs  # unused by the kernel in noiseless mode
        else:
            noise = trial_rng(p.master_seed, trial_index, NOISE_LANE).normal(
                0.0, self.sigma, self.n)
        return _trial_decode(data, noise, p.sigma2, p.noiseless, p.info_idx,
                             p.info_mask, p.taps, p.bias, p.delta, self.mnv,
                             self.v_true, self.u_true, self.x, self.llrs,
                             self.v_hat, self.u_hat, self.visits_by_depth,
                             self.gamma_path, self.zval, self.ranks,
                             self.work, self.wa)


def _chunk_worker(args):
    point, start, count = args
    runner = _TrialRunner(point)
    out = np.empty((count, 4), dtype=np.int64)
    for k in range(count):
        err, visits, hit, c1 = runner.run(start + k)
        out[k, 0] = int(err)
        out[k, 1] = visits
        out[k, 2] = int(hit)
        out[k, 3] = c1
    return out


def make_run_point(config: ExperimentConfig, snr_db: float,
                   alpha: float | None = None,
                   delta: float | None = None) -> RunPoint:
    """Resolve a config + operating point into concrete simulation inputs."""
    spec = config.code_spec()
    snr = SnrSpec(snr_db=snr_db, rate=spec.rate, convention=config.convention)
    sigma2 = snr_to_sigma2(snr)
    table = cached_table(config.n_code, snr_db, spec.rate, config.convention)
    schedule = build_bias(config.rule, table, spec,
                          alpha=config.alpha if alpha is None else alpha,
                          b_info=config.b_info, b_frozen=config.b_frozen)
    return RunPoint(spec=spec,
                    info_idx=np.array([i - 1 for i in spec.info_set], dtype=np.int64),
                    info_mask=spec.info_mask(),
                    taps=np.asarray(spec.conn_poly, dtype=np.uint8),
                    bias=np.asarray(schedule.b, dtype=np.float64),
                    delta=float(config.delta if delta is None else delta),
                    mnv=config.mnv, sigma2=sigma2,
                    master_seed=config.master_seed, noiseless=config.noiseless)


def run_point(point: RunPoint, trials: int, target_errors: int | None,
              threads: int, stats: AggregateStats,
              keep_records: bool = False) -> list[tuple[int, int, int, int]] | None:
    """Execute trials 0..trials-1, merging in trial order; optional early stop."""
    chunk = max(250, min(5000, trials // max(1, threads * 8)))
    starts = list(range(0, trials, chunk))
    records = [] if keep_records else None

    def consume(block: np.ndarray) -> bool:
        for row in block:
            stats.merge_arrays(bool(row[0]), int(row[1]), bool(row[2]), int(row[3]))
            if records is not None:
                records.append((int(row[0]), int(row[1]), int(row[2]), int(row[3])))
            if target_errors is not None and stats.frame_errors >= target_errors:
                return True
        return False

    if threads <= 1:
        runner = _TrialRunner(point)
        for s in starts:
            count = min(chunk, trials - s)
            block = np.empty((count, 4), dtype=np.int64)
            for k in range(count):
                err, visits, hit, c1 = runner.run(s + k)
                block[k] = (int(err), visits, int(hit), c1)
            if consume(block):
                break
        return records
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_chunk_worker, (point, s, min(chunk, trials - s)))
                   for s in starts]
        for fut in futures:  # merge strictly in submission order
            if consume(fut.result()):
                for other in futures:
                    other.cancel()
                break
    return records


def run_fer(config: ExperimentConfig) -> list[AggregateStats]:
    """FER/ANV at every configured SNR; deterministic given master_seed."""
    results = []
    for snr_db in config.snr_db_list:
        point = make_run_point(config, snr_db)
        stats = AggregateStats(snr_db=snr_db, convention=config.convention,
                               rule=config.rule, alpha=config.alpha,
                               delta=point.delta, mnv=config.mnv,
                               n_code=config.n_code)
        stats.r_over_r0 = point.spec.rate / channel_cutoff_rate(point.sigma2)
        run_point(point, config.trials, config.target_errors,
                  config.threads, stats)
        results.append(stats)
    return results


def channel_cutoff_rate(sigma2: float) -> float:
    """R0 of the unpolarized channel: log2(2/(1 + e^(-1/(2 sigma2))))."""
    return math.log2(2.0 / (1.0 + math.exp(-1.0 / (2.0 * sigma2))))


def run_ccdf(config: ExperimentConfig, r: float = 0.5):
    """Empirical computation CCDF per SNR with the L^-1 and Pareto overlays."""
    from .bounds import bounds_summary

    rows = []
    stats_list = run_fer(config)
    spec = config.code_spec()
    rates = partial_rates(spec.info_set, spec.n_code)
    for stats in stats_list:
        table = cached_table(config.n_code, stats.snr_db, spec.rate, config.convention)
        schedule = build_bias(config.rule, table, spec, alpha=config.alpha,
                              b_info=config.b_info, b_frozen=config.b_frozen)
        summary = bounds_summary(r, schedule, table, rates)
        bound_ok = summary["epsilon_valid"] and summary["beta"] > 1
        emp = stats.ccdf_empirical()
        for k, big_l in enumerate(CCDF_EDGES):
            if bound_ok:
                from .bounds import pareto_ccdf_bound
                bound = pareto_ccdf_bound(float(big_l), summary["beta"], summary["epsilon"])
            else:
                bound = float("nan")
            rows.append((stats.snr_db, float(big_l), float(emp[k]), bound,
                         min(1.0, 1.0 / float(big_l))))
    return stats_list, rows


def run_sweep(config: ExperimentConfig, variable: str, grid):
    """FER/ANV against alpha or delta with common random numbers."""
    if variable not in ("alpha", "delta"):
        raise ValueError("variable must be 'alpha' or 'delta'")
    if len(config.snr_db_list) != 1:
        raise ValueError("sweeps run at a single SNR")
    snr_db = config.snr_db_list[0]
    out = []
    for value in grid:
        point = make_run_point(config, snr_db,
                               alpha=value if variable == "alpha" else None,
                               delta=value if variable == "delta" else None)
        stats = AggregateStats(snr_db=snr_db, convention=config.convention,
                               rule=config.rule,
                               alpha=value if variable == "alpha" else config.alpha,
                               delta=point.delta, mnv=config.mnv,
                               n_code=config.n_code)
        run_point(point, config.trials, config.target_errors, config.threads, stats)
        out.append((variable, float(value), stats))
    return out


def run_r_over_r0(config: ExperimentConfig):
    """(R/R0, correct-frame ANV) pairs across the SNR grid."""
    rows = []
    for stats in run_fer(config):
        sigma2 = snr_to_sigma2(SnrSpec(snr_db=stats.snr_db,
                                       rate=config.k_info / config.n_code,
                                       convention=config.convention))
        r0 = channel_cutoff_rate(sigma2)
        rows.append((stats.snr_db, (config.k_info / config.n_code) / r0,
                     stats.anv_correct, stats))
    return rows


def run_trace(config: ExperimentConfig, n_samples: int):
    """Partial-path-metric trajectories along the finally accepted paths."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if len(config.snr_db_list) != 1:
        raise ValueError("traces run at a single SNR")
    point = make_run_point(config, config.snr_db_list[0])
    runner = _TrialRunner(point)
    traces = np.empty((n_samples, point.spec.n_code + 1))
    for t in range(n_samples):
        runner.run(t)
        traces[t] = runner.gamma_path
    return traces


def run_drift(config: ExperimentConfig, trials: int):
    """Genie-aided drift statistics at the first configured SNR."""
    snr_db = config.snr_db_list[0]
    spec = config.code_spec()
    table = cached_table(config.n_code, snr_db, spec.rate, config.convention)
    schedule = build_bias(config.rule, table, spec, alpha=config.alpha,
                          b_info=config.b_info, b_frozen=config.b_frozen)
    snr = SnrSpec(snr_db=snr_db, rate=spec.rate, convention=config.convention)
    return genie_drift(table, schedule, spec, snr, trials, config.master_seed)


# ---------------------------------------------------------------------------
# CSV writers (schemas are fixed; see the per-command documentation)
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def write_fer_csv(stats_list, path: str) -> None:
    with open(path, "w") as f:
        f.write("snr_db,convention,rule,alpha,delta,mnv,frames,errors,fer,anv,mnv_hits\n")
        for s in stats_list:
            mnv = "inf" if s.mnv is None else s.mnv
            f.write(",".join(_fmt(x) for x in (
                s.snr_db, s.convention, s.rule, s.alpha, s.delta, mnv,
                s.frames, s.frame_errors, s.fer, s.anv, s.mnv_hits)) + "\n")


def write_ccdf_csv(rows, path: str) -> None:
    with open(path, "w") as f:
        f.write("snr_db,L,ccdf_empirical,ccdf_bound,ccdf_Linv\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def write_sweep_csv(rows, path: str) -> None:
    with open(path, "w") as f:
        f.write("variable,value,fer,anv\n")
        for variable, value, stats in rows:
            f.write(f"{variable},{_fmt(value)},{_fmt(stats.fer)},{_fmt(stats.anv)}\n")


def write_trace_csv(traces: np.ndarray, path: str) -> None:
    with open(path, "w") as f:
        f.write("sample,depth,gamma\n")
        for s in range(traces.shape[0]):
            for d in range(traces.shape[1]):
                f.write(f"{s},{d},{_fmt(float(traces[s, d]))}\n")


def write_drift_csv(drift, path: str) -> None:
    with open(path, "w") as f:
        f.write("index,is_info,bias,mean_correct,se_correct,mean_wrong,se_wrong\n")
        for i in range(len(drift.bias)):
            f.write(",".join(_fmt(x) for x in (
                i + 1, int(drift.is_info[i]), float(drift.bias[i]),
                float(drift.mean_correct[i]), float(drift.se_correct[i]),
                float(drift.mean_wrong[i]), float(drift.se_wrong[i]))) + "\n")
