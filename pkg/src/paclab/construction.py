"""Bit-channel construction for the polarized BI-AWGN channel.

Two independent Gaussian-approximation recursions run down the polarization
tree in natural (bit-reversal-free) order:

* a capacity recursion based on the J function of the channel-output LLR,
* a mean recursion based on the phi function of the LLR density,

from which the per-index Bhattacharyya parameters and cutoff rates follow in
closed form.  A general-rho error exponent is evaluated by direct quadrature.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

# Coefficients of the standard closed-form J(t) approximation.
_J_A = 0.3073
_J_B = 0.8935
_J_C = 1.1064

_CAP_EPS = 1e-15  # keep capacities away from the J-inverse singularities

_PHI_TOL = 1e-12
_PHI_INV_TOL = 1e-10
_E0_QUAD_TOL = 1e-8


class QuadratureError(RuntimeError):
    """Raised when a numeric quadrature fails to meet its tolerance."""


@dataclass(frozen=True)
class ChannelParams:
    """BI-AWGN channel with BPSK signalling at unit symbol energy."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def llr_mean(self) -> float:
        """Mean of the channel-output LLR (nats)."""
        return 2.0 / self.sigma2


def j_fun(t):
    """Capacity of a BI-AWGN channel whose LLR has standard deviation t.

    Closed-form approximation; monotone nondecreasing, j_fun(0) = 0 and
    j_fun(t) -> 1 as t grows.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("j_fun requires t >= 0")
    out = (1.0 - 2.0 ** (-_J_A * t ** (2.0 * _J_B))) ** _J_C
    return float(out) if out.ndim == 0 else out


def j_inv(c):
    """Inverse of :func:`j_fun` on capacities in [0, 1); j_inv(1) = inf.

    Near c = 1 the capacity chart runs out of float64 resolution (j_fun
    saturates to 1.0 beyond t ~ 18); use the complement pair
    :func:`jc_fun` / :func:`jc_inv` there.
    """
    c = np.asarray(c, dtype=float)
    if np.any((c < 0) | (c > 1)):
        raise ValueError("j_inv requires capacity in [0, 1]")
    with np.errstate(divide="ignore"):
        out = (-np.log2(1.0 - c ** (1.0 / _J_C)) / _J_A) ** (1.0 / (2.0 * _J_B))
    return float(out) if out.ndim == 0 else out


def jc_fun(t):
    """Complement chart 1 - j_fun(t), computed without cancellation.

    Keeps full relative precision however close the capacity is to one,
    which the capacity recursion needs for its 1 - J(sqrt(2) Jinv(1 - t))
    check operation.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("jc_fun requires t >= 0")
    d0 = 2.0 ** (-_J_A * t ** (2.0 * _J_B))
    out = -np.expm1(_J_C * np.log1p(-d0))
    return float(out) if out.ndim == 0 else out


def jc_inv(d):
    """Inverse of :func:`jc_fun` on complements in (0, 1]."""
    d = np.asarray(d, dtype=float)
    if np.any((d <= 0) | (d > 1)):
        raise ValueError("jc_inv requires complement in (0, 1]")
    d0 = -np.expm1(np.log1p(-d) / _J_C)
    out = (-np.log2(d0) / _J_A) ** (1.0 / (2.0 * _J_B))
    return float(out) if out.ndim == 0 else out


def j_fun_exact(t: float, n_points: int = 200001) -> float:
    """Trapezoid quadrature of the defining J integral over u in [-40, 40].

    Slow reference used to validate the closed form.
    """
    if t <= 0:
        return 0.0
    u = np.linspace(-40.0, 40.0, n_points)
    pdf = np.exp(-((u - t * t / 2.0) ** 2) / (2.0 * t * t)) / math.sqrt(2.0 * math.pi * t * t)
    return 1.0 - float(np.trapezoid(pdf * np.log2(1.0 + np.exp(-u)), u))


def _fc_cap(t: float) -> float:
    # 1 - J(sqrt(2) Jinv(1 - t)) via the complement chart: the inner 1 - t is
    # a capacity near one exactly when the outer result is near zero.
    t = min(max(t, 0.0), 1.0 - _CAP_EPS)
    return jc_fun(math.sqrt(2.0) * jc_inv(t)) if t > 0 else 0.0


def _fv_cap(t: float) -> float:
    t = min(max(t, 0.0), 1.0 - _CAP_EPS)
    return j_fun(math.sqrt(2.0) * j_inv(t))


def capacity_recursion(channel: ChannelParams, n_code: int) -> np.ndarray:
    """Bit-channel capacities I(W_N^(i)) in natural order u_1..u_N.

    The root holds I(W) = J(2/sigma); each level replaces every node value t
    with the pair (check, bit) = (f_c(t), f_v(t)), children interleaved so
    that index i-1 read MSB-first gives the operation sequence from the root.
    """
    _check_block_length(n_code)
    t_root = 2.0 / math.sqrt(channel.sigma2)  # std. dev. of the channel LLR
    values = [j_fun(t_root)]
    while len(values) < n_code:
        nxt = []
        for t in values:
            nxt.append(_fc_cap(t))
            nxt.append(_fv_cap(t))
        values = nxt
    return np.array(values)


def phi_fun(t: float) -> float:
    """E[1 - tanh(z/2)] for z ~ N(t, 2t); equals 1 at t = 0, decays to 0.

    Adaptive trapezoid on z in [t - 12*sqrt(2t), t + 12*sqrt(2t)].  The
    deficit form (integrating 1 - tanh rather than tanh) avoids the
    catastrophic cancellation of 1 - integral once phi is tiny.
    """
    if t <= 0:
        return 1.0
    half_width = 12.0 * math.sqrt(2.0 * t)
    lo, hi = t - half_width, t + half_width
    norm = 1.0 / math.sqrt(4.0 * math.pi * t)

    def evaluate(n: int) -> float:
        z = np.linspace(lo, hi, n)
        # 1 - tanh(z/2) = 2/(1+e^z), computed without overflow
        deficit = 2.0 / (1.0 + np.exp(np.minimum(z, 700.0)))
        w = np.exp(-((z - t) ** 2) / (4.0 * t))
        return norm * float(np.trapezoid(deficit * w, z))

    n = 1025
    prev = evaluate(n)
    for _ in range(6):
        n = 2 * n - 1
        cur = evaluate(n)
        if abs(cur - prev) <= _PHI_TOL * max(1.0, abs(cur)):
            prev = cur
            break
        prev = cur
    return min(max(prev, 0.0), 1.0)


def phi_inv(y: float) -> float:
    """Inverse of :func:`phi_fun` by bisection on a bracketing interval."""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"phi_inv requires y in [0, 1], got {y}")
    if y >= 1.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while phi_fun(hi) > y:
        hi *= 2.0
        if hi > 1e9:
            raise ValueError(f"phi_inv bracket expansion failed for y={y}")
    while hi - lo > _PHI_INV_TOL:
        mid = 0.5 * (lo + hi)
        if phi_fun(mid) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _fc_mean(m: float) -> float:
    p = phi_fun(m)
    return phi_inv(min(1.0, 2.0 * p - p * p))


def mean_evolution(channel: ChannelParams, n_code: int) -> np.ndarray:
    """Bit-channel LLR means m_N^(i) in natural order.

    Root m = 2/sigma2; check op m -> phi_inv(1 - (1 - phi(m))^2), bit op
    m -> 2m, children interleaved exactly as in the capacity recursion.
    """
    _check_block_length(n_code)
    values = [channel.llr_mean]
    while len(values) < n_code:
        nxt = []
        for m in values:
            nxt.append(_fc_mean(m))
            nxt.append(2.0 * m)
        values = nxt
    return np.array(values)


def z_and_cutoff(means: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bhattacharyya Z_i = exp(-m_i/4) and cutoff E0_i = log2(2/(1+Z_i))."""
    means = np.asarray(means, dtype=float)
    if np.any(means < 0):
        raise ValueError("means must be nonnegative")
    z = np.exp(-means / 4.0)
    e0 = np.log2(2.0 / (1.0 + z))
    return z, e0


def e0_rho(mean: float, rho: float) -> float:
    """Gallager error exponent E0(rho) of the bit channel with LLR mean `mean`.

    The channel is the BI-AWGN channel with noise variance 2/mean and uniform
    inputs; the defining integral is evaluated by 1-D quadrature in the
    noise-normalized variable.  E0(0) = 0 and E0(1) matches the closed form
    log2(2/(1 + exp(-mean/4))).
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if mean < 0:
        raise ValueError("mean must be nonnegative")
    if rho == 0.0 or mean == 0.0:
        return 0.0
    s = 1.0 / (1.0 + rho)
    a = math.sqrt(mean / 2.0)  # 1/sigma

    def integrand(v):
        e0_ = np.exp(-s * (v - a) ** 2 / 2.0)
        e1_ = np.exp(-s * (v + a) ** 2 / 2.0)
        return (0.5 * e0_ + 0.5 * e1_) ** (1.0 + rho) / math.sqrt(2.0 * math.pi)

    width = a + 12.0 * math.sqrt(1.0 + rho) + 5.0
    val, err = quad(integrand, -width, width, epsabs=1e-13, epsrel=1e-11, limit=400)
    if err > _E0_QUAD_TOL:
        raise QuadratureError(f"E0 quadrature error {err:.3g} exceeds {_E0_QUAD_TOL}")
    return -math.log2(val)


@dataclass(frozen=True)
class BitChannelTable:
    """Per-index construction outputs for one (N, SNR) operating point."""

    n_code: int
    capacity: np.ndarray
    mean: np.ndarray
    bhattacharyya: np.ndarray
    cutoff: np.ndarray
    design_snr_db: float
    snr_convention: str  # "EbN0" or "EsN0"

    def __post_init__(self):
        for name in ("capacity", "mean", "bhattacharyya", "cutoff"):
            if len(getattr(self, name)) != self.n_code:
                raise ValueError(f"{name} must have length {self.n_code}")


def build_table(n_code: int, snr_db: float, rate: float,
                convention: str = "EbN0") -> BitChannelTable:
    """Run both recursions for one operating point and assemble the table."""
    from .channel import SnrSpec, snr_to_sigma2

    sigma2 = snr_to_sigma2(SnrSpec(snr_db=snr_db, rate=rate, convention=convention))
    ch = ChannelParams(sigma2=sigma2)
    cap = capacity_recursion(ch, n_code)
    means = mean_evolution(ch, n_code)
    z, e0 = z_and_cutoff(means)
    return BitChannelTable(n_code=n_code, capacity=cap, mean=means,
                           bhattacharyya=z, cutoff=e0,
                           design_snr_db=snr_db, snr_convention=convention)


def save_table(table: BitChannelTable, rate: float, path: str) -> None:
    """Write the cache file: one header line, then one CSV row per index."""
    with open(path, "w") as f:
        f.write(f"{table.n_code},{table.design_snr_db:.12g},"
                f"{table.snr_convention},{rate:.12g}\n")
        for i in range(table.n_code):
            f.write(f"{i + 1},{table.capacity[i]:.12g},{table.mean[i]:.12g},"
                    f"{table.bhattacharyya[i]:.12g},{table.cutoff[i]:.12g}\n")


def load_table(path: str) -> BitChannelTable:
    with open(path) as f:
        n_code_s, snr_s, conv, _rate = f.readline().strip().split(",")
        n_code = int(n_code_s)
        rows = np.loadtxt(f, delimiter=",").reshape(n_code, 5)
    return BitChannelTable(n_code=n_code, capacity=rows[:, 1], mean=rows[:, 2],
                           bhattacharyya=rows[:, 3], cutoff=rows[:, 4],
                           design_snr_db=float(snr_s), snr_convention=conv)


def default_cache_dir() -> str:
    return os.environ.get(
        "PACLAB_CACHE", os.path.join(os.path.expanduser("~"), ".cache", "paclab"))


def cached_table(n_code: int, snr_db: float, rate: float,
                 convention: str = "EbN0", cache_dir: str | None = None) -> BitChannelTable:
    """Like :func:`build_table` but backed by the on-disk cache."""
    cache_dir = cache_dir or default_cache_dir()
    os.makedirs(cache_dir, exist_ok=True)
    key = f"table_N{n_code}_snr{snr_db:.6g}_{convention}_R{rate:.6g}.csv"
    path = os.path.join(cache_dir, key)
    if os.path.exists(path):
        return load_table(path)
    table = build_table(n_code, snr_db, rate, convention)
    save_table(table, rate, path)
    return table


def _check_block_length(n_code: int) -> None:
    if n_code < 1 or n_code & (n_code - 1):
        raise ValueError(f"block length must be a power of two, got {n_code}")
