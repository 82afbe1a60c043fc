"""PAC encoding chain: profile insertion, convolutional precoding, polar transform."""

from __future__ import annotations

import numpy as np

from .rate_profile import CodeSpec


def taps_from_octal(octal: str | int) -> tuple[int, ...]:
    """Binary taps of a connection polynomial written in octal, MSB first.

    '3211' -> (1,1,0,1,0,0,0,1,0,0,1), i.e. memory 10.
    """
    value = int(str(octal), 8)
    if value <= 0:
        raise ValueError("connection polynomial must be nonzero")
    return tuple(int(b) for b in bin(value)[2:])


#: The rate-1 convolutional precoder used throughout the experiments.
CONV_3211 = taps_from_octal("3211")


def insert_profile(data: np.ndarray, spec: CodeSpec) -> np.ndarray:
    """Place the K data bits on the information set, zeros elsewhere."""
    data = np.asarray(data, dtype=np.uint8)
    if len(data) != spec.k_info:
        raise ValueError(f"expected {spec.k_info} data bits, got {len(data)}")
    v = np.zeros(spec.n_code, dtype=np.uint8)
    for bit, i in zip(data, spec.info_set):
        v[i - 1] = bit
    return v


def conv_encode(v: np.ndarray, conn_poly: tuple[int, ...]) -> np.ndarray:
    """Rate-1 convolution u_i = XOR_j c_j v_{i-j}, truncated to length N.

    c_0 = 1 multiplies the current bit, so the map is one-to-one (it equals
    right-multiplication by the upper-triangular Toeplitz matrix of c).
    """
    if not conn_poly or conn_poly[0] != 1:
        raise ValueError("conn_poly must have leading coefficient 1")
    v = np.asarray(v, dtype=np.uint8)
    full = np.convolve(v, np.asarray(conn_poly, dtype=np.int64))
    return (full[: len(v)] & 1).astype(np.uint8)


def polar_transform(u: np.ndarray) -> np.ndarray:
    """x = u F^(kron n) over GF(2) via the in-place butterfly; an involution."""
    u = np.asarray(u, dtype=np.uint8)
    n = len(u)
    if n < 1 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    x = u.copy()
    h = n
    while h > 1:
        half = h // 2
        for start in range(0, n, h):
            x[start:start + half] ^= x[start + half:start + h]
        h = half
    return x


def pac_encode(data: np.ndarray, spec: CodeSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full chain d -> (v, u, x)."""
    v = insert_profile(data, spec)
    u = conv_encode(v, spec.conn_poly)
    x = polar_transform(u)
    return v, u, x
