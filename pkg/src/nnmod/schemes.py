"""Concrete modulation schemes instantiated on the synthesis template.

Single-carrier amplitude/phase schemes configure the kernels with a real
pulse-shaping filter and collapse to the simplified two-channel graph. OFDM
uses the complex exponential basis phi_i[n] = exp(j 2 pi n i / N) with stride
N, keeping the synthesis free of any 1/N factor (the demodulator applies it).

Gray maps: each axis of a square QAM constellation carries half the bits with
binary-reflected gray coding, bit value 0 on the positive side:

    1 bit/axis:   0 -> +1,  1 -> -1
    2 bits/axis:  00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3
    3 bits/axis:  000 -> +7, 001 -> +5, 011 -> +3, 010 -> +1,
                  110 -> -1, 111 -> -3, 101 -> -5, 100 -> -7

Levels are scaled for unit average symbol energy. The first half of a
symbol's bits selects the I level, the second half the Q level; BPSK uses the
I axis alone.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .engine import (
    CombineLayer,
    SynthGraph,
    TransposedConvLayer,
    build_template_graph,
    simplify,
)
from .iqcore import StructuralError, SymbolFrame


class PulseFamily(enum.Enum):
    RECTANGULAR = "rectangular"
    HALF_SINE = "half-sine"
    ROOT_RAISED_COSINE = "root-raised-cosine"


@dataclass(frozen=True)
class PulseShape:
    """Unit-energy real pulse taps plus the stride they were designed for."""

    taps: np.ndarray
    samples_per_symbol: int
    family: PulseFamily
    beta: float | None = None
    span_symbols: int | None = None

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        if not np.all(np.isfinite(taps)):
            raise StructuralError("pulse taps contain non-finite values")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)


def _normalized(taps: np.ndarray) -> np.ndarray:
    return taps / np.linalg.norm(taps)


def rectangular_pulse(samples_per_symbol: int) -> PulseShape:
    taps = _normalized(np.ones(samples_per_symbol))
    return PulseShape(taps, samples_per_symbol, PulseFamily.RECTANGULAR)


def half_sine_pulse(samples_per_symbol: int) -> PulseShape:
    """p[n] = sin(pi (n + 0.5) / L): symmetric, no dead endpoint sample."""
    n = np.arange(samples_per_symbol)
    taps = np.sin(np.pi * (n + 0.5) / samples_per_symbol)
    return PulseShape(_normalized(taps), samples_per_symbol, PulseFamily.HALF_SINE)


def root_raised_cosine_pulse(
    samples_per_symbol: int, beta: float = 0.35, span_symbols: int = 8
) -> PulseShape:
    """Closed-form RRC taps over span_symbols symbols (odd count span*L + 1).

    The removable singularities at t = 0 and |t| = 1/(4 beta) are replaced by
    their analytic limits.
    """
    if not 0.0 < beta <= 1.0:
        raise StructuralError("beta must lie in (0, 1]")
    L = samples_per_symbol
    count = span_symbols * L + 1
    t = (np.arange(count) - (count - 1) / 2) / L  # in symbol durations
    taps = np.empty(count)
    singular = 1.0 / (4.0 * beta)
    for idx, ti in enumerate(t):
        if abs(ti) < 1e-12:
            taps[idx] = (1.0 - beta) + 4.0 * beta / np.pi
        elif abs(abs(ti) - singular) < 1e-12:
            taps[idx] = (beta / np.sqrt(2.0)) * (
                (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
                + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
            )
        else:
            num = np.sin(np.pi * ti * (1.0 - beta)) + 4.0 * beta * ti * np.cos(
                np.pi * ti * (1.0 + beta)
            )
            den = np.pi * ti * (1.0 - (4.0 * beta * ti) ** 2)
            taps[idx] = num / den
    return PulseShape(
        _normalized(taps),
        samples_per_symbol,
        PulseFamily.ROOT_RAISED_COSINE,
        beta=beta,
        span_symbols=span_symbols,
    )


@dataclass(frozen=True)
class Constellation:
    """Gray-labelled constellation with unit average energy.

    ``points[label]`` is the point whose bit pattern equals the label's binary
    expansion (MSB first).
    """

    order: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if len(pts) != self.order:
            raise StructuralError("points length must equal the order")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def bits_per_symbol(self) -> int:
        return int(round(math.log2(self.order)))


def _gray_levels(bits: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis amplitude levels and the gray label of each level index."""
    m = 1 << bits
    gray = np.array([i ^ (i >> 1) for i in range(m)])
    # level index 0 is the most positive amplitude so that the all-zero
    # label sits in the first quadrant
    levels = np.array([m - 1 - 2 * i for i in range(m)], dtype=np.float64)
    return levels, gray


def bpsk() -> Constellation:
    return Constellation(2, np.array([1.0 + 0.0j, -1.0 + 0.0j]))


def square_qam(order: int) -> Constellation:
    """Gray-coded square QAM (4, 16, 64) with unit average energy."""
    if order not in (4, 16, 64):
        raise StructuralError("square QAM supports orders 4, 16 and 64")
    bits_axis = int(round(math.log2(order))) // 2
    levels, gray = _gray_levels(bits_axis)
    scale = math.sqrt(3.0 / (2.0 * (order - 1)))
    points = np.empty(order, dtype=np.complex128)
    m = 1 << bits_axis
    for i_idx in range(m):
        for q_idx in range(m):
            label = (int(gray[i_idx]) << bits_axis) | int(gray[q_idx])
            points[label] = scale * (levels[i_idx] + 1j * levels[q_idx])
    return Constellation(order, points)


def constellation(order: int) -> Constellation:
    return bpsk() if order == 2 else square_qam(order)


def map_bits(const: Constellation, bits) -> SymbolFrame:
    """Group consecutive log2(M) bits and map them to labelled points."""
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if np.any((bits != 0) & (bits != 1)):
        raise StructuralError("bits must be 0 or 1")
    k = const.bits_per_symbol
    if len(bits) % k:
        raise StructuralError(f"bit count must be divisible by {k}")
    groups = bits.reshape(-1, k)
    weights = 1 << np.arange(k - 1, -1, -1)
    labels = groups @ weights
    return SymbolFrame.from_symbols(const.points[labels])


def demap_symbols(const: Constellation, received: SymbolFrame) -> np.ndarray:
    """Minimum-distance decisions, ties resolved to the lowest label."""
    if received.dimension != 1:
        raise StructuralError("demap expects dimension-1 frames")
    sym = received.vectors[:, 0]
    d2 = np.abs(sym[:, None] - const.points[None, :]) ** 2
    labels = np.argmin(d2, axis=1)  # argmin takes the first (lowest) label
    k = const.bits_per_symbol
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).astype(np.int64).ravel()


def build_linear_modulator(pulse: PulseShape) -> SynthGraph:
    """Single-carrier graph: I/Q rails each filtered by the real pulse.

    Returned pre-simplified (2 channels, no combine layer) since the
    imaginary-part kernels of a real pulse are identically zero.
    """
    taps = pulse.taps.reshape(1, -1)
    full = build_template_graph(taps, np.zeros_like(taps), pulse.samples_per_symbol)
    return simplify(full)


def build_ofdm_modulator(num_subcarriers: int) -> SynthGraph:
    """OFDM graph: kernels are Re/Im of exp(j 2 pi n i / N), stride N."""
    if num_subcarriers < 2:
        raise StructuralError("OFDM needs at least 2 subcarriers")
    n = np.arange(num_subcarriers)
    phase = 2.0 * np.pi * np.outer(n, n) / num_subcarriers  # [i, n] symmetric
    return build_template_graph(
        np.cos(phase), np.sin(phase), stride=num_subcarriers
    )
