"""The modulator template: grouped strided transposed convolution + combine.

The graph maps a [2N, T] real tensor of symbol components to I/Q rails. The
transposed convolution places a kernel copy every ``stride`` samples, scaled
by the input value, and sums overlaps. With two channel groups (real parts,
imaginary parts), four output channels carry the four product terms of the
complex multiply s * phi; the fixed combine layer resolves them into I and Q
with weights [+1, 0, 0, -1] and [0, +1, +1, 0]. When all imaginary-part
kernels are zero the graph collapses to two channels and no combine layer.
"""

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .iqcore import IqBuffer, StructuralError, SymbolFrame, merge_re_im, split_re_im

TEMPLATE_COMBINE_WEIGHTS = np.array(
    [[1.0, 0.0, 0.0, -1.0], [0.0, 1.0, 1.0, 0.0]]
)


@dataclass(frozen=True)
class TransposedConvLayer:
    in_channels: int
    out_channels: int
    groups: int
    stride: int
    kernels: np.ndarray  # [out_channels, in_channels // groups, kernel_length]

    def __post_init__(self):
        if min(self.in_channels, self.out_channels, self.groups, self.stride) < 1:
            raise StructuralError("layer sizes and stride must be positive")
        if self.in_channels % self.groups or self.out_channels % self.groups:
            raise StructuralError("channel counts must be divisible by groups")
        k = np.asarray(self.kernels, dtype=np.float64)
        expected = (self.out_channels, self.in_channels // self.groups)
        if k.ndim != 3 or k.shape[:2] != expected or k.shape[2] < 1:
            raise StructuralError(
                f"kernels must have shape [{expected[0]}, {expected[1]}, K>=1]"
            )
        if not np.all(np.isfinite(k)):
            raise StructuralError("kernels contain non-finite values")
        k.setflags(write=False)
        object.__setattr__(self, "kernels", k)

    @property
    def kernel_length(self) -> int:
        return self.kernels.shape[2]


@dataclass(frozen=True)
class CombineLayer:
    weights: np.ndarray  # [2, combine_in_channels]
    enabled: bool = True

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != 2:
            raise StructuralError("combine weights must have shape [2, channels]")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def template(cls) -> "CombineLayer":
        return cls(TEMPLATE_COMBINE_WEIGHTS.copy(), enabled=True)

    @classmethod
    def disabled(cls) -> "CombineLayer":
        return cls(np.eye(2), enabled=False)


# Post ops attach protocol behaviour to the temporal output of a graph.
# Each one is a pure map on a complex sample array.


@dataclass(frozen=True)
class QuadratureDelay:
    """Delay the Q rail; I is zero padded at the tail, Q at the head."""

    samples: int

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.samples < 1:
            raise StructuralError("delay must be positive")
        pad = np.zeros(self.samples)
        i = np.concatenate([x.real, pad])
        q = np.concatenate([pad, x.imag])
        return i + 1j * q


@dataclass(frozen=True)
class CyclicPrefix:
    """Prepend a copy of the last cp_len samples."""

    cp_len: int

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.cp_len < 1:
            raise StructuralError("cp_len must be positive")
        if self.cp_len > len(x):
            raise StructuralError("cp_len exceeds buffer length")
        return np.concatenate([x[-self.cp_len:], x])


@dataclass(frozen=True)
class Repeat:
    count: int

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.count < 1:
            raise StructuralError("repeat count must be positive")
        return np.tile(x, self.count)


@dataclass(frozen=True)
class Crop:
    start: int
    length: int

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.start < 0 or self.length < 0 or self.start + self.length > len(x):
            raise StructuralError("crop window out of bounds")
        return x[self.start : self.start + self.length]


PostOp = Union[QuadratureDelay, CyclicPrefix, Repeat, Crop]


def concat_buffers(buffers) -> IqBuffer:
    """Concatenate buffers in order (protocol frame assembly)."""
    buffers = list(buffers)
    rate = buffers[0].sample_rate_hz if buffers else 1.0
    parts = [b.samples for b in buffers]
    return IqBuffer(np.concatenate(parts) if parts else np.empty(0, complex), rate)


@dataclass(frozen=True)
class SynthGraph:
    conv: TransposedConvLayer
    combine: CombineLayer
    symbol_dimension: int
    post_ops: tuple = ()

    def __post_init__(self):
        if self.conv.in_channels != 2 * self.symbol_dimension:
            raise StructuralError("conv.in_channels must equal 2 * symbol_dimension")
        if self.combine.enabled:
            if self.conv.out_channels != self.combine.weights.shape[1]:
                raise StructuralError("combine width must match conv output channels")
        elif self.conv.out_channels != 2:
            raise StructuralError("without a combine layer the conv must emit 2 channels")
        object.__setattr__(self, "post_ops", tuple(self.post_ops))


def transposed_conv(layer: TransposedConvLayer, x: np.ndarray) -> np.ndarray:
    """Strided overlap-add of kernel copies scaled by the input values.

    output[o][t*stride + k] += kernels[o][c][k] * x[c_global][t] summed over the
    group-local input channels c. Accumulation order is fixed (output channel,
    then kernel tap, then time) so results are bit-reproducible.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != layer.in_channels:
        raise StructuralError(
            f"input must have {layer.in_channels} channels, got shape {x.shape}"
        )
    seq_len = x.shape[1]
    if seq_len < 1:
        raise StructuralError("input sequence must contain at least one symbol")
    stride, klen = layer.stride, layer.kernel_length
    in_per_group = layer.in_channels // layer.groups
    out_per_group = layer.out_channels // layer.groups
    out_len = (seq_len - 1) * stride + klen
    out = np.zeros((layer.out_channels, out_len))
    for o in range(layer.out_channels):
        group = o // out_per_group
        xg = x[group * in_per_group : (group + 1) * in_per_group]
        # contrib[t, k] = sum_c kernels[o, c, k] * xg[c, t]
        contrib = xg.T @ layer.kernels[o]
        for k in range(klen):
            out[o, k : k + (seq_len - 1) * stride + 1 : stride] += contrib[:, k]
    return out


def apply_combine(layer: CombineLayer, channels: np.ndarray) -> np.ndarray:
    if not layer.enabled:
        return channels
    return layer.weights @ channels


def modulate(graph: SynthGraph, frame: SymbolFrame) -> IqBuffer:
    """Run the full synthesis graph on a symbol frame."""
    if frame.dimension != graph.symbol_dimension:
        raise StructuralError(
            f"frame dimension {frame.dimension} does not match graph "
            f"dimension {graph.symbol_dimension}"
        )
    channels = transposed_conv(graph.conv, split_re_im(frame))
    buffer = merge_re_im(apply_combine(graph.combine, channels))
    samples = buffer.samples
    for op in graph.post_ops:
        samples = op.apply(samples)
    return IqBuffer(samples)


def simplify(graph: SynthGraph) -> SynthGraph:
    """Drop the imaginary-kernel channels when they are exactly zero.

    Only applies to the full 4-channel template; outputs are preserved
    bit-exactly because I = out0 - 0 and Q = 0 + out2 reduce to the two
    surviving channels.
    """
    conv = graph.conv
    if not graph.combine.enabled or conv.out_channels != 4 or conv.groups != 2:
        return graph
    if not np.array_equal(graph.combine.weights, TEMPLATE_COMBINE_WEIGHTS):
        return graph
    im_kernels = conv.kernels[[1, 3]]
    if np.any(im_kernels != 0.0):
        return graph
    reduced = TransposedConvLayer(
        in_channels=conv.in_channels,
        out_channels=2,
        groups=2,
        stride=conv.stride,
        kernels=conv.kernels[[0, 2]],
    )
    return replace(graph, conv=reduced, combine=CombineLayer.disabled())


def build_template_graph(
    re_kernels: np.ndarray,
    im_kernels: np.ndarray,
    stride: int,
    post_ops: tuple = (),
) -> SynthGraph:
    """Full 4-channel template from the Re/Im kernel stacks [N, K].

    Both channel groups share the same basis, so the Re/Im stacks are
    duplicated across groups.
    """
    re_k = np.asarray(re_kernels, dtype=np.float64)
    im_k = np.asarray(im_kernels, dtype=np.float64)
    if re_k.shape != im_k.shape or re_k.ndim != 2:
        raise StructuralError("kernel stacks must share a [N, K] shape")
    n = re_k.shape[0]
    conv = TransposedConvLayer(
        in_channels=2 * n,
        out_channels=4,
        groups=2,
        stride=stride,
        kernels=np.stack([re_k, im_k, re_k, im_k]),
    )
    return SynthGraph(conv, CombineLayer.template(), n, post_ops)
