"""Foundational types for complex baseband signals and symbol vectors.

Complex samples are stored as numpy complex128 (an explicit (re, im) pair in
memory); the channel-major real layout used by the synthesis graph exists only
at the graph boundary, produced by :func:`split_re_im` and undone by
:func:`merge_re_im`.
"""

from dataclasses import dataclass, field

import numpy as np


class StructuralError(ValueError):
    """Shape or precondition violation in an operation's input."""


def _as_finite_complex(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.size and not np.all(np.isfinite(arr)):
        raise StructuralError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class IqBuffer:
    """An ordered sequence of complex baseband samples.

    ``sample_rate_hz`` is carried as metadata only; no synthesis math reads it.
    """

    samples: np.ndarray
    sample_rate_hz: float = 1.0

    def __post_init__(self):
        arr = _as_finite_complex(self.samples, "samples")
        if arr.ndim != 1:
            raise StructuralError("samples must be one-dimensional")
        if self.sample_rate_hz <= 0:
            raise StructuralError("sample_rate_hz must be positive")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def i(self) -> np.ndarray:
        return self.samples.real

    @property
    def q(self) -> np.ndarray:
        return self.samples.imag


@dataclass(frozen=True)
class SymbolFrame:
    """A batch of N-dimensional complex symbol vectors.

    ``vectors`` has shape [num_symbols, dimension]; dimension is 1 for single
    carrier schemes and the subcarrier count for OFDM.
    """

    dimension: int
    vectors: np.ndarray = field(default_factory=lambda: np.empty((0, 1), np.complex128))

    def __post_init__(self):
        if self.dimension < 1:
            raise StructuralError("dimension must be a positive integer")
        arr = _as_finite_complex(self.vectors, "vectors")
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1) if self.dimension == 1 else arr.reshape(1, -1)
            arr.setflags(write=False)
        if arr.ndim != 2 or (arr.size and arr.shape[1] != self.dimension):
            raise StructuralError(
                f"every vector must have exactly {self.dimension} entries"
            )
        if arr.size == 0:
            arr = arr.reshape(0, self.dimension)
            arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def from_symbols(cls, symbols) -> "SymbolFrame":
        """Dimension-1 frame from a flat sequence of complex scalars."""
        return cls(1, np.asarray(symbols, np.complex128).reshape(-1, 1))


def split_re_im(frame: SymbolFrame) -> np.ndarray:
    """Channel-major real tensor [2N, T]: channels 0..N-1 real, N..2N-1 imag."""
    vecs = frame.vectors  # [T, N]
    return np.concatenate([vecs.real.T, vecs.imag.T], axis=0)


def merge_re_im(tensor: np.ndarray) -> IqBuffer:
    """Pair two equal-length real channels back into complex samples."""
    arr = np.asarray(tensor, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != 2:
        raise StructuralError("merge_re_im expects exactly two channels")
    return IqBuffer(arr[0] + 1j * arr[1])
