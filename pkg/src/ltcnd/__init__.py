"""Lightweight Temporal Compression for n-dimensional streams.

Three backends share one contract: every received sample is reconstructed,
by linear interpolation between transmitted points, within ``epsilon`` in the
chosen norm.

* :mod:`ltcnd.ltc1d` -- the original scalar algorithm (high/low lines).
* :mod:`ltcnd.infinity` -- n dimensions, infinity norm, constant memory.
* :mod:`ltcnd.euclidean` -- n dimensions, Euclidean norm, ball-set search.
"""

from .codec import Backend, Compressor, compress, compress_samples, iter_samples
from .errors import (
    InconclusiveOracleError,
    InvalidParameterError,
    LTCError,
    OutOfRangeError,
    ParseError,
    RejectedInputError,
    ResourceCapError,
)
from .geometry import AlignedBox, Ball, Norm, Sample, ShiftedPoint, TransmittedPoint
from .metrics import CompressionStats, compute_stats, max_reconstruction_error, reconstruct
from .streams import StreamFile, generate_synthetic, parse_stream, write_stream

__all__ = [
    "AlignedBox", "Backend", "Ball", "CompressionStats", "Compressor", "InconclusiveOracleError",
    "InvalidParameterError", "LTCError", "Norm", "OutOfRangeError", "ParseError",
    "RejectedInputError", "ResourceCapError", "Sample", "ShiftedPoint", "StreamFile",
    "TransmittedPoint", "compress", "compress_samples", "compute_stats", "generate_synthetic",
    "iter_samples", "max_reconstruction_error", "parse_stream", "reconstruct", "write_stream",
]
