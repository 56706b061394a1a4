"""Command-line entry point: ``ltcnd --mode {compress,reconstruct,roundtrip,stats,generate,verify}``.

Exit status is 0 on success, 1 on bad input, 2 when a run breaks an
invariant (error bound exceeded, oracle disagreement).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .codec import Backend, Compressor, iter_samples
from .euclidean import EMIT_POLICIES
from .errors import InconclusiveOracleError, LTCError
from .geometry import Norm, TransmittedPoint
from .metrics import CompressionStats, compute_stats, reconstruct
from .oracle import OracleDisagreement, exhaustive_compressor
from .streams import KINDS, StreamFile, format_stream, generate_synthetic, parse_stream

log = logging.getLogger("ltcnd")

MODES = ("compress", "reconstruct", "roundtrip", "stats", "generate", "verify")
# Slack on the error bound for floating-point round-off in reconstruction.
BOUND_SLACK = 1e-9


class InvariantViolation(LTCError):
    pass


@dataclass
class RunConfig:
    mode: str = "roundtrip"
    epsilon: float = 1.0
    norm: Norm = Norm.INFINITY
    dims: list[str] = field(default_factory=list)
    backend: Backend | None = None
    emit: str = "witness"
    input: Path | None = None
    output: Path | None = None
    reference: Path | None = None
    recon_output: Path | None = None
    stats_output: Path | None = None
    stats_format: str = "kv"
    seed: int = 0
    kind: str = "random_walk"
    length: int = 1000
    n: int = 3
    amplitude: float = 1.0
    cases: int = 100


@dataclass
class RunOutputs:
    tx: list[TransmittedPoint] = field(default_factory=list)
    reconstructed: StreamFile | None = None
    stats: CompressionStats | None = None
    text: str = ""


def _compress(stream: StreamFile, config: RunConfig) -> tuple[list[TransmittedPoint], float, int]:
    comp = Compressor(config.epsilon, config.norm, config.backend, config.emit)
    start = time.perf_counter()
    tx: list[TransmittedPoint] = []
    for sample in iter_samples(stream.t, stream.values):
        tx.extend(comp.push(sample))
    tx.extend(comp.flush())
    return tx, time.perf_counter() - start, comp.peak_ball_set


def _bound_ok(stats: CompressionStats, epsilon: float, scale: float) -> bool:
    return stats.max_error <= epsilon + BOUND_SLACK * max(epsilon, scale)


def _load_input(config: RunConfig) -> StreamFile:
    if config.input is None:
        raise LTCError(f"--input is required for --mode {config.mode}")
    return parse_stream(config.input).select(config.dims)


def _verify(config: RunConfig) -> str:
    if config.input is not None:
        stream = _load_input(config)
        cases = [(stream, config.norm)]
    else:
        cases = []
        rng = np.random.default_rng(config.seed)
        for i in range(config.cases):
            n = int(rng.integers(1, 4))
            kind = ("random_walk", "sinusoid")[i % 2]
            stream = generate_synthetic(kind, n, int(rng.integers(20, 120)), seed=int(rng.integers(1 << 31)))
            cases.append((stream, (Norm.INFINITY, Norm.EUCLIDEAN)[i % 2]))
    agree = disagree = inconclusive = 0
    for stream, norm in cases:
        samples = list(iter_samples(stream.t, stream.values))
        cfg = RunConfig(epsilon=config.epsilon, norm=norm, emit=config.emit if norm is Norm.EUCLIDEAN else "witness")
        tx, _, _ = _compress(stream, cfg)
        try:
            ref = exhaustive_compressor(samples, config.epsilon, norm, {p.tau: p.xi for p in tx})
        except InconclusiveOracleError:
            inconclusive += 1
            continue
        except OracleDisagreement:
            disagree += 1
            continue
        if [p.tau for p in tx] == [p.tau for p in ref]:
            agree += 1
        else:
            disagree += 1
    text = f"cases={len(cases)}\nagree={agree}\ndisagree={disagree}\ninconclusive={inconclusive}\n"
    if disagree:
        raise InvariantViolation(text.strip().replace("\n", ", "))
    return text


def run(config: RunConfig) -> RunOutputs:
    """Execute one CLI mode; files named in ``config`` are written as a side effect."""
    out = RunOutputs()
    mode = config.mode
    if mode not in MODES:
        raise LTCError(f"unknown mode {mode!r}")

    if mode == "generate":
        stream = generate_synthetic(config.kind, config.n, config.length, config.seed, config.amplitude)
        out.text = format_stream(stream)
        return out

    if mode == "verify":
        out.text = _verify(config)
        return out

    if mode == "reconstruct":
        tx_stream = _load_input(config)
        if config.reference is None:
            raise LTCError("--reference (original stream for timestamps) is required to reconstruct")
        times = parse_stream(config.reference).t
        values = reconstruct(tx_stream.to_points(), times)
        out.reconstructed = StreamFile(times, values, tx_stream.header)
        out.text = format_stream(out.reconstructed)
        return out

    stream = _load_input(config)
    tx, elapsed, peak = _compress(stream, config)
    out.tx = tx
    tx_file = StreamFile.from_points(tx, stream.header)
    if mode == "compress":
        out.text = format_stream(tx_file)
        return out

    out.stats = compute_stats(stream.t, stream.values, tx, config.epsilon, config.norm, elapsed, peak)
    if mode == "roundtrip":
        out.reconstructed = StreamFile(stream.t, reconstruct(tx, stream.t), stream.header)
        if config.output is not None:
            config.output.write_text(format_stream(tx_file), encoding="utf-8")
        if config.recon_output is not None:
            config.recon_output.write_text(format_stream(out.reconstructed), encoding="utf-8")
    stats_text = out.stats.to_json() if config.stats_format == "json" else out.stats.to_kv()
    if config.stats_output is not None:
        config.stats_output.write_text(stats_text, encoding="utf-8")
    out.text = stats_text
    scale = float(np.max(np.abs(stream.values)))
    if not _bound_ok(out.stats, config.epsilon, scale):
        raise InvariantViolation(f"max error {out.stats.max_error} exceeds epsilon {config.epsilon}")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ltcnd", description="Error-bounded LTC stream compression.")
    p.add_argument("--mode", choices=MODES, default="roundtrip")
    p.add_argument("--epsilon", type=float, default=1.0, help="error bound, in value units")
    p.add_argument("--norm", choices=[n.value for n in Norm], default=Norm.INFINITY.value)
    p.add_argument("--backend", choices=[b.value for b in Backend], default=None,
                   help="override the backend implied by --norm (ltc1d needs one value column)")
    p.add_argument("--emit", choices=EMIT_POLICIES, default="witness",
                   help="euclidean: emit the stored witness or the deepest point of the intersection")
    p.add_argument("--dims", default="", help="comma-separated value columns, by name or index")
    p.add_argument("--input", type=Path)
    p.add_argument("--output", type=Path, help="main output file (stdout if omitted)")
    p.add_argument("--reference", type=Path, help="original stream whose timestamps to reconstruct at")
    p.add_argument("--recon-output", type=Path, help="roundtrip: also write the reconstruction here")
    p.add_argument("--stats-output", type=Path)
    p.add_argument("--stats-format", choices=("kv", "json"), default="kv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=KINDS, default="random_walk")
    p.add_argument("--length", type=int, default=1000)
    p.add_argument("--n", type=int, default=3, help="generate: number of value columns")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--cases", type=int, default=100, help="verify: number of seeded cases")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        mode=args.mode,
        epsilon=args.epsilon,
        norm=Norm.parse(args.norm),
        dims=[d.strip() for d in args.dims.split(",") if d.strip()],
        backend=Backend(args.backend) if args.backend else None,
        emit=args.emit,
        input=args.input,
        output=args.output,
        reference=args.reference,
        recon_output=args.recon_output,
        stats_output=args.stats_output,
        stats_format=args.stats_format,
        seed=args.seed,
        kind=args.kind,
        length=args.length,
        n=args.n,
        amplitude=args.amplitude,
        cases=args.cases,
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config = config_from_args(args)
    try:
        result = run(config)
    except InvariantViolation as exc:
        log.error("%s", exc)
        return 2
    except (LTCError, OSError) as exc:
        log.error("%s", exc)
        return 1
    # roundtrip writes its own files; every other mode's main product goes to --output.
    if config.mode == "roundtrip" or config.output is None:
        sys.stdout.write(result.text)
    else:
        config.output.write_text(result.text, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
