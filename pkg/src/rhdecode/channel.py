"""Noise injection and the Monte Carlo experiment runner.

Random numbers come from numpy's PCG64 bit generator.  Each trial gets its
own 64-bit seed, derived from the master seed and the trial index through
``numpy.random.SeedSequence(master_seed, spawn_key=(trial,))``; trials are
therefore independent of execution order and of the number of workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from ._version import __version__
from .block import build_window_code, ml_decode, multiplicity_bound
from .io import code_to_dict
from .decoders import DecodeResult, HorizonParams, cost, cost_bound, exact_decode, receding_horizon_decode
from .system import ConvCode, SymbolSeq, encode, is_codeword, zero_return_extension

Decoder = Callable[..., DecodeResult]


def trial_seed(master_seed: int, trial: int) -> int:
    """64-bit seed of trial ``trial`` under ``master_seed``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ChannelSpec:
    """Channel model.

    ``q_symmetric``: every field entry is independently replaced, with
    probability ``p_err``, by a uniformly chosen different element.
    ``per_window_weight``: every window of ``window`` consecutive symbols
    starting at a multiple of ``stride`` carries exactly ``weight`` errors
    (at most ``weight`` if the window runs past the end of the frame).
    ``explicit``: the error sequence ``error`` is added.
    """

    kind: str
    p_err: float = 0.0
    weight: int = 0
    window: int = 1
    stride: int = 1
    error: SymbolSeq | None = None

    def __post_init__(self) -> None:
        if self.kind == "q_symmetric":
            if not 0.0 <= self.p_err <= 1.0:
                raise ValueError(f"p_err must lie in [0, 1], got {self.p_err}")
        elif self.kind == "per_window_weight":
            if self.weight < 0 or self.window < 1 or self.stride < 1:
                raise ValueError("per_window_weight needs weight >= 0, window >= 1, stride >= 1")
        elif self.kind == "explicit":
            if self.error is None:
                raise ValueError("explicit channel needs an error sequence")
        else:
            raise ValueError(f"unknown channel kind {self.kind!r}")

    @classmethod
    def q_symmetric(cls, p_err: float) -> ChannelSpec:
        return cls("q_symmetric", p_err=p_err)

    @classmethod
    def per_window_weight(cls, weight: int, window: int, stride: int) -> ChannelSpec:
        return cls("per_window_weight", weight=weight, window=window, stride=stride)

    @classmethod
    def explicit(cls, error: SymbolSeq) -> ChannelSpec:
        return cls("explicit", error=error)

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "q_symmetric":
            return {"kind": self.kind, "p_err": self.p_err}
        if self.kind == "per_window_weight":
            return {"kind": self.kind, "weight": self.weight, "window": self.window, "stride": self.stride}
        assert self.error is not None
        return {"kind": self.kind, "error": [list(s) for s in self.error.symbols()]}

    @classmethod
    def from_dict(cls, d: dict[str, Any], code: ConvCode | None = None) -> ChannelSpec:
        kind = d.get("kind")
        if kind == "q_symmetric":
            return cls.q_symmetric(float(d["p_err"]))
        if kind == "per_window_weight":
            return cls.per_window_weight(int(d["weight"]), int(d["window"]), int(d["stride"]))
        if kind == "explicit":
            if code is None:
                raise ValueError("explicit channel needs the code to split symbols")
            return cls.explicit(SymbolSeq.from_symbols(code.field, d["error"], code.n - code.k))
        raise ValueError(f"unknown channel kind {kind!r}")


def apply_channel(
    c: SymbolSeq, spec: ChannelSpec, seed: int | np.random.Generator = 0
) -> tuple[SymbolSeq, int]:
    """Corrupt ``c``; returns the received sequence and the number of corrupted entries."""
    p = c.field.p
    length = len(c)
    if length == 0:
        return c, 0
    r = len(c.y[0])
    flat = np.array(c.symbols(), dtype=np.int64)
    n = flat.shape[1]
    if spec.kind == "explicit":
        assert spec.error is not None
        err = np.array(spec.error.padded(length).symbols(), dtype=np.int64)[:length] % p
        if err.shape != flat.shape:
            raise ValueError(f"error sequence has shape {err.shape}, frame has {flat.shape}")
    else:
        rng = make_rng(seed)
        err = np.zeros_like(flat)
        if spec.kind == "q_symmetric" and p > 1:
            hit = rng.random(flat.shape) < spec.p_err
            vals = rng.integers(1, p, size=flat.shape)
            err = np.where(hit, vals, 0)
        elif spec.kind == "per_window_weight":
            err = _per_window_errors(length, n, p, spec, rng)
    received = (flat + err) % p
    rx = SymbolSeq.from_symbols(c.field, received.tolist(), r)
    return rx, int(np.count_nonzero(err))


def _per_window_errors(length: int, n: int, p: int, spec: ChannelSpec, rng: np.random.Generator) -> np.ndarray:
    # Windows are visited in order.  Errors already present from earlier
    # (overlapping) windows are counted and only the shortfall is placed, on
    # the symbols no earlier window covered.  Windows clipped by the frame end
    # get at most `weight` errors; full windows get exactly `weight`.
    w, win, stride = spec.weight, spec.window, spec.stride
    if w > win * n:
        raise ValueError(f"cannot place {w} errors in a window of {win} symbols of length {n}")
    err = np.zeros((length, n), dtype=np.int64)
    covered = 0  # symbols [0, covered) belong to some earlier window
    for start in range(0, length, stride):
        stop = min(length, start + win)
        present = int(np.count_nonzero(err[start:stop]))
        fresh_from = max(start, covered)
        fresh = [(t, j) for t in range(fresh_from, stop) for j in range(n)]
        need = min(w - present, len(fresh))
        if need < 0:
            raise AssertionError("overlapping windows exceeded the requested weight")
        if need:
            pick = rng.choice(len(fresh), size=need, replace=False)
            for idx in sorted(int(i) for i in pick):
                t, j = fresh[idx]
                err[t, j] = int(rng.integers(1, p))
        covered = max(covered, stop)
    for start in range(0, length - win + 1, stride):
        if np.count_nonzero(err[start : start + win]) != w:
            raise ValueError(f"no room for {w} fresh errors per window with window {win}, stride {stride}")
    return err


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class ExperimentConfig:
    code: ConvCode
    N: int
    L: int
    T: int
    channel: ChannelSpec
    trials: int
    seed: int = 0
    exact: bool = False
    M: int | None = None
    Delta: int | None = None
    budget: int | None = None
    timing: bool = False

    def __post_init__(self) -> None:
        HorizonParams(self.N, self.L)
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.T < 0:
            raise ValueError(f"T must be >= 0, got {self.T}")
        if (self.M is None) != (self.Delta is None):
            raise ValueError("M and Delta must be given together")
        if self.M is not None and self.Delta is not None and not (self.M >= 2 and self.Delta >= self.N):
            raise ValueError("need M >= 2 and Delta >= N")

    def manifest(self, command: str = "simulate") -> dict[str, Any]:
        return {
            "tool": "rhdecode",
            "version": __version__,
            "command": command,
            "code": code_to_dict(self.code),
            "field_p": self.code.p,
            "N": self.N,
            "L": self.L,
            "T": self.T,
            "channel": self.channel.to_dict(),
            "trials": self.trials,
            "seed": self.seed,
            "exact": self.exact,
            "M": self.M,
            "Delta": self.Delta,
            "budget": self.budget,
            "timing": self.timing,
            "rng": "numpy PCG64, per-trial seed = SeedSequence(seed, spawn_key=(trial,))",
        }


@dataclass
class TrialRecord:
    trial: int
    seed: int
    error_weight: int
    heuristic_cost: int
    frame_cost: int
    exact_cost: int | None
    tie_events: int
    first_window_ties: int
    multisolution: bool | None
    recovered: bool
    is_codeword: bool
    within_bound: bool
    heuristic_time: float | None = None
    exact_time: float | None = None

    @property
    def ordering_ok(self) -> bool:
        return self.exact_cost is None or self.exact_cost <= self.heuristic_cost


CSV_FIELDS = (
    "trial",
    "seed",
    "error_weight",
    "heuristic_cost",
    "frame_cost",
    "exact_cost",
    "tie_events",
    "first_window_ties",
    "multisolution",
    "recovered",
    "is_codeword",
    "within_bound",
)


@dataclass
class ExperimentReport:
    manifest: dict[str, Any]
    records: list[TrialRecord]
    bound_cost: int
    rho_N: int
    multiplicity_bound_value: Fraction | None = None
    violations: list[str] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def frame_error_count(self) -> int:
        return sum(1 for r in self.records if not r.recovered)

    @property
    def avg_cost(self) -> float:
        return sum(r.heuristic_cost for r in self.records) / len(self.records)

    @property
    def max_cost(self) -> int:
        """Largest cost over time instants ``0 .. T-1``, the quantity ``bound_cost`` bounds."""
        return max(r.frame_cost for r in self.records)

    @property
    def tie_event_rate(self) -> float:
        return sum(1 for r in self.records if r.tie_events) / len(self.records)

    @property
    def first_window_tie_rate(self) -> float:
        return sum(1 for r in self.records if r.first_window_ties > 1) / len(self.records)

    @property
    def multisolution_rate(self) -> float | None:
        marks = [r.multisolution for r in self.records if r.multisolution is not None]
        return sum(marks) / len(marks) if marks else None

    @property
    def exact_equal_fraction(self) -> float | None:
        pairs = [r for r in self.records if r.exact_cost is not None]
        if not pairs:
            return None
        return sum(1 for r in pairs if r.exact_cost == r.heuristic_cost) / len(pairs)

    @property
    def ok(self) -> bool:
        return not self.violations

    def timing_summary(self) -> dict[str, float] | None:
        h = [r.heuristic_time for r in self.records if r.heuristic_time is not None]
        if not h:
            return None
        out = {"heuristic_median_s": float(np.median(h))}
        e = [r.exact_time for r in self.records if r.exact_time is not None]
        if e:
            out["exact_median_s"] = float(np.median(e))
        return out

    def summary(self) -> dict[str, Any]:
        mb = self.multiplicity_bound_value
        out: dict[str, Any] = {
            "trials": self.trials,
            "frame_error_count": self.frame_error_count,
            "avg_cost": self.avg_cost,
            "max_cost": self.max_cost,
            "bound_cost": self.bound_cost,
            "rho_N": self.rho_N,
            "tie_event_rate": self.tie_event_rate,
            "first_window_tie_rate": self.first_window_tie_rate,
            "multisolution_rate": self.multisolution_rate,
            "multiplicity_bound": None if mb is None else str(mb),
            "multiplicity_bound_float": None if mb is None else float(mb),
            "exact_equal_fraction": self.exact_equal_fraction,
            "violations": list(self.violations),
        }
        timing = self.timing_summary()
        if timing is not None:
            out["timing"] = timing
        return out

    def to_json(self) -> str:
        return json.dumps({"manifest": self.manifest, "summary": self.summary()}, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# manifest: " + json.dumps(self.manifest, sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in self.records:
            row = asdict(rec)
            writer.writerow(["" if row[f] is None else _csv_value(row[f]) for f in CSV_FIELDS])
        return buf.getvalue()


def _csv_value(v: Any) -> Any:
    if isinstance(v, bool):
        return int(v)
    return v


def transmit_frame(code: ConvCode, T: int, rng: np.random.Generator) -> SymbolSeq:
    """A random codeword of ``T + 1`` symbols (uniform inputs, zero-return tail, zero padding)."""
    msg_len = max(1, T + 1 - code.kappa_max)
    u = rng.integers(0, code.p, size=(msg_len, code.k)).tolist()
    body, x = encode(code, u)
    tail, _ = encode(code, zero_return_extension(code, x), x)
    frame = SymbolSeq(body.y + tail.y, body.u + tail.u, code.field)
    return frame.padded(T + 1, code.n - code.k, code.k)


def _first_window_ties(code: ConvCode, received: SymbolSeq, lengths: Sequence[int], budget: int | None) -> list[int]:
    # Window decodes from the known zero initial state, one per window length.
    counts = []
    for n_win in lengths:
        wc = build_window_code(code, n_win, budget)
        r, k = code.n - code.k, code.k
        ys = [received.y[t] if t < len(received) else (0,) * r for t in range(n_win)]
        us = [received.u[t] if t < len(received) else (0,) * k for t in range(n_win)]
        z = tuple(v for y in reversed(ys) for v in y) + tuple(-v % code.p for u in reversed(us) for v in u)
        counts.append(ml_decode(wc, z).tie_count)
    return counts


def run_trial(cfg: ExperimentConfig, trial: int, decoder: Decoder | None = None) -> TrialRecord:
    code = cfg.code
    decode = decoder or receding_horizon_decode
    seed = trial_seed(cfg.seed, trial)
    rng = make_rng(seed)
    sent = transmit_frame(code, cfg.T, rng)
    received, err_w = apply_channel(sent, cfg.channel, rng)
    T = len(received) - 1
    wc = build_window_code(code, cfg.N, cfg.budget)
    t0 = time.perf_counter()
    res = decode(code, received, HorizonParams(cfg.N, cfg.L), window=wc, budget=cfg.budget)
    t1 = time.perf_counter()
    exact_cost = None
    t_exact = None
    if cfg.exact:
        t2 = time.perf_counter()
        exact_cost = exact_decode(code, received, cfg.budget).cost
        t_exact = time.perf_counter() - t2
    frame_cost = cost(received, res.codeword, horizon=T)
    first = dict(res.tie_events).get(0, 1)
    multi = None
    if cfg.M is not None and cfg.Delta is not None:
        counts = _first_window_ties(code, received, range(cfg.N, cfg.Delta + 1), cfg.budget)
        multi = all(c >= cfg.M for c in counts)
    width = max(len(sent), len(res.codeword))
    recovered = sent.padded(width) == res.codeword.padded(width)
    return TrialRecord(
        trial=trial,
        seed=seed,
        error_weight=err_w,
        heuristic_cost=res.cost,
        frame_cost=frame_cost,
        exact_cost=exact_cost,
        tie_events=len(res.tie_events),
        first_window_ties=first,
        multisolution=multi,
        recovered=recovered,
        is_codeword=is_codeword(code, res.codeword),
        within_bound=frame_cost <= cost_bound(wc, T, cfg.L),
        heuristic_time=(t1 - t0) if cfg.timing else None,
        exact_time=t_exact if cfg.timing else None,
    )


def _run_chunk(cfg: ExperimentConfig, trials: Sequence[int], decoder: Decoder | None) -> list[TrialRecord]:
    return [run_trial(cfg, i, decoder) for i in trials]


def run_experiment(cfg: ExperimentConfig, workers: int = 1, decoder: Decoder | None = None) -> ExperimentReport:
    """Run ``cfg.trials`` independent trials and aggregate them.

    ``decoder`` replaces :func:`receding_horizon_decode` (it must accept the
    same arguments); with ``workers > 1`` it has to be picklable.
    """
    indices = list(range(cfg.trials))
    if workers <= 1:
        records = _run_chunk(cfg, indices, decoder)
    else:
        size = math.ceil(len(indices) / workers)
        chunks = [indices[i : i + size] for i in range(0, len(indices), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [cfg] * len(chunks), chunks, [decoder] * len(chunks))
            records = [rec for part in parts for rec in part]
    records.sort(key=lambda r: r.trial)

    wc = build_window_code(cfg.code, cfg.N, cfg.budget)
    report = ExperimentReport(
        manifest=cfg.manifest(),
        records=records,
        bound_cost=cost_bound(wc, cfg.T, cfg.L),
        rho_N=wc.rho,
    )
    if cfg.M is not None and cfg.Delta is not None:
        report.multiplicity_bound_value = multiplicity_bound(cfg.code, cfg.N, cfg.Delta, cfg.M, cfg.budget)
    for rec in records:
        if not rec.is_codeword:
            report.violations.append(f"trial {rec.trial}: decoder output is not a codeword")
        if not rec.within_bound:
            report.violations.append(f"trial {rec.trial}: cost {rec.frame_cost} exceeds bound {report.bound_cost}")
        if not rec.ordering_ok:
            report.violations.append(
                f"trial {rec.trial}: heuristic cost {rec.heuristic_cost} below exact cost {rec.exact_cost}"
            )
    return report
