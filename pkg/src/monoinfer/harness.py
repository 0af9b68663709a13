"""Single-query runner and the batch benchmark harness.

Each run encodes a problem under one strategy, solves it through a session
(in-process engine or an external SMT-LIB2 solver), and records the verdict
or failure kind together with wall-clock time (inclusive of parsing and
encoding overhead), lemma and check-sat counts.  The batch runner fans jobs
out over a process pool and emits a per-record CSV plus per-strategy
cumulative (time, solved-count) tables ready for plotting.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .encode import (
    EncodedProblem,
    LazyRunStats,
    Strategy,
    eager_lemma_count,
    encode_eager,
    encode_quant_aggregated,
    encode_quant_individual,
    solve_lazy,
)
from .network import (
    InferenceProblem,
    ProblemError,
    UpdateFunctionTable,
    decode_solution,
    verify_solution,
)
from .problemfile import load_problem
from .session import (
    SAT,
    UNKNOWN,
    UNSAT,
    SolverProcessError,
    SolverVerdict,
    open_session,
)
from .smtlib import emit_smtlib, collect_declarations
from .terms import And, Term

TIMEOUT = "timeout"
CRASH = "crash"
UNSUPPORTED = "unsupported"

DEFAULT_TIME_LIMIT_MS = 600_000  # the evaluation's 10-minute budget
DEFAULT_PARALLELISM = 16


@dataclass
class RunRecord:
    instance: str
    strategy: str
    verdict: Optional[str] = None  # sat | unsat | unknown
    failure: Optional[str] = None  # timeout | crash | unsupported
    wall_ms: float = 0.0
    lemma_count: int = 0
    check_sat_count: int = 0
    verified: Optional[bool] = None
    detail: str = ""

    def __post_init__(self):
        if (self.verdict is None) == (self.failure is None):
            raise ValueError("exactly one of verdict/failure must be set")

    @property
    def solved(self) -> bool:
        return self.verdict in (SAT, UNSAT)

    CSV_FIELDS = (
        "instance",
        "strategy",
        "verdict",
        "failure",
        "wall_ms",
        "lemma_count",
        "check_sat_count",
        "verified",
        "detail",
    )

    def as_row(self) -> dict:
        return {
            "instance": self.instance,
            "strategy": self.strategy,
            "verdict": self.verdict or "",
            "failure": self.failure or "",
            "wall_ms": f"{self.wall_ms:.3f}",
            "lemma_count": self.lemma_count,
            "check_sat_count": self.check_sat_count,
            "verified": "" if self.verified is None else str(self.verified).lower(),
            "detail": self.detail,
        }


def _classify_unknown(reason: Optional[str]) -> tuple[Optional[str], Optional[str]]:
    """Map an unknown reason onto (verdict, failure) per the record schema:
    timeouts and fragment refusals are failures; a genuine solver 'unknown'
    stays a verdict."""
    text = (reason or "").lower()
    if "timeout" in text:
        return None, TIMEOUT
    if "unsupported" in text or "budget" in text:
        return None, UNSUPPORTED
    return UNKNOWN, None


def encode_for_strategy(
    formula: Term, spec, strategy: Strategy
) -> Optional[EncodedProblem]:
    if strategy is Strategy.QUANT_INDIVIDUAL:
        return encode_quant_individual(formula, spec)
    if strategy is Strategy.QUANT_AGGREGATED:
        return encode_quant_aggregated(formula, spec)
    if strategy is Strategy.INST_EAGER:
        return encode_eager(formula, spec)
    return None  # lazy asserts the base formula itself


def run_single(
    problem: InferenceProblem,
    strategy: Strategy,
    solver_cmd: Optional[str] = None,
    time_limit_ms: int = DEFAULT_TIME_LIMIT_MS,
    verify: bool = False,
    simplify: bool = True,
    emit_path: Optional[str] = None,
    instance_name: str = "instance",
) -> tuple[RunRecord, Optional[list[UpdateFunctionTable]]]:
    """Encode + solve one instance under one strategy.

    Timing covers encoding and solving; solver failures and timeouts are
    captured in the record rather than raised.  With verify=True a sat model
    is decoded and independently checked, and the result noted.
    """
    from .network import encode_inference

    start = time.perf_counter()
    tables: Optional[list[UpdateFunctionTable]] = None
    record = None
    session = None
    try:
        formula, spec = encode_inference(problem, simplify=simplify)
        encoded = encode_for_strategy(formula, spec, strategy)
        # quantified: number of axioms; eager: ground lemmas; lazy: the
        # candidate-set bound (same as eager's count)
        lemma_count = (
            encoded.lemma_count
            if encoded is not None
            else eager_lemma_count(formula, spec)
        )
        if emit_path is not None:
            target = encoded.formula if encoded is not None else formula
            assertions = list(target.args) if isinstance(target, And) else [target]
            script = emit_smtlib(collect_declarations(assertions), assertions)
            Path(emit_path).write_text(script, encoding="utf-8")
        session = open_session(solver_cmd)
        session.set_time_limit(time_limit_ms)
        stats = LazyRunStats()
        if strategy is Strategy.INST_LAZY:
            verdict = solve_lazy(formula, spec, session, stats)
        else:
            session.assert_formula(encoded.formula)
            answer = session.check_sat()
            if answer == SAT:
                verdict = SolverVerdict.sat(session.extract_model())
            elif answer == UNSAT:
                verdict = SolverVerdict.unsat()
            else:
                reason = getattr(session, "unknown_reason", None) or "unknown"
                verdict = SolverVerdict.unknown(reason)
        checks = session.check_sat_count
        wall_ms = (time.perf_counter() - start) * 1000.0
        if verdict.kind == UNKNOWN:
            v, failure = _classify_unknown(verdict.reason)
            record = RunRecord(
                instance_name,
                strategy.value,
                verdict=v,
                failure=failure,
                wall_ms=wall_ms,
                lemma_count=lemma_count,
                check_sat_count=checks,
                detail=verdict.reason or "",
            )
        else:
            record = RunRecord(
                instance_name,
                strategy.value,
                verdict=verdict.kind,
                wall_ms=wall_ms,
                lemma_count=lemma_count,
                check_sat_count=checks,
            )
            if verdict.is_sat and verify:
                try:
                    tables = decode_solution(verdict.model, problem)
                    result = verify_solution(problem, tables)
                    record.verified = bool(result.ok)
                    if not result.ok:
                        record.detail = f"verification failed: {result.violation}"
                except ProblemError as err:
                    # e.g. unbounded domains: tables are only defined over
                    # finite grids, so the verdict stands unverified
                    record.detail = f"verification unavailable: {err}"
    except SolverProcessError as err:
        wall_ms = (time.perf_counter() - start) * 1000.0
        record = RunRecord(
            instance_name,
            strategy.value,
            failure=CRASH,
            wall_ms=wall_ms,
            detail=str(err),
        )
    except Exception as err:  # harness must never crash on one instance
        wall_ms = (time.perf_counter() - start) * 1000.0
        record = RunRecord(
            instance_name,
            strategy.value,
            failure=CRASH,
            wall_ms=wall_ms,
            detail=f"{type(err).__name__}: {err}",
        )
    finally:
        if session is not None:
            session.dispose()
    return record, tables


def _batch_job(args) -> RunRecord:
    path, strategy_value, solver_cmd, time_limit_ms, verify, simplify = args
    started = time.perf_counter()
    try:
        problem = load_problem(path)
    except Exception as err:
        return RunRecord(
            Path(path).stem,
            strategy_value,
            failure=CRASH,
            wall_ms=(time.perf_counter() - started) * 1000.0,
            detail=f"parse error: {err}",
        )
    parse_ms = (time.perf_counter() - started) * 1000.0
    record, _ = run_single(
        problem,
        Strategy(strategy_value),
        solver_cmd=solver_cmd,
        time_limit_ms=time_limit_ms,
        verify=verify,
        simplify=simplify,
        instance_name=Path(path).stem,
    )
    # recorded time covers all initialization overhead, parsing included
    record.wall_ms += parse_ms
    return record


def run_batch(
    instance_dir: str,
    strategies: Sequence[Strategy],
    parallelism: int = DEFAULT_PARALLELISM,
    time_limit_ms: int = DEFAULT_TIME_LIMIT_MS,
    solver_cmd: Optional[str] = None,
    verify: bool = False,
    simplify: bool = True,
) -> list[RunRecord]:
    """Run every .problem file under instance_dir against every strategy.

    Per-instance failures are recorded and the batch continues; results come
    back in deterministic (file, strategy) order.
    """
    paths = sorted(
        str(p) for p in Path(instance_dir).glob("*.problem")
    )
    if not paths:
        raise FileNotFoundError(f"no .problem files under {instance_dir}")
    jobs = [
        (path, strategy.value, solver_cmd, time_limit_ms, verify, simplify)
        for path in paths
        for strategy in strategies
    ]
    if parallelism <= 1:
        return [_batch_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_batch_job, jobs))


def write_records_csv(records: Sequence[RunRecord], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=RunRecord.CSV_FIELDS)
        writer.writeheader()
        for record in records:
            writer.writerow(record.as_row())


def cumulative_table(records: Sequence[RunRecord]) -> dict[str, list[tuple[float, int]]]:
    """Per strategy: sorted (wall_ms, solved-so-far) steps over solved runs,
    a monotone step function ending at the strategy's solved count."""
    out: dict[str, list[tuple[float, int]]] = {}
    by_strategy: dict[str, list[float]] = {}
    for record in records:
        by_strategy.setdefault(record.strategy, [])
        if record.solved:
            by_strategy[record.strategy].append(record.wall_ms)
    for strategy, times in by_strategy.items():
        times.sort()
        out[strategy] = [(t, i + 1) for i, t in enumerate(times)]
    return out


def write_cumulative_csv(records: Sequence[RunRecord], path: str) -> None:
    table = cumulative_table(records)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["strategy", "wall_ms", "solved"])
        for strategy in sorted(table):
            for wall_ms, solved in table[strategy]:
                writer.writerow([strategy, f"{wall_ms:.3f}", solved])


def solved_counts(records: Sequence[RunRecord]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for record in records:
        counts.setdefault(record.strategy, 0)
        if record.solved:
            counts[record.strategy] += 1
    return counts
