"""Logic-based model inference: influence graphs + fixed-point observations.

Translates an inference problem into a quantifier-free formula with a
monotonicity specification: an uninterpreted update function per variable
(arity = its regulators, in variable-list order), essentiality constraints
(some context where varying one regulator changes the output), fixed-point
constraints (one per observation, skolemized), and bounds on every bounded
integer application and skolem constant.  Also decodes solver models back
into complete update tables and verifies them independently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .encode import MonotoneModel, monotonize_model
from .model import Model, Value, ValueVector
from .terms import (
    And,
    Apply,
    BoolLit,
    Cmp,
    CmpOp,
    Const,
    Exists,
    FunctionSymbol,
    IntLit,
    MonotonicitySpec,
    NameSupply,
    Sort,
    Term,
    Var,
    check_symbol_name,
    iter_subterms,
    lit as value_lit,
    mk_and,
    ne,
    skolemize,
)


class ProblemError(ValueError):
    """Structurally invalid inference problem."""


class Sign:
    MONOTONE = "monotone"
    ANTI_MONOTONE = "anti-monotone"
    UNKNOWN = "unknown"
    ALL = (MONOTONE, ANTI_MONOTONE, UNKNOWN)


@dataclass(frozen=True)
class NetworkVariable:
    name: str
    domain: Sort

    def __post_init__(self):
        check_symbol_name(self.name)
        if self.domain.is_int:
            if self.domain.bounds is not None:
                lo, hi = self.domain.bounds
                if lo != 0 or hi < 1:
                    raise ProblemError(
                        f"{self.name}: integer domains must be 0..max with max >= 1"
                    )

    @property
    def is_boolean(self) -> bool:
        return self.domain.is_bool

    def values(self) -> list[Value]:
        return self.domain.values()


@dataclass(frozen=True)
class Regulation:
    source: NetworkVariable
    target: NetworkVariable
    sign: str = Sign.UNKNOWN
    essential: bool = False

    def __post_init__(self):
        if self.sign not in Sign.ALL:
            raise ProblemError(f"unknown regulation sign {self.sign!r}")


@dataclass(frozen=True)
class FixedPointObservation:
    """Partial assignment asserting a matching steady state exists."""

    assignments: tuple[tuple[NetworkVariable, Value], ...]
    name: str = ""

    def __post_init__(self):
        if not self.assignments:
            raise ProblemError("observation must assign at least one variable")
        seen = set()
        for var, value in self.assignments:
            if var.name in seen:
                raise ProblemError(f"observation assigns {var.name} twice")
            seen.add(var.name)
            if var.domain.is_bounded:
                if value not in var.values():
                    raise ProblemError(
                        f"value {value!r} outside the domain of {var.name}"
                    )
            elif not isinstance(value, int) or isinstance(value, bool):
                raise ProblemError(
                    f"value {value!r} is not an integer for {var.name}"
                )

    def value_of(self, var: NetworkVariable) -> Optional[Value]:
        for v, value in self.assignments:
            if v == var:
                return value
        return None

    @classmethod
    def of(cls, pairs, name: str = "") -> "FixedPointObservation":
        return cls(tuple(pairs), name)


@dataclass
class InferenceProblem:
    variables: list[NetworkVariable]
    regulations: list[Regulation]
    observations: list[FixedPointObservation]

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ProblemError("duplicate variable names")
        declared = set(self.variables)
        pairs = set()
        for reg in self.regulations:
            if reg.source not in declared or reg.target not in declared:
                raise ProblemError(
                    f"regulation {reg.source.name} -> {reg.target.name} "
                    "references an undeclared variable"
                )
            key = (reg.source.name, reg.target.name)
            if key in pairs:
                raise ProblemError(f"duplicate regulation {key[0]} -> {key[1]}")
            pairs.add(key)
        for obs in self.observations:
            for var, _ in obs.assignments:
                if var not in declared:
                    raise ProblemError(
                        f"observation references undeclared variable {var.name}"
                    )

    def regulators_of(self, target: NetworkVariable) -> list[NetworkVariable]:
        """Regulators in variable-list index order (fixes argument positions)."""
        index = {v: i for i, v in enumerate(self.variables)}
        sources = [r.source for r in self.regulations if r.target == target]
        return sorted(sources, key=lambda v: index[v])

    def regulation(self, source: NetworkVariable, target: NetworkVariable) -> Regulation:
        for r in self.regulations:
            if r.source == source and r.target == target:
                return r
        raise ProblemError(f"no regulation {source.name} -> {target.name}")

    def all_bounded(self) -> bool:
        return all(v.domain.is_bounded for v in self.variables)


@dataclass
class UpdateFunctionTable:
    """Complete update table over the finite product domain of the regulators."""

    symbol: FunctionSymbol
    rows: dict[ValueVector, Value]

    def __post_init__(self):
        expected = 1
        for sort in self.symbol.arg_sorts:
            expected *= len(sort.values())
        if len(self.rows) != expected:
            raise ProblemError(
                f"{self.symbol.name}: table has {len(self.rows)} rows, "
                f"expected {expected}"
            )
        out_values = set(self.symbol.result_sort.values())
        for point, out in self.rows.items():
            if out not in out_values:
                raise ProblemError(
                    f"{self.symbol.name}{point}: output {out!r} outside the target domain"
                )

    def lookup(self, args: ValueVector) -> Value:
        return self.rows[tuple(args)]


def update_symbol_name(var: NetworkVariable) -> str:
    return f"f_{var.name}"


def build_signature(problem: InferenceProblem) -> dict[NetworkVariable, FunctionSymbol]:
    """One uninterpreted update symbol per variable; argument order follows
    the variable list, result sort is the target's domain."""
    out = {}
    for var in problem.variables:
        regulators = problem.regulators_of(var)
        out[var] = FunctionSymbol(
            update_symbol_name(var),
            [r.domain for r in regulators],
            var.domain,
        )
    return out


def build_monotonicity_spec(problem: InferenceProblem) -> MonotonicitySpec:
    signature = build_signature(problem)
    entries = {}
    for var in problem.variables:
        regulators = problem.regulators_of(var)
        mono = set()
        anti = set()
        for i, reg_var in enumerate(regulators, start=1):
            sign = problem.regulation(reg_var, var).sign
            if sign == Sign.MONOTONE:
                mono.add(i)
            elif sign == Sign.ANTI_MONOTONE:
                anti.add(i)
        entries[signature[var]] = (mono, anti)
    return MonotonicitySpec(entries)


def essentiality_constraint(
    problem: InferenceProblem,
    target: NetworkVariable,
    source: NetworkVariable,
    simplify: bool = True,
) -> Term:
    """Existence of a context in which varying the source regulator changes
    the target's output.  With simplification, a Boolean source is directly
    instantiated with true/false instead of two extra binders."""
    reg = problem.regulation(source, target)
    if not reg.essential:
        raise ProblemError(
            f"regulation {source.name} -> {target.name} is not declared essential"
        )
    signature = build_signature(problem)
    func = signature[target]
    regulators = problem.regulators_of(target)
    position = regulators.index(source) + 1
    context = {
        i: Var(f"z{i}", regulators[i - 1].domain)
        for i in range(1, len(regulators) + 1)
        if i != position
    }
    if simplify and source.is_boolean:
        hi: Term = BoolLit(True)
        lo: Term = BoolLit(False)
        binders: list[Var] = []
    else:
        x = Var("x", source.domain)
        y = Var("y", source.domain)
        hi, lo = x, y
        binders = [x, y]
    binders += [context[i] for i in sorted(context)]
    args_hi = tuple(
        hi if i == position else context[i] for i in range(1, len(regulators) + 1)
    )
    args_lo = tuple(
        lo if i == position else context[i] for i in range(1, len(regulators) + 1)
    )
    body = ne(Apply(func, args_hi), Apply(func, args_lo))
    if not binders:
        return body
    return Exists(binders, body)


def fixed_point_constraint(
    problem: InferenceProblem,
    observation: FixedPointObservation,
    simplify: bool = True,
) -> Term:
    """Existence of a fixed point matching the partial observation.

    With simplification, observed values are propagated into all function
    applications so fully observed fixed points come out ground; without it,
    the raw schema quantifies over all variables and keeps the value
    equations as separate conjuncts.
    """
    signature = build_signature(problem)
    state: dict[NetworkVariable, Term] = {}
    binders: list[Var] = []
    for var in problem.variables:
        observed = observation.value_of(var)
        if simplify and observed is not None:
            state[var] = value_lit(observed)
        else:
            v = Var(f"x_{var.name}", var.domain)
            state[var] = v
            binders.append(v)
    conjuncts: list[Term] = []
    for var in problem.variables:
        app = Apply(signature[var], tuple(state[r] for r in problem.regulators_of(var)))
        observed = observation.value_of(var)
        if simplify and observed is not None:
            conjuncts.append(Cmp(CmpOp.EQ, app, value_lit(observed)))
        else:
            conjuncts.append(Cmp(CmpOp.EQ, state[var], app))
    if not simplify:
        for var in problem.variables:
            observed = observation.value_of(var)
            if observed is not None:
                conjuncts.append(Cmp(CmpOp.EQ, state[var], value_lit(observed)))
    body = mk_and(conjuncts)
    if not binders:
        return body
    return Exists(binders, body)


def bounds_constraints(formula: Term) -> list[Term]:
    """lo <= t <= hi for every bounded-integer application term and bounded
    skolem constant in the (already skolemized) formula, in first-occurrence
    order."""
    out: list[Term] = []
    seen: set[Term] = set()
    for t in iter_subterms(formula):
        if t in seen:
            continue
        if isinstance(t, (Apply, Const)) and t.sort.is_int and t.sort.bounds:
            seen.add(t)
            lo, hi = t.sort.bounds
            out.append(Cmp(CmpOp.LE, IntLit(lo), t))
            out.append(Cmp(CmpOp.LE, t, IntLit(hi)))
    return out


def encode_inference(
    problem: InferenceProblem, simplify: bool = True
) -> tuple[Term, MonotonicitySpec]:
    """The full encoding: skolemized essentiality and fixed-point constraints
    plus bounds, paired with the monotonicity specification."""
    constraints: list[Term] = []
    for target in problem.variables:
        for source in problem.regulators_of(target):
            if problem.regulation(source, target).essential:
                constraints.append(
                    essentiality_constraint(problem, target, source, simplify)
                )
    for obs in problem.observations:
        constraints.append(fixed_point_constraint(problem, obs, simplify))
    supply = NameSupply()
    core = skolemize(mk_and(constraints), supply) if constraints else BoolLit(True)
    bounds = bounds_constraints(core)
    if bounds:
        parts = list(core.args) if isinstance(core, And) else [core]
        core = mk_and(parts + bounds)
    return core, build_monotonicity_spec(problem)


# -- decoding and verification ----------------------------------------------------


def decode_solution(
    model: Model, problem: InferenceProblem
) -> list[UpdateFunctionTable]:
    """Materialize the model over each finite regulator grid, completing
    unconstrained points through monotonization."""
    if not problem.all_bounded():
        raise ProblemError("cannot decode tables over unbounded domains")
    signature = build_signature(problem)
    spec = build_monotonicity_spec(problem)
    mono: MonotoneModel = monotonize_model(model, spec)
    tables = []
    for var in problem.variables:
        func = signature[var]
        grid = itertools.product(*(s.values() for s in func.arg_sorts))
        rows = {}
        for point in grid:
            out = mono.evaluate(func, point)
            out_values = func.result_sort.values()
            if out not in out_values:
                # model values may exceed the domain only where the formula
                # never constrained the point; clamp into the target domain
                out = max(min(out, out_values[-1]), out_values[0])
            rows[point] = out
        tables.append(UpdateFunctionTable(func, rows))
    return tables


@dataclass
class Violation:
    kind: str  # monotonicity | essentiality | fixed-point | structure
    detail: str


@dataclass
class VerificationResult:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self):
        return self.ok


def verify_solution(
    problem: InferenceProblem,
    tables: Sequence[UpdateFunctionTable],
    max_extension_states: int = 1 << 20,
) -> VerificationResult:
    """Check complete tables directly against the problem semantics:
    (1) every signed regulation is monotone/anti-monotone over the full grid,
    (2) every essential regulation changes the output in some context,
    (3) every observation extends to a fixed point of the table dynamics.
    Returns the first violation found."""
    if not problem.all_bounded():
        return VerificationResult(
            False, Violation("structure", "unbounded domains cannot be verified")
        )
    by_name = {t.symbol.name: t for t in tables}
    for var in problem.variables:
        if update_symbol_name(var) not in by_name:
            return VerificationResult(
                False, Violation("structure", f"missing table for {var.name}")
            )
    for var in problem.variables:
        table = by_name[update_symbol_name(var)]
        regulators = problem.regulators_of(var)
        for position, reg_var in enumerate(regulators, start=1):
            reg = problem.regulation(reg_var, var)
            if reg.sign != Sign.UNKNOWN:
                bad = _monotonicity_violation(table, position, reg.sign)
                if bad is not None:
                    return VerificationResult(
                        False,
                        Violation(
                            "monotonicity",
                            f"{table.symbol.name} argument {position} "
                            f"({reg_var.name} -> {var.name}, {reg.sign}): "
                            f"rows {bad[0]} -> {table.rows[bad[0]]!r} and "
                            f"{bad[1]} -> {table.rows[bad[1]]!r}",
                        ),
                    )
            if reg.essential and not _is_essential(table, position):
                return VerificationResult(
                    False,
                    Violation(
                        "essentiality",
                        f"{table.symbol.name} ignores argument {position} "
                        f"({reg_var.name} -> {var.name})",
                    ),
                )
    for obs in problem.observations:
        if not _extends_to_fixed_point(problem, by_name, obs, max_extension_states):
            label = obs.name or str(dict((v.name, val) for v, val in obs.assignments))
            return VerificationResult(
                False,
                Violation("fixed-point", f"observation {label} has no fixed-point extension"),
            )
    return VerificationResult(True)


def _monotonicity_violation(
    table: UpdateFunctionTable, position: int, sign: str
) -> Optional[tuple[ValueVector, ValueVector]]:
    """First pair of rows differing only at `position` that violates the sign."""
    arg_sorts = table.symbol.arg_sorts
    idx = position - 1
    for point, out in table.rows.items():
        for next_value in arg_sorts[idx].values():
            if next_value <= point[idx]:
                continue
            neighbour = point[:idx] + (next_value,) + point[idx + 1 :]
            other = table.rows[neighbour]
            if sign == Sign.MONOTONE and not out <= other:
                return point, neighbour
            if sign == Sign.ANTI_MONOTONE and not other <= out:
                return point, neighbour
    return None


def _is_essential(table: UpdateFunctionTable, position: int) -> bool:
    idx = position - 1
    groups: dict[tuple, set] = {}
    for point, out in table.rows.items():
        context = point[:idx] + point[idx + 1 :]
        groups.setdefault(context, set()).add(out)
    return any(len(outputs) > 1 for outputs in groups.values())


def _extends_to_fixed_point(
    problem: InferenceProblem,
    tables: dict[str, UpdateFunctionTable],
    observation: FixedPointObservation,
    max_states: int,
) -> bool:
    free = [v for v in problem.variables if observation.value_of(v) is None]
    count = 1
    for v in free:
        count *= len(v.values())
    if count > max_states:
        raise ProblemError(
            f"fixed-point extension space {count} exceeds budget {max_states}"
        )
    base = {v: observation.value_of(v) for v in problem.variables}
    for combo in itertools.product(*(v.values() for v in free)):
        state = dict(base)
        state.update(zip(free, combo))
        if all(
            tables[update_symbol_name(var)].lookup(
                tuple(state[r] for r in problem.regulators_of(var))
            )
            == state[var]
            for var in problem.variables
        ):
            return True
    return False
