"""Finite model presentation and the internal ground-term evaluator.

A Model assigns values to constants and finite lookup tables (with a
default) to uninterpreted functions; it is the shape produced both by the
internal engine and by parsing an external solver's `get-model` response.
The evaluator is deliberately independent of any solving machinery so it
can serve as the second leg of round-trip checks.
"""

from __future__ import annotations

from typing import Mapping, Optional

from .terms import (
    Add,
    And,
    Apply,
    BoolLit,
    Cmp,
    CmpOp,
    Const,
    Exists,
    Forall,
    Implies,
    IntLit,
    Neg,
    Not,
    Or,
    Sub,
    Term,
    TermError,
    Value,
)

ValueVector = tuple[Value, ...]


class EvaluationError(TermError):
    """A term could not be valued under the given model/valuation."""


class FunctionTable:
    """Finite table for one uninterpreted function, with a default output."""

    def __init__(self, rows: Mapping[ValueVector, Value], default: Value):
        self.rows = dict(rows)
        self.default = default

    def lookup(self, args: ValueVector) -> Value:
        return self.rows.get(args, self.default)

    def __eq__(self, other):
        return (
            isinstance(other, FunctionTable)
            and other.rows == self.rows
            and other.default == self.default
        )

    def __repr__(self):
        return f"FunctionTable({self.rows!r}, default={self.default!r})"


class Model:
    """Constant assignments plus per-function tables, keyed by symbol name."""

    def __init__(
        self,
        constants: Optional[Mapping[str, Value]] = None,
        functions: Optional[Mapping[str, FunctionTable]] = None,
    ):
        self.constants = dict(constants or {})
        self.functions = dict(functions or {})

    def value_of_constant(self, name: str) -> Value:
        if name not in self.constants:
            raise EvaluationError(f"model has no value for constant {name}")
        return self.constants[name]

    def table_of(self, name: str) -> FunctionTable:
        if name not in self.functions:
            raise EvaluationError(f"model has no table for function {name}")
        return self.functions[name]

    def __eq__(self, other):
        return (
            isinstance(other, Model)
            and other.constants == self.constants
            and other.functions == self.functions
        )

    def __repr__(self):
        return f"Model(constants={self.constants!r}, functions={self.functions!r})"


def _cmp(op: CmpOp, lhs: Value, rhs: Value) -> bool:
    if op is CmpOp.EQ:
        return lhs == rhs
    if op is CmpOp.NE:
        return lhs != rhs
    if op is CmpOp.LE:
        return lhs <= rhs
    if op is CmpOp.LT:
        return lhs < rhs
    if op is CmpOp.GE:
        return lhs >= rhs
    return lhs > rhs


def evaluate(term: Term, model: Model) -> Value:
    """Evaluate a ground term under a model (quantifier-free fragment only)."""
    match term:
        case IntLit(value=v) | BoolLit(value=v):
            return v
        case Const(name=name):
            return model.value_of_constant(name)
        case Apply(func=f, args=args):
            vals = tuple(evaluate(a, model) for a in args)
            return model.table_of(f.name).lookup(vals)
        case Add(lhs=l, rhs=r):
            return evaluate(l, model) + evaluate(r, model)
        case Sub(lhs=l, rhs=r):
            return evaluate(l, model) - evaluate(r, model)
        case Neg(arg=a):
            return -evaluate(a, model)
        case Cmp(op=op, lhs=l, rhs=r):
            return _cmp(op, evaluate(l, model), evaluate(r, model))
        case Not(arg=a):
            return not evaluate(a, model)
        case And(args=args):
            return all(evaluate(a, model) for a in args)
        case Or(args=args):
            return any(evaluate(a, model) for a in args)
        case Implies(lhs=l, rhs=r):
            return (not evaluate(l, model)) or evaluate(r, model)
        case Forall() | Exists():
            raise EvaluationError("cannot evaluate a quantified term against a model")
        case _:
            raise EvaluationError(f"unhandled node {type(term).__name__}")


def evaluate_under(term: Term, valuation: Mapping[Term, Value]) -> Value:
    """Evaluate a ground term under a point valuation of opaque subterms.

    The valuation maps whole terms (typically constants and function
    applications) to values; arithmetic and logical structure above the
    valued leaves is computed here.  Missing entries are an error.
    """
    if term in valuation:
        return valuation[term]
    match term:
        case IntLit(value=v) | BoolLit(value=v):
            return v
        case Add(lhs=l, rhs=r):
            return evaluate_under(l, valuation) + evaluate_under(r, valuation)
        case Sub(lhs=l, rhs=r):
            return evaluate_under(l, valuation) - evaluate_under(r, valuation)
        case Neg(arg=a):
            return -evaluate_under(a, valuation)
        case Cmp(op=op, lhs=l, rhs=r):
            return _cmp(op, evaluate_under(l, valuation), evaluate_under(r, valuation))
        case Not(arg=a):
            return not evaluate_under(a, valuation)
        case And(args=args):
            return all(evaluate_under(a, valuation) for a in args)
        case Or(args=args):
            return any(evaluate_under(a, valuation) for a in args)
        case Implies(lhs=l, rhs=r):
            return (not evaluate_under(l, valuation)) or evaluate_under(r, valuation)
        case Const(name=name):
            raise EvaluationError(f"no valuation entry for constant {name}")
        case Apply():
            raise EvaluationError(f"no valuation entry for application {term!r}")
        case _:
            raise EvaluationError(f"unhandled node {type(term).__name__}")
