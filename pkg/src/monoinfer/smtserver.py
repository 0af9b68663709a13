"""A conformant SMT-LIB2 interactive solver over the built-in engine.

Installed as the `monoinfer-smt` console script; reads commands from
standard input (set-logic, declare-fun/declare-const, assert, check-sat,
get-value, get-model, reset, exit) and answers on standard output, so the
process driver -- or any other SMT-LIB2 client -- can use it like an
external solver.  Inputs outside the engine's fragment make check-sat
answer `unknown` rather than erroring out.
"""

from __future__ import annotations

import sys
from typing import Optional, Union

from .engine import Engine, EngineUnsupported
from .model import EvaluationError
from .smtlib import (
    SExpr,
    SmtParseError,
    balanced,
    model_to_sexpr,
    parse_sexprs,
    term_to_sexpr,
    value_to_sexpr,
)
from .terms import (
    Add,
    Apply,
    BOOL,
    BoolLit,
    Cmp,
    CmpOp,
    Const,
    Exists,
    Forall,
    FunctionSymbol,
    INT,
    Implies,
    IntLit,
    Neg,
    Not,
    Sort,
    SortError,
    Sub,
    Term,
    TermError,
    Var,
    mk_and,
    mk_or,
)


class CommandError(Exception):
    """Reported to the client as (error "...")."""


def _parse_sort(sexpr: SExpr) -> Sort:
    if sexpr == "Bool":
        return BOOL
    if sexpr == "Int":
        return INT
    raise CommandError(f"unsupported sort {sexpr!r}")


_CMP_OPS = {
    "<=": CmpOp.LE,
    "<": CmpOp.LT,
    ">=": CmpOp.GE,
    ">": CmpOp.GT,
    "=": CmpOp.EQ,
    "distinct": CmpOp.NE,
}


class SmtServer:
    def __init__(self) -> None:
        self._reset()

    def _reset(self) -> None:
        self.engine = Engine()
        self.signature: dict[str, Union[Const, FunctionSymbol]] = {}
        self.unsupported: Optional[str] = None
        self.last_answer: Optional[str] = None

    # -- term parsing ----------------------------------------------------------

    def parse_term(self, sexpr: SExpr, scope: dict[str, Var]) -> Term:
        if isinstance(sexpr, str):
            if sexpr == "true":
                return BoolLit(True)
            if sexpr == "false":
                return BoolLit(False)
            if sexpr in scope:
                return scope[sexpr]
            item = self.signature.get(sexpr)
            if isinstance(item, Const):
                return item
            if isinstance(item, FunctionSymbol):
                if item.arity != 0:
                    raise CommandError(f"{sexpr} expects {item.arity} arguments")
                return Apply(item, ())
            try:
                return IntLit(int(sexpr))
            except ValueError:
                raise CommandError(f"unknown symbol {sexpr!r}")
        if not sexpr:
            raise CommandError("empty term")
        head, *rest = sexpr
        if head in ("forall", "exists"):
            if len(rest) != 2 or not isinstance(rest[0], list):
                raise CommandError(f"malformed {head}")
            bound = []
            inner = dict(scope)
            for binder in rest[0]:
                if not (isinstance(binder, list) and len(binder) == 2):
                    raise CommandError(f"malformed binder {binder!r}")
                var = Var(binder[0], _parse_sort(binder[1]))
                bound.append(var)
                inner[var.name] = var
            body = self.parse_term(rest[1], inner)
            return (Forall if head == "forall" else Exists)(bound, body)
        args = [self.parse_term(a, scope) for a in rest]
        try:
            return self._apply_head(head, args)
        except (SortError, TermError) as err:
            raise CommandError(str(err))

    def _apply_head(self, head: SExpr, args: list[Term]) -> Term:
        if not isinstance(head, str):
            raise CommandError(f"malformed application head {head!r}")
        if head == "+":
            out = args[0]
            for a in args[1:]:
                out = Add(out, a)
            return out
        if head == "-":
            if len(args) == 1:
                return Neg(args[0])
            out = args[0]
            for a in args[1:]:
                out = Sub(out, a)
            return out
        if head in _CMP_OPS:
            if len(args) != 2:
                raise CommandError(f"{head} expects exactly two operands")
            return Cmp(_CMP_OPS[head], args[0], args[1])
        if head == "not":
            return Not(args[0])
        if head == "and":
            return mk_and(args)
        if head == "or":
            return mk_or(args)
        if head == "=>":
            out = args[-1]
            for a in reversed(args[:-1]):
                out = Implies(a, out)
            return out
        item = self.signature.get(head)
        if isinstance(item, FunctionSymbol):
            return Apply(item, args)
        raise CommandError(f"unknown function {head!r}")

    # -- commands ------------------------------------------------------------------

    def handle(self, command: SExpr) -> Optional[str]:
        """Execute one command; returns the response text (None for silence)."""
        if not isinstance(command, list) or not command:
            raise CommandError("malformed command")
        head = command[0]
        if head in ("set-logic", "set-option", "set-info"):
            return None
        if head == "declare-fun":
            if len(command) != 4 or not isinstance(command[2], list):
                raise CommandError("malformed declare-fun")
            return self._declare(command[1], command[2], command[3])
        if head == "declare-const":
            if len(command) != 3:
                raise CommandError("malformed declare-const")
            return self._declare(command[1], [], command[2])
        if head == "assert":
            if len(command) != 2:
                raise CommandError("malformed assert")
            term = self.parse_term(command[1], {})
            if not term.sort.is_bool:
                raise CommandError("asserted term is not Boolean")
            self.last_answer = None
            if self.unsupported is None:
                try:
                    self.engine.assert_term(term)
                except EngineUnsupported as err:
                    self.unsupported = str(err)
            return None
        if head == "check-sat":
            if self.unsupported is not None:
                self.last_answer = "unknown"
            else:
                self.last_answer = self.engine.check()
            return self.last_answer
        if head == "get-value":
            if len(command) != 2 or not isinstance(command[1], list):
                raise CommandError("malformed get-value")
            return self._get_value(command[1])
        if head == "get-model":
            if self.last_answer != "sat":
                raise CommandError("get-model requires a preceding sat answer")
            return model_to_sexpr(
                self.engine.extract_model(), list(self.signature.values())
            )
        if head == "reset":
            self._reset()
            return None
        if head == "exit":
            raise SystemExit(0)
        raise CommandError(f"unsupported command {head!r}")

    def _declare(self, name: SExpr, arg_sorts: list, result: SExpr) -> None:
        if not isinstance(name, str):
            raise CommandError("malformed declaration name")
        if name in self.signature:
            raise CommandError(f"symbol {name!r} already declared")
        if not arg_sorts:
            const = Const(name, _parse_sort(result))
            self.signature[name] = const
            self.engine.declare_const(const)
        else:
            func = FunctionSymbol(
                name, [_parse_sort(s) for s in arg_sorts], _parse_sort(result)
            )
            self.signature[name] = func
            self.engine.declare_function(func)
        return None

    def _get_value(self, queries: list) -> str:
        if self.last_answer != "sat":
            raise CommandError("get-value requires a preceding sat answer")
        pairs = []
        for q in queries:
            term = self.parse_term(q, {})
            try:
                value = self.engine.evaluate(term)
            except (EvaluationError, EngineUnsupported) as err:
                raise CommandError(f"cannot evaluate {term_to_sexpr(term)}: {err}")
            pairs.append(f"({term_to_sexpr(term)} {value_to_sexpr(value)})")
        return "(" + " ".join(pairs) + ")"


def serve(instream, outstream) -> int:
    server = SmtServer()
    buffer = ""
    for line in instream:
        buffer += line
        stripped = buffer.strip()
        if not stripped or not balanced(stripped):
            continue
        buffer = ""
        try:
            commands = parse_sexprs(stripped)
        except SmtParseError as err:
            print(f'(error "{err}")', file=outstream, flush=True)
            continue
        for command in commands:
            try:
                response = server.handle(command)
            except CommandError as err:
                response = f'(error "{err}")'
            except SystemExit:
                return 0
            if response is not None:
                print(response, file=outstream, flush=True)
    return 0


def main() -> int:
    return serve(sys.stdin, sys.stdout)


if __name__ == "__main__":
    raise SystemExit(main())
