"""Sorted terms, formulas, signatures and monotonicity specifications.

Terms are immutable, sort-checked at construction, and compare/hash
structurally, so syntactic deduplication (sets of terms, argument vectors)
needs no extra normalization.  Everything downstream -- the monotonicity
encodings, the inference translation, SMT-LIB emission and the internal
engine -- is built on this module.
"""

from __future__ import annotations

import enum
import re
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

Value = Union[int, bool]

RESERVED_PREFIXES = ("!sk", "!aux")

_SYMBOL_RE = re.compile(r"[A-Za-z0-9~!@$%^&*_\-+=<>.?/]+")


class SortError(TypeError):
    """A term constructor was given operands of the wrong sort."""


class TermError(ValueError):
    """A structurally invalid term or specification."""


class SkolemizationError(TermError):
    """Existential quantifier found in a position skolemization cannot handle."""


class SortKind(enum.Enum):
    BOOL = "Bool"
    INT = "Int"


class Sort:
    """A term sort: Boolean, or Integer optionally carrying inclusive bounds.

    Bounds are metadata (used for domain constraints and finite expansion);
    two Int sorts with different bounds are still kind-compatible wherever a
    term of Int sort is expected.
    """

    __slots__ = ("kind", "bounds")

    def __init__(self, kind: SortKind, bounds: Optional[tuple[int, int]] = None):
        if bounds is not None:
            if kind is not SortKind.INT:
                raise SortError("only Integer sorts carry bounds")
            lo, hi = bounds
            if lo > hi:
                raise SortError(f"empty bounds interval ({lo}, {hi})")
            bounds = (int(lo), int(hi))
        self.kind = kind
        self.bounds = bounds

    @property
    def is_bool(self) -> bool:
        return self.kind is SortKind.BOOL

    @property
    def is_int(self) -> bool:
        return self.kind is SortKind.INT

    @property
    def is_bounded(self) -> bool:
        """True if the sort has finitely many values (Bool, or Int with bounds)."""
        return self.is_bool or self.bounds is not None

    def values(self) -> list[Value]:
        """All values of a bounded sort, in order."""
        if self.is_bool:
            return [False, True]
        if self.bounds is None:
            raise TermError("unbounded Integer sort has no finite value list")
        lo, hi = self.bounds
        return list(range(lo, hi + 1))

    def same_kind(self, other: "Sort") -> bool:
        return self.kind is other.kind

    def __eq__(self, other):
        return (
            isinstance(other, Sort)
            and self.kind is other.kind
            and self.bounds == other.bounds
        )

    def __hash__(self):
        return hash((self.kind, self.bounds))

    def __repr__(self):
        if self.bounds is not None:
            return f"Int[{self.bounds[0]}..{self.bounds[1]}]"
        return self.kind.value


BOOL = Sort(SortKind.BOOL)
INT = Sort(SortKind.INT)


def bounded_int(lo: int, hi: int) -> Sort:
    return Sort(SortKind.INT, (lo, hi))


def check_symbol_name(name: str) -> str:
    """Reject empty, malformed, or reserved-prefix identifiers (user input path)."""
    if not name or not _SYMBOL_RE.fullmatch(name) or name[0].isdigit():
        raise TermError(f"invalid identifier {name!r}")
    for prefix in RESERVED_PREFIXES:
        if name.startswith(prefix):
            raise TermError(f"identifier {name!r} uses reserved prefix {prefix!r}")
    return name


class FunctionSymbol:
    """A (possibly 0-ary) function symbol of a signature."""

    __slots__ = ("name", "arg_sorts", "result_sort", "uninterpreted", "_hash")

    def __init__(
        self,
        name: str,
        arg_sorts: Sequence[Sort],
        result_sort: Sort,
        uninterpreted: bool = True,
    ):
        self.name = name
        self.arg_sorts = tuple(arg_sorts)
        self.result_sort = result_sort
        self.uninterpreted = uninterpreted
        self._hash = hash((name, self.arg_sorts, result_sort, uninterpreted))

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)

    def __eq__(self, other):
        return (
            isinstance(other, FunctionSymbol)
            and self.name == other.name
            and self.arg_sorts == other.arg_sorts
            and self.result_sort == other.result_sort
            and self.uninterpreted == other.uninterpreted
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        args = ", ".join(map(repr, self.arg_sorts))
        return f"{self.name}({args}) -> {self.result_sort!r}"


class Term:
    """Base class for all term/formula nodes.

    Each node seals an immutable key of its fields at construction; equality
    and hashing are structural via that key (hash compared first).
    """

    __slots__ = ("sort", "_hash", "_key")

    sort: Sort

    def _seal(self, sort: Sort, *key) -> None:
        self.sort = sort
        self._key = key
        self._hash = hash((type(self),) + key)

    def __eq__(self, other):
        return self is other or (
            type(other) is type(self)
            and self._hash == other._hash
            and self._key == other._key
        )

    def __hash__(self):
        return self._hash

    def children(self) -> tuple["Term", ...]:
        return ()

    def __repr__(self):
        from .smtlib import term_to_sexpr

        return term_to_sexpr(self)


class IntLit(Term):
    __slots__ = ("value",)
    __match_args__ = ("value",)

    def __init__(self, value: int):
        self.value = int(value)
        self._seal(INT, self.value)


class BoolLit(Term):
    __slots__ = ("value",)
    __match_args__ = ("value",)

    def __init__(self, value: bool):
        self.value = bool(value)
        self._seal(BOOL, self.value)


TRUE = BoolLit(True)
FALSE = BoolLit(False)


class Const(Term):
    __slots__ = ("name",)
    __match_args__ = ("name", "sort")

    def __init__(self, name: str, sort: Sort):
        self.name = name
        self._seal(sort, name, sort)


class Var(Term):
    """A bound variable; must occur under a binder that declares it."""

    __slots__ = ("name",)
    __match_args__ = ("name", "sort")

    def __init__(self, name: str, sort: Sort):
        self.name = name
        self._seal(sort, name, sort)


class Apply(Term):
    __slots__ = ("func", "args")
    __match_args__ = ("func", "args")

    def __init__(self, func: FunctionSymbol, args: Sequence[Term]):
        args = tuple(args)
        if len(args) != func.arity:
            raise SortError(
                f"{func.name} expects {func.arity} arguments, got {len(args)}"
            )
        for i, (arg, want) in enumerate(zip(args, func.arg_sorts)):
            if not arg.sort.same_kind(want):
                raise SortError(
                    f"{func.name} argument {i + 1} has sort {arg.sort!r}, expected {want!r}"
                )
        self.func = func
        self.args = args
        self._seal(func.result_sort, func, args)

    def children(self):
        return self.args


def _require_int(term: Term, op: str) -> Term:
    if not term.sort.is_int:
        raise SortError(f"{op} requires Integer operands, got {term.sort!r}")
    return term


def _require_bool(term: Term, op: str) -> Term:
    if not term.sort.is_bool:
        raise SortError(f"{op} requires Boolean operands, got {term.sort!r}")
    return term


class Add(Term):
    __slots__ = ("lhs", "rhs")
    __match_args__ = ("lhs", "rhs")

    def __init__(self, lhs: Term, rhs: Term):
        self.lhs = _require_int(lhs, "+")
        self.rhs = _require_int(rhs, "+")
        self._seal(INT, lhs, rhs)

    def children(self):
        return (self.lhs, self.rhs)


class Sub(Term):
    __slots__ = ("lhs", "rhs")
    __match_args__ = ("lhs", "rhs")

    def __init__(self, lhs: Term, rhs: Term):
        self.lhs = _require_int(lhs, "-")
        self.rhs = _require_int(rhs, "-")
        self._seal(INT, lhs, rhs)

    def children(self):
        return (self.lhs, self.rhs)


class Neg(Term):
    __slots__ = ("arg",)
    __match_args__ = ("arg",)

    def __init__(self, arg: Term):
        self.arg = _require_int(arg, "unary -")
        self._seal(INT, arg)

    def children(self):
        return (self.arg,)


class CmpOp(enum.Enum):
    LE = "<="
    LT = "<"
    GE = ">="
    GT = ">"
    EQ = "="
    NE = "distinct"


_ORDER_OPS = (CmpOp.LE, CmpOp.LT, CmpOp.GE, CmpOp.GT)


class Cmp(Term):
    __slots__ = ("op", "lhs", "rhs")
    __match_args__ = ("op", "lhs", "rhs")

    def __init__(self, op: CmpOp, lhs: Term, rhs: Term):
        if not lhs.sort.same_kind(rhs.sort):
            raise SortError(
                f"comparison operands differ in sort: {lhs.sort!r} vs {rhs.sort!r}"
            )
        if op in _ORDER_OPS and not lhs.sort.is_int:
            raise SortError(
                f"{op.value} is only defined on Integer terms; "
                "use ordering_atom for Boolean ordering"
            )
        self.op = op
        self.lhs = lhs
        self.rhs = rhs
        self._seal(BOOL, op, lhs, rhs)

    def children(self):
        return (self.lhs, self.rhs)


class Not(Term):
    __slots__ = ("arg",)
    __match_args__ = ("arg",)

    def __init__(self, arg: Term):
        self.arg = _require_bool(arg, "not")
        self._seal(BOOL, arg)

    def children(self):
        return (self.arg,)


class _NaryBool(Term):
    __slots__ = ("args",)
    __match_args__ = ("args",)

    def __init__(self, args: Sequence[Term]):
        args = tuple(args)
        if len(args) < 2:
            raise TermError(f"{type(self).__name__} needs at least two operands")
        for a in args:
            _require_bool(a, type(self).__name__.lower())
        self.args = args
        self._seal(BOOL, args)

    def children(self):
        return self.args


class And(_NaryBool):
    __slots__ = ()


class Or(_NaryBool):
    __slots__ = ()


class Implies(Term):
    __slots__ = ("lhs", "rhs")
    __match_args__ = ("lhs", "rhs")

    def __init__(self, lhs: Term, rhs: Term):
        self.lhs = _require_bool(lhs, "=>")
        self.rhs = _require_bool(rhs, "=>")
        self._seal(BOOL, lhs, rhs)

    def children(self):
        return (self.lhs, self.rhs)


class _Quant(Term):
    __slots__ = ("bound", "body")
    __match_args__ = ("bound", "body")

    def __init__(self, bound: Sequence[Var], body: Term):
        bound = tuple(bound)
        if not bound:
            raise TermError("quantifier needs at least one bound variable")
        names = [v.name for v in bound]
        if len(set(names)) != len(names):
            raise TermError(f"duplicate bound variable in {names}")
        _require_bool(body, "quantifier body")
        inner = _binder_names(body)
        shadowed = inner.intersection(names)
        if shadowed:
            raise TermError(f"variable shadowing is forbidden: {sorted(shadowed)}")
        self.bound = bound
        self.body = body
        self._seal(BOOL, bound, body)

    def children(self):
        return (self.body,)


class Forall(_Quant):
    __slots__ = ()


class Exists(_Quant):
    __slots__ = ()


def _binder_names(term: Term) -> set[str]:
    names: set[str] = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, _Quant):
            names.update(v.name for v in t.bound)
        stack.extend(t.children())
    return names


# -- convenience constructors -------------------------------------------------


def mk_and(args: Iterable[Term]) -> Term:
    """Conjunction that flattens trivial cases: 0 operands -> true, 1 -> itself."""
    args = list(args)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(args)


def mk_or(args: Iterable[Term]) -> Term:
    args = list(args)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(args)


def mk_implies(antecedents: Sequence[Term], consequent: Term) -> Term:
    """Implication whose antecedent conjunction may be empty (yielding just the consequent)."""
    if not antecedents:
        return consequent
    return Implies(mk_and(antecedents), consequent)


def lit(value: Value) -> Term:
    return BoolLit(value) if isinstance(value, bool) else IntLit(value)


def eq(lhs: Term, rhs: Term) -> Term:
    return Cmp(CmpOp.EQ, lhs, rhs)


def ne(lhs: Term, rhs: Term) -> Term:
    return Cmp(CmpOp.NE, lhs, rhs)


def le(lhs: Term, rhs: Term) -> Term:
    return Cmp(CmpOp.LE, lhs, rhs)


def lt(lhs: Term, rhs: Term) -> Term:
    return Cmp(CmpOp.LT, lhs, rhs)


def ordering_atom(lhs: Term, rhs: Term) -> Term:
    """`lhs <= rhs` in the sort's total order.

    Integer sorts use the arithmetic ordering; Boolean sorts use the
    propositional encoding of false < true, i.e. an implication.
    """
    if not lhs.sort.same_kind(rhs.sort):
        raise SortError(
            f"ordering_atom operands differ in sort: {lhs.sort!r} vs {rhs.sort!r}"
        )
    if lhs.sort.is_bool:
        return Implies(lhs, rhs)
    return Cmp(CmpOp.LE, lhs, rhs)


# -- monotonicity specifications ----------------------------------------------


class MonotonicitySpec:
    """Per-symbol disjoint index sets of monotone / anti-monotone arguments (1-based)."""

    def __init__(
        self,
        entries: Mapping[FunctionSymbol, tuple[Iterable[int], Iterable[int]]],
    ):
        table: dict[FunctionSymbol, tuple[frozenset[int], frozenset[int]]] = {}
        for func, (mono, anti) in entries.items():
            mono = frozenset(mono)
            anti = frozenset(anti)
            if not func.uninterpreted:
                raise TermError(
                    f"monotonicity specification for interpreted symbol {func.name}"
                )
            if mono & anti:
                raise TermError(
                    f"{func.name}: monotone and anti-monotone index sets overlap"
                )
            valid = range(1, func.arity + 1)
            if not mono <= set(valid) or not anti <= set(valid):
                raise TermError(
                    f"{func.name}: argument indices must lie in 1..{func.arity}"
                )
            table[func] = (mono, anti)
        self.entries = table

    def monotone(self, func: FunctionSymbol) -> frozenset[int]:
        return self.entries.get(func, (frozenset(), frozenset()))[0]

    def anti_monotone(self, func: FunctionSymbol) -> frozenset[int]:
        return self.entries.get(func, (frozenset(), frozenset()))[1]

    def constrained_indices(self, func: FunctionSymbol) -> frozenset[int]:
        mono, anti = self.entries.get(func, (frozenset(), frozenset()))
        return mono | anti

    def constrained_symbols(self) -> list[FunctionSymbol]:
        """Symbols with at least one constrained argument, in insertion order."""
        return [f for f, (m, a) in self.entries.items() if m or a]

    def __contains__(self, func: FunctionSymbol) -> bool:
        return func in self.entries

    def __eq__(self, other):
        return isinstance(other, MonotonicitySpec) and other.entries == self.entries

    def __repr__(self):
        parts = [
            f"{f.name}: ({sorted(m)}, {sorted(a)})" for f, (m, a) in self.entries.items()
        ]
        return "MonotonicitySpec{" + ", ".join(parts) + "}"


# -- argument vectors ----------------------------------------------------------

ArgVector = tuple[Term, ...]


def subst_at(vector: ArgVector, index: int, value: Term) -> ArgVector:
    """The vector that agrees with `vector` everywhere except position `index` (1-based)."""
    if not 1 <= index <= len(vector):
        raise IndexError(f"position {index} out of range 1..{len(vector)}")
    old = vector[index - 1]
    if not old.sort.same_kind(value.sort):
        raise SortError(
            f"replacement sort {value.sort!r} does not match component sort {old.sort!r}"
        )
    return vector[: index - 1] + (value,) + vector[index:]


# -- structural utilities ------------------------------------------------------


def iter_subterms(term: Term) -> Iterator[Term]:
    """Preorder traversal of all subterms, quantified bodies included."""
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(reversed(t.children()))


def subterms(term: Term) -> set[Term]:
    return set(iter_subterms(term))


def applications_in_order(term: Term, func: FunctionSymbol) -> list[ArgVector]:
    """Argument vectors of all applications of `func`, deduplicated syntactically,
    in order of first occurrence (left-to-right preorder)."""
    seen: dict[ArgVector, None] = {}
    for t in iter_subterms(term):
        if isinstance(t, Apply) and t.func == func:
            seen.setdefault(t.args)
    return list(seen)


def applications_of(term: Term, func: FunctionSymbol) -> set[ArgVector]:
    return set(applications_in_order(term, func))


def symbols_in_order(term: Term) -> list[FunctionSymbol]:
    """Distinct function symbols applied in `term`, in first-occurrence order."""
    seen: dict[FunctionSymbol, None] = {}
    for t in iter_subterms(term):
        if isinstance(t, Apply):
            seen.setdefault(t.func)
    return list(seen)


def constants_in_order(term: Term) -> list[Const]:
    seen: dict[Const, None] = {}
    for t in iter_subterms(term):
        if isinstance(t, Const):
            seen.setdefault(t)
    return list(seen)


def free_vars(term: Term) -> set[Var]:
    """Variables not captured by any enclosing binder."""

    def walk(t: Term, bound: frozenset[Var]) -> set[Var]:
        if isinstance(t, Var):
            return set() if t in bound else {t}
        if isinstance(t, _Quant):
            return walk(t.body, bound | frozenset(t.bound))
        out: set[Var] = set()
        for c in t.children():
            out |= walk(c, bound)
        return out

    return walk(term, frozenset())


def is_quantifier_free(term: Term) -> bool:
    return not any(isinstance(t, _Quant) for t in iter_subterms(term))


def substitute(term: Term, mapping: Mapping[Var, Term]) -> Term:
    """Capture-avoiding substitution of bound variables by terms.

    Shadowing is forbidden at construction, so a binder never re-binds a
    mapped variable; the binder case only drops mappings defensively.
    """
    if not mapping:
        return term

    def walk(t: Term, mapping: Mapping[Var, Term]) -> Term:
        match t:
            case Var():
                return mapping.get(t, t)
            case IntLit() | BoolLit() | Const():
                return t
            case Apply(func=f, args=args):
                return Apply(f, [walk(a, mapping) for a in args])
            case Add(lhs=l, rhs=r):
                return Add(walk(l, mapping), walk(r, mapping))
            case Sub(lhs=l, rhs=r):
                return Sub(walk(l, mapping), walk(r, mapping))
            case Neg(arg=a):
                return Neg(walk(a, mapping))
            case Cmp(op=op, lhs=l, rhs=r):
                return Cmp(op, walk(l, mapping), walk(r, mapping))
            case Not(arg=a):
                return Not(walk(a, mapping))
            case And(args=args):
                return And([walk(a, mapping) for a in args])
            case Or(args=args):
                return Or([walk(a, mapping) for a in args])
            case Implies(lhs=l, rhs=r):
                return Implies(walk(l, mapping), walk(r, mapping))
            case Forall(bound=bound, body=body) | Exists(bound=bound, body=body):
                inner = {v: s for v, s in mapping.items() if v not in bound}
                new_body = walk(body, inner) if inner else body
                return type(t)(bound, new_body)
            case _:
                raise TermError(f"substitute: unhandled node {type(t).__name__}")

    return walk(term, dict(mapping))


class NameSupply:
    """Deterministic source of fresh reserved-prefix constant names.

    Confine one supply to a single encoding query; reserved prefixes are
    rejected from user signatures, so fresh names cannot collide with them.
    """

    def __init__(self, prefix: str = "!sk", avoid: Iterable[str] = ()):
        if prefix not in RESERVED_PREFIXES:
            raise TermError(f"fresh-name prefix must be one of {RESERVED_PREFIXES}")
        self._prefix = prefix
        self._next = 0
        self._avoid = set(avoid)

    def fresh(self, sort: Sort) -> Const:
        while True:
            name = f"{self._prefix}{self._next}"
            self._next += 1
            if name not in self._avoid:
                self._avoid.add(name)
                return Const(name, sort)


def _names_in_use(term: Term) -> set[str]:
    names: set[str] = set()
    for t in iter_subterms(term):
        if isinstance(t, Const):
            names.add(t.name)
        elif isinstance(t, Apply):
            names.add(t.func.name)
    return names


def skolemize(term: Term, supply: Optional[NameSupply] = None) -> Term:
    """Replace positively-occurring existentials by fresh constants.

    Exactly one fresh constant is introduced per bound variable of each
    eliminated binder.  Existentials in negative positions, or under a
    universal quantifier, signal an encoding bug and are rejected.
    """
    if not any(isinstance(t, Exists) for t in iter_subterms(term)):
        return term
    if supply is None:
        supply = NameSupply(avoid=_names_in_use(term))

    def walk(t: Term, positive: bool) -> Term:
        match t:
            case Exists(bound=bound, body=body):
                if not positive:
                    raise SkolemizationError(
                        "existential quantifier in negative position"
                    )
                mapping = {v: supply.fresh(v.sort) for v in bound}
                return walk(substitute(body, mapping), positive)
            case Forall(bound=bound, body=body):
                if any(isinstance(s, Exists) for s in iter_subterms(body)):
                    raise SkolemizationError(
                        "existential quantifier under a universal binder"
                    )
                return t
            case Not(arg=a):
                return Not(walk(a, not positive))
            case Implies(lhs=l, rhs=r):
                return Implies(walk(l, not positive), walk(r, positive))
            case And(args=args):
                return And([walk(a, positive) for a in args])
            case Or(args=args):
                return Or([walk(a, positive) for a in args])
            case _:
                return t

    return walk(term, True)


def check_term(term: Term, bound: frozenset[Var] = frozenset()) -> Sort:
    """Full recursive sort check; raises on any violation.

    Constructors already enforce local correctness, so this is a defensive
    re-verification used by property tests and the problem ingestion path.
    """
    match term:
        case IntLit() | BoolLit() | Const():
            return term.sort
        case Var():
            if term not in bound:
                raise TermError(f"unbound variable {term.name}")
            return term.sort
        case Apply(func=f, args=args):
            if len(args) != f.arity:
                raise SortError(f"arity mismatch on {f.name}")
            for arg, want in zip(args, f.arg_sorts):
                if not check_term(arg, bound).same_kind(want):
                    raise SortError(f"argument sort mismatch on {f.name}")
            return f.result_sort
        case Add(lhs=l, rhs=r) | Sub(lhs=l, rhs=r):
            if not (check_term(l, bound).is_int and check_term(r, bound).is_int):
                raise SortError("arithmetic on non-Integer operands")
            return INT
        case Neg(arg=a):
            if not check_term(a, bound).is_int:
                raise SortError("negation of non-Integer operand")
            return INT
        case Cmp(op=op, lhs=l, rhs=r):
            ls, rs = check_term(l, bound), check_term(r, bound)
            if not ls.same_kind(rs):
                raise SortError("comparison operands differ in sort")
            if op in _ORDER_OPS and not ls.is_int:
                raise SortError("order comparison on Boolean operands")
            return BOOL
        case Not(arg=a):
            if not check_term(a, bound).is_bool:
                raise SortError("negation of non-Boolean operand")
            return BOOL
        case And(args=args) | Or(args=args):
            for a in args:
                if not check_term(a, bound).is_bool:
                    raise SortError("connective over non-Boolean operand")
            return BOOL
        case Implies(lhs=l, rhs=r):
            if not (check_term(l, bound).is_bool and check_term(r, bound).is_bool):
                raise SortError("implication over non-Boolean operands")
            return BOOL
        case Forall(bound=bvs, body=body) | Exists(bound=bvs, body=body):
            if not check_term(body, bound | frozenset(bvs)).is_bool:
                raise SortError("quantifier body must be Boolean")
            return BOOL
        case _:
            raise TermError(f"unknown term node {type(term).__name__}")
