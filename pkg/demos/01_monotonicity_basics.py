"""Monotone uninterpreted functions, end to end on a two-symbol formula.

We assert
    f(c1, 2) = 4  /\  f(c1 + 5, 0) = c2  /\  g(c2) < g(4)
and ask whether a model exists when f must be monotone in its first
argument and anti-monotone in its second, and g monotone.  Chaining the
constraints forces 4 = f(c1,2) <= f(c1+5,0) = c2, hence g(4) <= g(c2),
contradicting the last conjunct: unsatisfiable.  Dropping the
anti-monotonicity of f makes the formula satisfiable again.
"""

from monoinfer import (
    INT,
    Apply,
    Cmp,
    CmpOp,
    Const,
    FunctionSymbol,
    IntLit,
    InternalSession,
    MonotonicitySpec,
    emit_script,
    mk_and,
    monotonize_model,
    solve_lazy,
)
from monoinfer.encode import (
    encode_eager,
    encode_quant_aggregated,
    encode_quant_individual,
)
from monoinfer.terms import Add

f = FunctionSymbol("f", [INT, INT], INT)
g = FunctionSymbol("g", [INT], INT)
c1, c2 = Const("c1", INT), Const("c2", INT)

phi = mk_and(
    [
        Cmp(CmpOp.EQ, Apply(f, (c1, IntLit(2))), IntLit(4)),
        Cmp(CmpOp.EQ, Apply(f, (Add(c1, IntLit(5)), IntLit(0))), c2),
        Cmp(CmpOp.LT, Apply(g, (c2,)), Apply(g, (IntLit(4),))),
    ]
)
strict = MonotonicitySpec({f: ({1}, {2}), g: ({1}, set())})
relaxed = MonotonicitySpec({f: ({1}, set()), g: ({1}, set())})

print("formula:", phi)
print()

# The eager encoding instantiates one ground lemma per ordered pair of
# applications of each constrained symbol -- four lemmas here.
enc = encode_eager(phi, strict)
print(f"eager encoding adds {enc.lemma_count} ground monotonicity lemmas:")
print(emit_script([enc.formula]))

for label, spec in (("strict", strict), ("relaxed", relaxed)):
    session = InternalSession()
    session.assert_formula(encode_eager(phi, spec).formula)
    print(f"instantiated-eager, {label} specification:", session.check_sat())

# The lazy loop discovers the same verdicts while asserting only the lemmas
# that candidate models actually violate.
for label, spec in (("strict", strict), ("relaxed", relaxed)):
    verdict = solve_lazy(phi, spec, InternalSession())
    print(f"instantiated-lazy,  {label} specification:", verdict)

# The quantified encodings need quantifier reasoning; the built-in engine
# only expands quantifiers over finitely bounded sorts, so unbounded Int
# binders come back as unknown (an external quantifier-capable solver can
# be plugged in through --solver-cmd / ProcessSession instead).
for encoder in (encode_quant_individual, encode_quant_aggregated):
    session = InternalSession()
    session.assert_formula(encoder(phi, strict).formula)
    print(f"{encoder.__name__}, strict specification:", session.check_sat())

# A satisfying model fixes the functions only at the points the formula
# mentions; monotonization completes it into globally monotone tables.
verdict = solve_lazy(phi, relaxed, InternalSession())
model = verdict.model
print()
print("model of the relaxed problem:", model)
mono = monotonize_model(model, relaxed)
print("monotonized g on 0..6:", [mono.evaluate(g, (x,)) for x in range(7)])
