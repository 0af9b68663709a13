"""A small benchmark run: generate a suite, race the four encodings, plot data.

Writes the per-record CSV and the per-strategy cumulative (time, solved)
table the batch runner produces, then prints the solved counts and a crude
text rendering of the cumulative curves.  At desk scale the pattern of the
full evaluation already shows: the instantiation-based strategies stay
ahead of the quantified ones, which fall off as arity grows.
"""

import tempfile
from pathlib import Path

from monoinfer import GeneratorParams, generate_instance, run_batch, save_problem
from monoinfer.encode import Strategy
from monoinfer.harness import (
    cumulative_table,
    solved_counts,
    write_cumulative_csv,
    write_records_csv,
)

workdir = Path(tempfile.mkdtemp(prefix="monoinfer-demo-"))
suite = workdir / "suite"
suite.mkdir()

for i in range(12):
    params = GeneratorParams(
        n_vars=8 + 2 * (i % 4),
        max_arity=3 + i % 5,
        essential_ratio=0.3,
        n_observations=2,
        mode="planted" if i % 3 else "perturbed",
    )
    save_problem(generate_instance(500 + i, params), suite / f"inst_{i:02d}.problem")

records = run_batch(str(suite), list(Strategy), parallelism=4, time_limit_ms=120_000)

records_csv = workdir / "records.csv"
cumulative_csv = workdir / "cumulative.csv"
write_records_csv(records, str(records_csv))
write_cumulative_csv(records, str(cumulative_csv))

print("solved instances per strategy (of 12):")
for strategy, count in sorted(solved_counts(records).items()):
    print(f"  {strategy:<26} {count}")
print()

table = cumulative_table(records)
horizon = max(t for steps in table.values() for t, _ in steps)
print(f"cumulative curves (x: time up to {horizon:.0f} ms, y: solved):")
for strategy in sorted(table):
    steps = table[strategy]
    row = ""
    for cell in range(40):
        t = horizon * (cell + 1) / 40
        solved = max((s for when, s in steps if when <= t), default=0)
        row += " .:-=+*#%@"[min(9, solved * 9 // 12)]
    print(f"  {strategy:<26} |{row}|")
print()
print(f"records CSV:    {records_csv}")
print(f"cumulative CSV: {cumulative_csv}")
