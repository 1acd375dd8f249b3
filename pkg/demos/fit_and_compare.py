"""Fit tree structures to a random six-variable table and compare methods.

Chow-Liu uses pairs only.  Greedy and branch-and-bound may also use triples,
each standing for a hidden variable with three observed children.
"""

from treedecomp import SearchOptions, branch_and_bound, build_catalog, chow_liu, greedy, project_parameters
from treedecomp import random_table

table = random_table(6, seed=42)
catalog = build_catalog(table)

print("top catalog entries:")
for indices, weight in catalog.entries[:5]:
    print(f"  {'-'.join(table.variables[i] for i in indices):12s} {weight:.6f}")

reports = {
    "chow-liu": chow_liu(catalog),
    "greedy": greedy(catalog, SearchOptions(mode="paper")),
    "exact": branch_and_bound(catalog),
}
for name, report in reports.items():
    model = project_parameters(table, report.topology, catalog)
    parts = ", ".join("".join(table.variables[i][1:] for i in c) for c in report.components)
    print(f"{name:9s} weight_sum={report.weight_sum:.6f} "
          f"i_divergence={model.scores.i_divergence:.6f} components=[{parts}]")

# Larger weight sums mean closer approximations: the divergence is the
# sum of single-variable entropies minus the joint entropy minus the weights.
