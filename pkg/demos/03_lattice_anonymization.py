"""Lattice search: minimal-cost generalization under a privacy requirement.

Run from the repository root:  python demos/03_lattice_anonymization.py
"""

import io

from tabanon import (
    AttributeSchema,
    Dataset,
    PrivacyRequirement,
    SearchConfig,
    UnsatisfiableRequirementError,
    anonymize,
    evaluate_node,
    lattice_nodes,
    load_hierarchy,
    normalized_level_sum,
)

schema = (
    AttributeSchema("city", "quasi_identifier"),
    AttributeSchema("age", "quasi_identifier", "numeric_ordinal"),
    AttributeSchema("income", "sensitive"),
)
rows = []
for city, ages, labels in [
    ("paris", (23, 24, 27, 29), "hhll"),
    ("lyon", (31, 35, 36, 38), "hlll"),
    ("nice", (44, 47), "hl"),
]:
    rows.extend((city, str(a), {"h": "high", "l": "low"}[l]) for a, l in zip(ages, labels))
table = Dataset(schema, tuple(rows))

city_h = load_hierarchy(io.StringIO("paris;france;*\nlyon;france;*\nnice;france;*\n"), "city")
age_rows = "\n".join(f"{a};[{a // 10 * 10}, {a // 10 * 10 + 10});*" for a in range(20, 50))
age_h = load_hierarchy(io.StringIO(age_rows), "age")
hierarchies = {"city": city_h, "age": age_h}

heights = (city_h.height, age_h.height)
print(f"lattice over heights {heights}: {len(lattice_nodes(heights))} nodes")
config = SearchConfig(PrivacyRequirement(k=4), suppression_limit=0.25)
for node in lattice_nodes(heights):
    ok, suppressed, partition = evaluate_node(table, hierarchies, node, config)
    print(f"  node {node}: cost {float(normalized_level_sum(node, heights)):.3f}, "
          f"classes {[ec.size for ec in partition.classes]}, "
          f"suppressed {suppressed}, satisfies={ok}")

result = anonymize(table, hierarchies, config)
print(f"\nchosen node {result.node} (normalized cost {float(result.cost[0]):.3f}, "
      f"{result.suppressed_count} suppressed)")
print("released rows:")
for row in result.output.rows:
    print("  ", row)
print("audit:", result.audit.as_report())

try:
    anonymize(table, hierarchies, SearchConfig(PrivacyRequirement(k=6), 0.0))
except UnsatisfiableRequirementError as exc:
    print(f"\nimpossible request -> {exc}")
    print("closest attempt:", exc.best_node, exc.best_audit.as_report())
