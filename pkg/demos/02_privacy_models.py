"""The four privacy checks on equivalence classes of a toy table.

Run from the repository root:  python demos/02_privacy_models.py
"""

from tabanon import (
    AttributeSchema,
    Dataset,
    PrivacyRequirement,
    achieved_delta,
    achieved_k,
    achieved_l,
    achieved_t,
    partition_classes,
    satisfies,
    suppress_small_classes,
)

schema = (
    AttributeSchema("zip", "quasi_identifier"),
    AttributeSchema("age-band", "quasi_identifier"),
    AttributeSchema("diagnosis", "sensitive"),
)
rows = (
    ("130**", "<30", "heart"),
    ("130**", "<30", "heart"),
    ("130**", "<30", "flu"),
    ("130**", ">=30", "flu"),
    ("130**", ">=30", "heart"),
    ("148**", "<30", "cancer"),
    ("148**", "<30", "heart"),
    ("148**", "<30", "flu"),
    ("148**", ">=30", "cancer"),
)
table = Dataset(schema, rows)
partition = partition_classes(table)

print("equivalence classes:")
for ec in partition.classes:
    print(f"  {ec.signature}: size {ec.size}, sensitive counts {ec.sa_counts}")

print("\nachieved k     :", achieved_k(partition), "(smallest class)")
print("achieved l     :", achieved_l(partition), "(fewest distinct sensitive values)")
print(f"achieved t     : {achieved_t(partition):.4f} (largest distance to the global distribution)")
print(f"achieved delta : {achieved_delta(partition):.4f} (largest |ln(class/global)| ratio)")

requirement = PrivacyRequirement(k=2, l=2)
print(f"\nsatisfies {requirement}? {satisfies(partition, requirement)}")

trimmed = suppress_small_classes(partition, 2)
print(f"after suppressing classes below 2: {len(trimmed.classes)} classes, "
      f"{len(trimmed.suppressed)} rows suppressed")
print(f"now satisfies? {satisfies(trimmed, requirement)}")
