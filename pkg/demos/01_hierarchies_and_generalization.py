"""Value generalization hierarchies: loading, lookups, applying lattice nodes.

Run from the repository root:  python demos/01_hierarchies_and_generalization.py
"""

from pathlib import Path

from tabanon import (
    AttributeSchema,
    Dataset,
    apply_generalization,
    generalize_value,
    load_hierarchy_dir,
)

ROOT = Path(__file__).resolve().parent.parent

hierarchies = load_hierarchy_dir(ROOT / "data" / "hierarchies")
print("shipped hierarchies:", {name: h.height for name, h in sorted(hierarchies.items())})

age = hierarchies["age"]
print("\nage 23 through every level:")
for level in range(age.height + 1):
    print(f"  level {level}: {generalize_value(age, '23', level)}")

education = hierarchies["education"]
for value in ("Bachelors", "HS-grad", "Preschool"):
    chain = " -> ".join(education.paths[value])
    print(f"education {chain}")

# A small table with two quasi-identifiers and a sensitive salary class.
schema = (
    AttributeSchema("age", "quasi_identifier", "numeric_ordinal"),
    AttributeSchema("native-country", "quasi_identifier"),
    AttributeSchema("salary-class", "sensitive"),
)
table = Dataset(schema, (
    ("23", "Mexico", "<=50K"),
    ("27", "Canada", ">50K"),
    ("41", "Portugal", "<=50K"),
    ("44", "Greece", ">50K"),
))
print("\nraw rows:          ", table.rows)
coarse = apply_generalization(table, hierarchies, (2, 1))
print("node (2, 1) rows:   ", coarse.rows)
top = apply_generalization(table, hierarchies, (age.height, hierarchies["native-country"].height))
print("top-of-lattice rows:", top.rows)
