"""Tabular anonymization toolkit.

Enforces and audits minimum class size (k), sensitive-value diversity (l),
distribution closeness (t) and a log-ratio disclosure bound (delta) via value
generalization hierarchies and a full lattice search, and quantifies the
privacy/utility trade-off with class-size and penalty metrics plus a
from-scratch classifier evaluation harness.
"""

__version__ = "0.1.0"

from .anonymizer import (
    AnonymizationResult,
    SearchConfig,
    UnsatisfiableRequirementError,
    anonymize,
    evaluate_node,
    lattice_nodes,
    normalized_level_sum,
)
from .data import (
    AttributeSchema,
    Dataset,
    SplitPair,
    drop_identifiers,
    load_dataset,
    load_schema,
    serialize_dataset,
    split_stratified,
)
from .hierarchy import (
    GeneralizationVector,
    Hierarchy,
    SUPPRESSION_TOKEN,
    generalize_value,
    hierarchies_for_dataset,
    identity_hierarchy,
    load_hierarchy,
    load_hierarchy_dir,
    monotone_violations,
    validate_hierarchy,
)
from .metrics import (
    EvalReport,
    RocCurve,
    accuracy,
    avg_class_size_metric,
    classification_metric,
    roc_auc,
)
from .partition import (
    EquivalenceClass,
    Partition,
    apply_generalization,
    check_partition,
    partition_classes,
    suppress_small_classes,
)
from .privacy import (
    Distribution,
    PrivacyAudit,
    PrivacyRequirement,
    achieved_delta,
    achieved_k,
    achieved_l,
    achieved_t,
    audit,
    dist_equal,
    emd_ordered,
    satisfies,
)
