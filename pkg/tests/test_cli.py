import json

import pytest

from tabanon import load_dataset, load_schema
from tabanon.cli import main

from conftest import dir_snapshot, make_dataset, oracle_audit, write_toy_project


def read_json(path):
    return json.loads(path.read_text())


def write_six_row_toy(root):
    root.mkdir(parents=True, exist_ok=True)
    data = root / "six.csv"
    data.write_text(
        "q,label\n" + "\n".join(f"{v},{l}" for v, l in
                                [("a", "y"), ("a", "n"), ("a", "y"), ("b", "y"), ("b", "n"), ("c", "y")]) + "\n"
    )
    schema = root / "schema.csv"
    schema.write_text("name,role,kind\nq,quasi_identifier,categorical\nlabel,sensitive,categorical\n")
    hier = root / "h"
    hier.mkdir(exist_ok=True)
    (hier / "q.csv").write_text("a;all\nb;all\nc;all\n")
    return data, schema, hier


def test_anonymize_forced_generalization(tmp_path):
    data, schema, hier = write_six_row_toy(tmp_path)
    out = tmp_path / "out"
    code = main([
        "anonymize", "--data", str(data), "--schema", str(schema),
        "--hierarchies", str(hier), "--k", "3", "--suppression-limit", "0",
        "--out", str(out),
    ])
    assert code == 0
    summary = read_json(out / "summary.json")
    assert summary["node"] == [1]
    assert summary["suppressed"] == 0
    assert summary["audit"]["k"] == 6
    audit = read_json(out / "audit.json")
    assert set(audit) == {"k", "l", "t", "delta", "classes", "records", "suppressed"}


def test_anonymize_k1_released_table_is_input(tmp_path):
    data, schema, hier = write_six_row_toy(tmp_path)
    out = tmp_path / "out"
    assert main([
        "anonymize", "--data", str(data), "--schema", str(schema),
        "--hierarchies", str(hier), "--k", "1", "--out", str(out),
    ]) == 0
    released = load_dataset(out / "anonymized.csv", load_schema(schema))
    original = load_dataset(data, load_schema(schema))
    assert released == original
    summary = read_json(out / "summary.json")
    assert summary["avg_class_size"] == original.row_count / summary["audit"]["classes"]


def test_anonymize_unsatisfiable_exit_code(tmp_path):
    data, schema, hier = write_six_row_toy(tmp_path)
    out = tmp_path / "out"
    code = main([
        "anonymize", "--data", str(data), "--schema", str(schema),
        "--hierarchies", str(hier), "--k", "99", "--out", str(out),
    ])
    assert code == 1
    summary = read_json(out / "summary.json")
    assert "error" in summary and summary["best_audit"]["k"] == 6


def test_audit_command_balanced_single_class(tmp_path):
    table = tmp_path / "t.csv"
    table.write_text("q,label\n" + "a,y\na,n\n" * 3)
    schema = tmp_path / "schema.csv"
    schema.write_text("name,role,kind\nq,quasi_identifier,categorical\nlabel,sensitive,categorical\n")
    out = tmp_path / "out"
    assert main(["audit", str(table), "--schema", str(schema), "--out", str(out)]) == 0
    report = read_json(out / "audit.json")
    assert report == {"k": 6, "l": 2, "t": 0.0, "delta": 0.0,
                      "classes": 1, "records": 6, "suppressed": 0}


def test_audit_command_matches_oracle_and_is_idempotent(tmp_path):
    project = write_toy_project(tmp_path / "proj", n_per_cell=6, separable=False)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    for out in (out1, out2):
        assert main(["audit", str(project["data"]), "--schema", str(project["schema"]),
                     "--out", str(out)]) == 0
    assert dir_snapshot(out1) == dir_snapshot(out2)
    report = read_json(out1 / "audit.json")
    d = make_dataset(project["rows"], n_qi=2)
    want = oracle_audit(d)
    assert report["k"] == want["k"] and report["l"] == want["l"]
    assert report["t"] == pytest.approx(want["t"], abs=1e-9)
    assert report["delta"] == pytest.approx(want["delta"], abs=1e-9)


def test_metrics_command(tmp_path):
    table = tmp_path / "t.csv"
    table.write_text("q,label\n" + "a,y\na,n\n" * 5)  # one class of 10
    schema = tmp_path / "schema.csv"
    schema.write_text("name,role,kind\nq,quasi_identifier,categorical\nlabel,sensitive,categorical\n")
    out = tmp_path / "out"
    assert main(["metrics", str(table), "--schema", str(schema), "--k", "5",
                 "--original-count", "12", "--out", str(out)]) == 0
    report = read_json(out / "metrics.json")
    assert report["avg_class_size"] == 10 / (5 * 1)
    # 2 suppressed + 5 non-modal rows out of 12
    assert report["cm"] == pytest.approx((2 + 5) / 12)
    assert report["suppressed"] == 2


def test_evaluate_separable_toy_all_families_perfect(tmp_path):
    project = write_toy_project(tmp_path / "proj", n_per_cell=20, separable=True)
    out = tmp_path / "out"
    code = main([
        "evaluate", "--data", str(project["data"]), "--schema", str(project["schema"]),
        "--models", "knn,tree,rf,ab,gb", "--reduced-grid", "--seed", "1",
        "--out", str(out),
    ])
    assert code == 0
    summary = read_json(out / "evaluation.json")
    assert set(summary["models"]) == {
        "knn", "tree", "random_forest", "adaboost", "gradient_boosting",
    }
    for family, result in summary["models"].items():
        assert result["accuracy"] == 1.0, family
        assert result["auc"] == 1.0, family
        roc_file = (out / f"roc_{family}.csv").read_text().splitlines()
        assert roc_file[0] == "fpr,tpr"
        assert len(roc_file) >= 3


def test_evaluate_single_label_table_errors(tmp_path):
    table = tmp_path / "t.csv"
    table.write_text("q,label\na,y\nb,y\nc,y\nd,y\n")
    schema = tmp_path / "schema.csv"
    schema.write_text("name,role,kind\nq,quasi_identifier,categorical\nlabel,sensitive,categorical\n")
    assert main(["evaluate", "--data", str(table), "--schema", str(schema),
                 "--out", str(tmp_path / "out")]) == 1


def test_evaluate_reports_are_deterministic(tmp_path):
    project = write_toy_project(tmp_path / "proj", n_per_cell=12, separable=False)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    for out in (out1, out2):
        assert main([
            "evaluate", "--data", str(project["data"]), "--schema", str(project["schema"]),
            "--models", "tree,gb", "--reduced-grid", "--seed", "7", "--out", str(out),
        ]) == 0
    assert dir_snapshot(out1) == dir_snapshot(out2)


def test_sweep_k_first_row_matches_raw_evaluation(tmp_path):
    project = write_toy_project(tmp_path / "proj", n_per_cell=12, separable=False)
    sweep_out = tmp_path / "sweep"
    assert main([
        "sweep-k", "--data", str(project["data"]), "--schema", str(project["schema"]),
        "--hierarchies", str(project["hierarchies"]), "--k", "1,3",
        "--models", "tree", "--reduced-grid", "--seed", "5", "--out", str(sweep_out),
    ]) == 0
    eval_out = tmp_path / "raw"
    assert main([
        "evaluate", "--data", str(project["data"]), "--schema", str(project["schema"]),
        "--models", "tree", "--reduced-grid", "--seed", "5", "--out", str(eval_out),
    ]) == 0
    sweep = read_json(sweep_out / "sweep_k.json")
    raw_eval = read_json(eval_out / "evaluation.json")
    assert sweep["rows"][0]["k"] == 1
    assert sweep["rows"][0]["node"] == [0, 0]
    assert sweep["rows"][0]["models"] == raw_eval["models"]
    assert sweep["rows"][0]["cm"] == raw_eval["cm"]
    for row in sweep["rows"]:
        audit = read_json(sweep_out / f"k_{row['k']}" / "audit.json")
        assert audit["k"] >= row["k"]


def test_sweep_techniques_five_rows_and_consistent_audits(tmp_path):
    project = write_toy_project(tmp_path / "proj", n_per_cell=12, separable=False)
    out = tmp_path / "out"
    assert main([
        "sweep-techniques", "--data", str(project["data"]), "--schema", str(project["schema"]),
        "--hierarchies", str(project["hierarchies"]), "--k", "3", "--l", "2",
        "--t", "0.7", "--delta", "1.5", "--models", "gb", "--reduced-grid",
        "--seed", "3", "--out", str(out),
    ]) == 0
    report = read_json(out / "sweep_techniques.json")
    assert [row["config"] for row in report["rows"]] == ["raw", "k", "k_l", "k_t", "k_delta"]
    for row in report["rows"][1:]:
        requirement = row["requirement"]
        emitted = read_json(out / row["config"] / "audit.json")
        table = out / row["config"] / "anonymized.csv"
        d = load_dataset(table, load_schema(project["schema"]))
        want = oracle_audit(d)  # independent re-audit of the released file
        assert emitted["k"] == want["k"] >= requirement["k"]
        if requirement["l"] is not None:
            assert emitted["l"] == want["l"] >= requirement["l"]
        if requirement["t"] is not None:
            assert want["t"] <= requirement["t"] + 1e-9
        if requirement["delta"] is not None:
            assert want["delta"] < requirement["delta"]
    raw_row = report["rows"][0]
    eval_out = tmp_path / "raw"
    assert main([
        "evaluate", "--data", str(project["data"]), "--schema", str(project["schema"]),
        "--models", "gb", "--reduced-grid", "--seed", "3", "--out", str(eval_out),
    ]) == 0
    assert raw_row["models"] == read_json(eval_out / "evaluation.json")["models"]


def test_anonymize_drops_identifier_columns(tmp_path):
    data = tmp_path / "t.csv"
    data.write_text(
        "ssn,q,label\n" + "\n".join(f"{i},{v},y" if i % 2 else f"{i},{v},n"
                                    for i, v in enumerate(["a", "a", "b", "b"])) + "\n"
    )
    schema = tmp_path / "schema.csv"
    schema.write_text(
        "name,role,kind\nssn,identifier,categorical\n"
        "q,quasi_identifier,categorical\nlabel,sensitive,categorical\n"
    )
    out = tmp_path / "out"
    assert main(["anonymize", "--data", str(data), "--schema", str(schema),
                 "--hierarchies", str(tmp_path), "--k", "2", "--out", str(out)]) == 0
    header = (out / "anonymized.csv").read_text().splitlines()[0]
    assert header == "q,label"


def test_anonymize_uncovered_hierarchy_value_errors(tmp_path):
    data, schema, hier = write_six_row_toy(tmp_path)
    (hier / "q.csv").write_text("a;all\nb;all\n")  # no entry for value c
    assert main(["anonymize", "--data", str(data), "--schema", str(schema),
                 "--hierarchies", str(hier), "--k", "2",
                 "--out", str(tmp_path / "out")]) == 1


def test_metrics_original_count_below_rows_errors(tmp_path):
    table = tmp_path / "t.csv"
    table.write_text("q,label\na,y\na,n\n")
    schema = tmp_path / "schema.csv"
    schema.write_text("name,role,kind\nq,quasi_identifier,categorical\nlabel,sensitive,categorical\n")
    assert main(["metrics", str(table), "--schema", str(schema), "--k", "1",
                 "--original-count", "1", "--out", str(tmp_path / "out")]) == 1


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "tabanon", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "tabanon" in proc.stdout


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["anonymize", "--data", "x.csv"])
    assert err.value.code == 2


def test_missing_file_is_runtime_error(tmp_path):
    schema = tmp_path / "schema.csv"
    schema.write_text("name,role,kind\nq,quasi_identifier,categorical\nlabel,sensitive,categorical\n")
    assert main(["audit", str(tmp_path / "absent.csv"), "--schema", str(schema),
                 "--out", str(tmp_path / "out")]) == 1
