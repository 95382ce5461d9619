import json
import pathlib
import subprocess
import sys

import numpy as np
import pytest

from sylvcert.cli import main
from sylvcert.errors import SchemaError
from sylvcert.io import (matrix_to_pairs, pairs_to_matrix, parse_problem_text,
                         parse_report, problem_to_dict, serialize_report)


def write_problem(path, a, b, c, **options):
    doc = problem_to_dict(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex),
                          np.asarray(c, dtype=complex), **options)
    path.write_text(serialize_report(doc), encoding="utf-8")
    return path


def stripped(text):
    doc = parse_report(text)
    doc.pop("generated_at", None)
    return serialize_report(doc)


class TestMatrixCodec:
    def test_round_trip_exact(self, rng):
        m = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        recovered = pairs_to_matrix(matrix_to_pairs(m), "m")
        assert np.array_equal(recovered, m)

    def test_round_trip_through_json_bits(self, rng):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        text = json.dumps(matrix_to_pairs(m))
        recovered = pairs_to_matrix(json.loads(text), "m")
        assert np.array_equal(recovered, m)

    def test_ragged_rejected(self):
        with pytest.raises(SchemaError):
            pairs_to_matrix([[[1, 0]], [[1, 0], [2, 0]]], "m")

    def test_bad_pair_rejected(self):
        with pytest.raises(SchemaError):
            pairs_to_matrix([[[1, 0, 0]]], "m")
        with pytest.raises(SchemaError):
            pairs_to_matrix([[[1]]], "m")


class TestProblemParsing:
    def test_defaults_applied(self):
        text = json.dumps({"schema_version": "1", "a": [[[2, 0]]], "b": [[[1, 0]]],
                           "c": [[[3, 0]]]})
        spec = parse_problem_text(text)
        assert spec.alpha == pytest.approx(np.pi / 4)
        assert spec.tol == 1e-8
        assert spec.method == "direct"

    def test_malformed_json_reports_line_and_column(self):
        with pytest.raises(SchemaError) as excinfo:
            parse_problem_text('{"schema_version": "1",\n  "a": [[[1,0]],\n}')
        message = str(excinfo.value)
        assert "line" in message and "column" in message

    def test_unknown_schema_version(self):
        with pytest.raises(SchemaError):
            parse_problem_text(json.dumps({"schema_version": "99", "a": [], "b": [], "c": []}))

    def test_dimension_mismatch_rejected(self):
        doc = {"schema_version": "1", "a": [[[1, 0]]], "b": [[[1, 0]]],
               "c": [[[1, 0]], [[0, 0]]]}
        with pytest.raises(SchemaError):
            parse_problem_text(json.dumps(doc))

    def test_non_square_rejected(self):
        doc = {"schema_version": "1", "a": [[[1, 0], [0, 0]]], "b": [[[1, 0]]],
               "c": [[[1, 0]]]}
        with pytest.raises(SchemaError):
            parse_problem_text(json.dumps(doc))

    def test_bad_method_rejected(self):
        doc = {"schema_version": "1", "a": [[[1, 0]]], "b": [[[1, 0]]], "c": [[[1, 0]]],
               "options": {"method": "magic"}}
        with pytest.raises(SchemaError):
            parse_problem_text(json.dumps(doc))


class TestDiagnoseCommand:
    def test_solvable_exit_zero(self, tmp_path, capsys):
        problem = write_problem(tmp_path / "p.json", [[2]], [[1]], [[3]])
        out = tmp_path / "verdict.json"
        code = main(["diagnose", str(problem), "--oracle", "-o", str(out)])
        assert code == 0
        doc = parse_report(out.read_text())
        assert doc["verdict"]["status"] == "solvable"
        assert doc["verdict"]["oracle_agreement"] is True
        np.testing.assert_allclose(
            pairs_to_matrix(doc["verdict"]["solution"], "x"), [[3.0]], atol=1e-9)
        assert "solvable" in capsys.readouterr().out

    def test_unsolvable_exit_one(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[1]], [[1]], [[1]])
        assert main(["diagnose", str(problem)]) == 1

    def test_every_decided_check_names_residual_and_threshold(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[1, 1], [0, 1]], [[1]], [[1], [0]])
        out = tmp_path / "verdict.json"
        code = main(["diagnose", str(problem), "--oracle", "--quadrature", "--bridge",
                     "-o", str(out)])
        assert code == 0
        doc = parse_report(out.read_text())
        for name, entry in doc["checks"].items():
            assert entry["status"] in ("pass", "fail", "skipped")
            if entry["status"] == "pass" and name != "unipotent_bridge":
                assert entry["residual"] is not None
                assert entry["threshold"] is not None
        assert doc["checks"]["oracle_cross_check"]["status"] == "pass"
        assert doc["checks"]["integral_representation"]["status"] == "pass"
        assert doc["checks"]["unipotent_bridge"]["status"] == "pass"

    def test_malformed_file_exit_three(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert main(["diagnose", str(bad)]) == 3
        assert "line" in capsys.readouterr().err

    def test_missing_file_exit_three(self, tmp_path):
        assert main(["diagnose", str(tmp_path / "absent.json")]) == 3

    def test_determinism_byte_identical_modulo_timestamp(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[1, 1], [0, 1]], [[1]], [[1], [0]])
        out1, out2 = tmp_path / "v1.json", tmp_path / "v2.json"
        assert main(["diagnose", str(problem), "--oracle", "-o", str(out1)]) == 0
        assert main(["diagnose", str(problem), "--oracle", "-o", str(out2)]) == 0
        assert stripped(out1.read_text()) == stripped(out2.read_text())

    def test_verdict_round_trip(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[2]], [[1]], [[3]])
        out = tmp_path / "v.json"
        main(["diagnose", str(problem), "-o", str(out)])
        text = out.read_text()
        doc = parse_report(text)
        assert serialize_report(doc) == text

    def test_seed_recorded(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[2]], [[1]], [[3]])
        out = tmp_path / "v.json"
        main(["diagnose", str(problem), "--seed", "42", "-o", str(out)])
        assert parse_report(out.read_text())["environment"]["seed"] == 42


class TestHomogeneousCommand:
    def test_regular_pair_nullity_zero(self, tmp_path, capsys):
        problem = write_problem(tmp_path / "p.json", [[2]], [[1]], [[0]])
        out = tmp_path / "h.json"
        assert main(["homogeneous", str(problem), "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        assert doc["nullity"] == 0
        assert doc["equivalences"] is None
        assert doc["checks"]["three_way_equivalence"]["status"] == "skipped"

    def test_scalar_singular_equivalences(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[1]], [[1]], [[0]])
        out = tmp_path / "h.json"
        assert main(["homogeneous", str(problem), "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        assert doc["nullity"] == 1
        assert all(doc["equivalences"].values())
        assert doc["checks"]["three_way_equivalence"]["status"] == "pass"

    def test_diag_pair_basis(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[1, 0], [0, 2]], [[2]], [[0], [0]])
        out = tmp_path / "h.json"
        assert main(["homogeneous", str(problem), "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        assert doc["nullity"] == 1
        basis = pairs_to_matrix(doc["basis_samples"][0], "basis")
        np.testing.assert_allclose(basis, [[0.0], [1.0]], atol=1e-12)


class TestRootsCommand:
    def test_zero_rhs_identity_solution(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[2]], [[1]], [[0]])
        out = tmp_path / "r.json"
        assert main(["roots", str(problem), "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        assert len(doc["base_roots"]) == 4
        assert any(np.allclose(pairs_to_matrix(entry["q"], "q"), 0.0, atol=1e-10)
                   for entry in doc["unipotent"])

    def test_scalar_solvable_q_value(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[2]], [[1]], [[3]])
        out = tmp_path / "r.json"
        assert main(["roots", str(problem), "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        q = pairs_to_matrix(doc["unipotent"][0]["q"], "q")
        np.testing.assert_allclose(q, [[-2.5]], atol=1e-9)
        assert doc["unipotent"][0]["derived_solution_residual"] <= 1e-8
        assert doc["system_witness_consistent"] is True

    def test_unsolvable_reports_caveat(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[1]], [[1]], [[1]])
        out = tmp_path / "r.json"
        assert main(["roots", str(problem), "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        assert doc["unipotent"] == []
        assert any("enumerated root family" in note for note in doc["notes"])


class TestBatchCommand:
    def test_corpus_full_oracle_agreement(self, tmp_path):
        write_problem(tmp_path / "a_regular.json", [[2]], [[1]], [[3]])
        write_problem(tmp_path / "b_unsolvable.json", [[1]], [[1]], [[1]])
        write_problem(tmp_path / "c_jordan.json", [[1, 1], [0, 1]], [[1]], [[1], [0]])
        out = tmp_path / "batch.json"
        assert main(["batch", str(tmp_path), "--oracle", "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        assert doc["oracle_agreement_rate"] == 1.0
        assert [row["file"] for row in doc["rows"]] == sorted(row["file"] for row in doc["rows"])

    def test_empty_directory(self, tmp_path, capsys):
        out = tmp_path / "batch.json"
        assert main(["batch", str(tmp_path), "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        assert doc["rows"] == []

    def test_malformed_row_isolated(self, tmp_path):
        write_problem(tmp_path / "good.json", [[2]], [[1]], [[3]])
        (tmp_path / "broken.json").write_text("{oops", encoding="utf-8")
        out = tmp_path / "batch.json"
        assert main(["batch", str(tmp_path), "-o", str(out)]) == 3
        doc = parse_report(out.read_text())
        by_name = {row["file"]: row for row in doc["rows"]}
        assert by_name["broken.json"]["error"] is not None
        assert by_name["good.json"]["status"] == "solvable"


class TestBundledCorpus:
    def test_full_oracle_agreement(self, tmp_path):
        corpus = pathlib.Path(__file__).resolve().parent.parent / "corpus"
        assert corpus.is_dir()
        out = tmp_path / "batch.json"
        assert main(["batch", str(corpus), "--oracle", "-o", str(out)]) == 0
        doc = parse_report(out.read_text())
        assert len(doc["rows"]) >= 8
        assert all(row["error"] is None for row in doc["rows"])
        assert doc["oracle_agreement_rate"] == 1.0


class TestConsoleEntryPoint:
    def test_module_invocation_exit_codes(self, tmp_path):
        problem = write_problem(tmp_path / "p.json", [[1]], [[1]], [[1]])
        completed = subprocess.run(
            [sys.executable, "-m", "sylvcert.cli", "diagnose", str(problem)],
            capture_output=True, text=True)
        assert completed.returncode == 1
        assert "unsolvable" in completed.stdout
