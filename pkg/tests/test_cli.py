import json

import numpy as np
import pytest

from kposi.cli import matrix_document, parse_matrix_document, run_cli

from matrices import CERT_3X3, CERT_D_REF, CERT_P_REF, CT_NO_DLF, CYCLIC_WEDGE, DT_NO_DLF


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def eq7_doc():
    return {
        "rows": 3,
        "cols": 3,
        "scale": "1/7",
        "data": [[-4, -2, 1], [1, -3, -5], [7, 1, -2]],
    }


def system5_doc():
    return {
        "A": matrix_document(CYCLIC_WEDGE),
        "maps": [{"kind": "power", "p": 2}] * 3,
        "domain": [-0.5, 0.5],
    }


class TestMatrixDocuments:
    def test_scale_is_applied_exactly(self):
        A = parse_matrix_document(eq7_doc())
        np.testing.assert_array_equal(A, DT_NO_DLF)

    def test_bad_scale_rejected(self):
        doc = eq7_doc()
        doc["scale"] = "1/0"
        with pytest.raises(Exception):
            parse_matrix_document(doc)

    def test_shape_mismatch_rejected(self):
        doc = eq7_doc()
        doc["rows"] = 2
        from kposi import DomainError

        with pytest.raises(DomainError):
            parse_matrix_document(doc)

    def test_emitted_matrices_reingest_bit_identical(self):
        rng = np.random.default_rng(61)
        A = rng.standard_normal((4, 4)) * np.exp(rng.uniform(-20, 20, (4, 4)))
        doc = json.loads(json.dumps(matrix_document(A)))
        np.testing.assert_array_equal(parse_matrix_document(doc), A)


class TestTransformCommands:
    def test_compound_output_roundtrip(self, tmp_path, capsys):
        path = write_json(tmp_path / "a.json", eq7_doc())
        assert run_cli(["compound", "--in", path, "-k", "2"]) == 0
        out = json.loads(capsys.readouterr().out)
        from kposi import mult_compound

        np.testing.assert_array_equal(parse_matrix_document(out), mult_compound(DT_NO_DLF, 2))

    def test_wedge_columns(self, tmp_path, capsys):
        a = np.array([1.0, 0.0, 0.0])
        b = np.array([0.0, 2.0, 0.0])
        path = write_json(tmp_path / "v.json", matrix_document(np.column_stack([a, b])))
        assert run_cli(["wedge", "--in", path]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["n"] == 3 and out["k"] == 2
        assert out["coords"] == [2.0, 0.0, 0.0]

    def test_cayley_regression_block(self, tmp_path, capsys):
        path = write_json(tmp_path / "a.json", eq7_doc())
        assert run_cli(["cayley", "--in", path]) == 0
        B = parse_matrix_document(json.loads(capsys.readouterr().out))
        target = np.array([[204.0, 140.0], [497.0, 323.0]]) / 461.0
        np.testing.assert_allclose(B[np.ix_([0, 2], [0, 2])], target, rtol=1e-12)

    def test_dlf_recover(self, tmp_path, capsys):
        path = write_json(tmp_path / "d.json", matrix_document(np.diag(CERT_D_REF)))
        assert run_cli(["dlf-recover", "--in", path]) == 0
        P = parse_matrix_document(json.loads(capsys.readouterr().out))
        np.testing.assert_allclose(np.diag(P), CERT_P_REF, atol=1e-12)

    def test_dlf_recover_accepts_vector_document(self, tmp_path, capsys):
        path = write_json(tmp_path / "d.json", {"data": list(CERT_D_REF)})
        assert run_cli(["dlf-recover", "--in", path]) == 0
        P = parse_matrix_document(json.loads(capsys.readouterr().out))
        np.testing.assert_allclose(np.diag(P), CERT_P_REF, atol=1e-12)


class TestVerdictCommands:
    def test_classify_reports_and_exit_zero(self, tmp_path, capsys):
        path = write_json(tmp_path / "a.json", eq7_doc())
        assert run_cli(["classify", "--in", path, "-k", "2"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["command"] == "classify"
        assert rep["verdicts"]["verdict"] == "SSR"
        assert rep["verdicts"]["signature"] == 1
        assert rep["tolerances"]["zero_tol"] == 1e-9

    def test_classify_conflict_exits_one(self, tmp_path, capsys):
        path = write_json(
            tmp_path / "m.json", matrix_document(np.array([[1.0, -1.0], [1.0, 1.0]]))
        )
        assert run_cli(["classify", "--in", path, "-k", "1"]) == 1
        rep = json.loads(capsys.readouterr().out)
        assert rep["verdicts"]["verdict"] == "NONE"
        assert rep["verdicts"]["witness_conflict"] is not None

    def test_check_necessary_dt_regression(self, tmp_path, capsys):
        path = write_json(tmp_path / "a.json", eq7_doc())
        assert run_cli(["check-necessary", "--in", path, "--mode", "dt"]) == 1
        rep = json.loads(capsys.readouterr().out)
        assert rep["verdicts"]["passed"] is False
        assert rep["verdicts"]["witness"]["kappa"] == [1, 3]
        assert rep["verdicts"]["witness"]["value"] == pytest.approx(-8.0 / 461.0, abs=1e-9)

    def test_check_necessary_ct_regression(self, tmp_path, capsys):
        path = write_json(tmp_path / "a.json", matrix_document(CT_NO_DLF))
        assert run_cli(["check-necessary", "--in", path, "--mode", "ct"]) == 1
        rep = json.loads(capsys.readouterr().out)
        assert rep["verdicts"]["witness"]["kappa"] == [2, 3]
        assert rep["verdicts"]["witness"]["value"] == pytest.approx(-150.0, abs=1e-9)

    def test_certify_success(self, tmp_path, capsys):
        path = write_json(tmp_path / "a.json", matrix_document(CERT_3X3))
        assert run_cli(["certify", "--in", path, "-k", "2"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["verdicts"]["certified"] is True
        assert rep["verdicts"]["stein_margin"] > 0.0
        assert len(rep["verdicts"]["d"]) == 3

    def test_certify_failure_exits_one(self, tmp_path, capsys):
        path = write_json(tmp_path / "i.json", matrix_document(np.eye(3)))
        assert run_cli(["certify", "--in", path, "-k", "1"]) == 1
        rep = json.loads(capsys.readouterr().out)
        assert rep["verdicts"]["failure"] == "COMPOUND_NOT_SCHUR"

    def test_cyclic_build_and_analyze(self, capsys):
        args = ["cyclic", "--alphas", "0.1", "0.05", "2.01", "--betas", "1.9", "1.95", "0.01", "--ell", "2"]
        assert run_cli(args) == 0
        built = parse_matrix_document(json.loads(capsys.readouterr().out))
        np.testing.assert_allclose(built, CYCLIC_WEDGE, atol=1e-15)
        assert run_cli(args + ["--analyze"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["verdicts"]["ell_diag_stable"] is True
        assert rep["verdicts"]["sign_class_at_ell"]["signature"] == 1

    def test_env_tolerance_override(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("KPOSI_TOL", "1e-6")
        path = write_json(tmp_path / "a.json", eq7_doc())
        assert run_cli(["classify", "--in", path, "-k", "2"]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["tolerances"]["zero_tol"] == 1e-6


class TestSimulationCommands:
    def test_simulate_states_csv(self, tmp_path, capsys):
        path = write_json(tmp_path / "sys.json", system5_doc())
        code = run_cli(
            ["simulate", "--system", path, "--x0", "-0.5", "0.5", "0.4", "--steps", "3"]
        )
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "j,x1,x2,x3"
        assert len(lines) == 5
        first = [float(v) for v in lines[1].split(",")[1:]]
        np.testing.assert_allclose(first, [-0.5, 0.5, 0.4])
        second = [float(v) for v in lines[2].split(",")[1:]]
        np.testing.assert_allclose(second, CYCLIC_WEDGE @ np.array([0.25, 0.25, 0.16]))

    def test_wedge_sim_decreasing_v_column(self, tmp_path, capsys):
        sys_path = write_json(tmp_path / "sys.json", system5_doc())
        inits = np.column_stack([0.5 * np.ones(3), [-0.5, 0.5, 0.4]])
        init_path = write_json(tmp_path / "init.json", matrix_document(inits))
        code = run_cli(
            [
                "wedge-sim",
                "--system",
                sys_path,
                "--initials",
                init_path,
                "-k",
                "2",
                "--steps",
                "5",
                "--certify",
            ]
        )
        captured = capsys.readouterr()
        assert code == 0
        lines = captured.out.splitlines()
        assert lines[0] == "j,V"
        v = np.array([float(line.split(",")[1]) for line in lines[1:]])
        assert v.shape == (6,)
        assert np.all(np.diff(v[1:6]) < -1e-12)
        report = json.loads(captured.err)
        assert report["verdicts"]["monotone"] is True
        assert report["verdicts"]["certificate"]["stein_margin"] > 0.0

    def test_wedge_sim_without_certificate_uses_unit_weights(self, tmp_path, capsys):
        sys_path = write_json(tmp_path / "sys.json", system5_doc())
        inits = np.column_stack([0.5 * np.ones(3), [-0.5, 0.5, 0.4]])
        init_path = write_json(tmp_path / "init.json", matrix_document(inits))
        code = run_cli(
            ["wedge-sim", "--system", sys_path, "--initials", init_path, "-k", "2", "--steps", "2"]
        )
        captured = capsys.readouterr()
        assert code == 0
        report = json.loads(captured.err)
        assert report["verdicts"]["d_used"] == [1.0, 1.0, 1.0]


class TestErrorPaths:
    def test_malformed_json_exits_two(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"rows": 2, "cols": 2, "data": [[1, 2], [3, ]]}')
        assert run_cli(["classify", "--in", str(path), "-k", "1"]) == 2
        err = capsys.readouterr().err
        assert "line" in err and "column" in err

    def test_missing_file_exits_two(self, capsys):
        assert run_cli(["classify", "--in", "/nonexistent.json", "-k", "1"]) == 2

    def test_unknown_subcommand_exits_two(self, capsys):
        assert run_cli(["frobnicate"]) == 2

    def test_capacity_guard_exits_three(self, tmp_path, capsys):
        path = write_json(tmp_path / "big.json", matrix_document(np.eye(40)))
        assert run_cli(["compound", "--in", path, "-k", "20"]) == 3

    def test_singular_cayley_exits_two(self, tmp_path, capsys):
        path = write_json(tmp_path / "i.json", matrix_document(np.eye(3)))
        assert run_cli(["cayley", "--in", path]) == 2


class TestPaperExamples:
    def test_all_bundled_regressions_pass(self, capsys):
        assert run_cli(["paper-examples"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
        assert len(lines) == 14
        assert all(l.startswith("PASS") for l in lines)
