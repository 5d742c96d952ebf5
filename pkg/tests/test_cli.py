"""End-to-end tests for the command line interface.

Each test drives ``main`` with an argv list and checks the exit code
plus whatever lands on stdout or in report files.  Exit codes are a
stable contract: 0 success, 1 verification failure, 2 parse error,
3 domain error.
"""

import json

import pytest

from asymconv.cli import main


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTypes:
    def test_cusp_square_roundtrip(self, tmp_path, capsys):
        doc = tmp_path / "t.json"
        doc.write_text('{"entries": {"-1/2": 1}}')
        code, out, _ = run(capsys, ["types", str(doc), str(doc)])
        assert code == 0
        assert json.loads(out) == {"entries": {"0": 3}}

    def test_empty_type(self, tmp_path, capsys):
        doc = tmp_path / "t.json"
        doc.write_text('{"entries": {}}')
        code, out, _ = run(capsys, ["types", str(doc), str(doc)])
        assert code == 0
        assert json.loads(out) == {"entries": {}}

    def test_malformed_json_reports_location(self, tmp_path, capsys):
        doc = tmp_path / "t.json"
        doc.write_text('{"entries": {"-1/2": }}')
        code, _, err = run(capsys, ["types", str(doc), str(doc)])
        assert code == 2
        assert "line 1" in err and "column" in err

    def test_wrong_shape_is_parse_error(self, tmp_path, capsys):
        doc = tmp_path / "t.json"
        doc.write_text('[1, 2, 3]')
        code, _, err = run(capsys, ["types", str(doc), str(doc)])
        assert code == 2

    def test_nonintegrable_exponent_is_domain_error(self, tmp_path, capsys):
        doc = tmp_path / "t.json"
        doc.write_text('{"entries": {"-2": 0}}')
        code, _, err = run(capsys, ["types", str(doc), str(doc)])
        assert code == 3
        assert "domain error" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, ["types", str(tmp_path / "no.json"), str(tmp_path / "no.json")])
        assert code == 2


class TestConstant:
    def test_resonant_cusp_pair(self, capsys):
        # Negative rational option values exercise the widened token
        # matcher; stock argparse would reject "-1/2" as an option.
        code, out, _ = run(capsys, ["constant", "-a", "-1/2", "-b", "-1/2"])
        assert code == 0
        doc = json.loads(out)
        assert doc["case"] == "Resonant"
        assert doc["degree"] == 1
        assert doc["leading_coeff"] == [-0.5, 0]
        assert doc["term"]["r"] == "0"
        assert doc["term"]["log_coeffs"][1] == [-0.5, 0]

    def test_both_integer_pinned_pair(self, capsys):
        code, out, _ = run(
            capsys, ["constant", "-a", "0", "-b", "0", "-j", "1", "-k", "1"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["case"] == "BothInteger"
        assert doc["leading_coeff"] == [0.5, 0]

    def test_smooth_pair_has_no_term(self, capsys):
        code, out, _ = run(capsys, ["constant", "-a", "0", "-b", "-1/2", "-j", "0"])
        assert code == 0
        doc = json.loads(out)
        assert doc["case"] == "Smooth"
        assert doc["degree"] == -1
        assert doc["term"] is None

    def test_anti_chirality_generic(self, capsys):
        code, out, _ = run(
            capsys,
            [
                "constant",
                "-a", "-2/5", "-b", "-3/10", "-p", "1", "-q", "1",
                "--chirality", "anti",
            ],
        )
        assert code == 0
        assert json.loads(out)["case"] == "Generic"

    def test_nonintegrable_exponent(self, capsys):
        code, _, err = run(capsys, ["constant", "-a", "-3/2", "-b", "-1/2"])
        assert code == 3
        assert "a > -1" in err

    def test_unpinned_both_integer_degrees(self, capsys):
        code, _, err = run(
            capsys, ["constant", "-a", "0", "-b", "0", "-j", "2", "-k", "1"]
        )
        assert code == 3

    def test_garbage_rational_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["constant", "-a", "abc", "-b", "0"])
        assert info.value.code == 2


class TestConvolve:
    def test_resonant_singleton_pair(self, tmp_path, capsys):
        doc = tmp_path / "e.json"
        doc.write_text(
            '{"terms": [{"r": "-1/2", "m": 0, "n": 0,'
            ' "log_coeffs": [[1, 0]]}], "smooth_order": 2}'
        )
        code, out, _ = run(capsys, ["convolve", str(doc), str(doc)])
        assert code == 0
        result = json.loads(out)
        assert result["smooth_order"] == 2
        (term,) = result["terms"]
        assert (term["r"], term["m"], term["n"]) == ("0", 0, 0)
        assert term["log_coeffs"] == [[0, 0], [-0.5, 0]]

    def test_missing_term_keys(self, tmp_path, capsys):
        doc = tmp_path / "e.json"
        doc.write_text('{"terms": [{"r": "0"}], "smooth_order": 1}')
        code, _, err = run(capsys, ["convolve", str(doc), str(doc)])
        assert code == 2


SPEC_GENERIC = {
    "a": "-3/10", "b": "-2/5", "p": 0, "q": 0, "j": 0, "k": 0,
    "chirality": "holo",
}
# Relative error of this one sits near 5e-5, so it fails a 1e-6 bar.
SPEC_ANTI = {
    "a": "-2/5", "b": "-3/10", "p": 1, "q": 1, "j": 0, "k": 0,
    "chirality": "anti",
}


class TestVerify:
    def test_single_generic_spec(self, tmp_path, capsys):
        specs = tmp_path / "specs.json"
        specs.write_text(json.dumps([SPEC_GENERIC]))
        base = tmp_path / "report"
        code, out, _ = run(
            capsys, ["verify", str(specs), "--report", str(base)]
        )
        assert code == 0
        assert "1 passed, 0 failed" in out
        doc = json.loads(base.with_suffix(".json").read_text())
        assert doc["all_passed"] is True
        assert doc["rho_norm"]["consistent"] is True
        assert abs(doc["rho_norm"]["mean"] - 0.5) < 1e-3
        lines = base.with_suffix(".csv").read_text().splitlines()
        assert len(lines) == 2
        assert len(lines[0].split(",")) == 13
        assert len(lines[1].split(",")) == 13

    def test_reports_are_byte_identical_across_runs(self, tmp_path, capsys):
        specs = tmp_path / "specs.json"
        specs.write_text(json.dumps([SPEC_GENERIC, SPEC_ANTI]))
        outputs = []
        for tag in ("one", "two"):
            base = tmp_path / tag
            code, _, _ = run(
                capsys, ["verify", str(specs), "--report", str(base)]
            )
            assert code == 0
            outputs.append(
                (
                    base.with_suffix(".json").read_bytes(),
                    base.with_suffix(".csv").read_bytes(),
                )
            )
        assert outputs[0] == outputs[1]

    def test_worker_count_does_not_change_report(self, tmp_path, capsys):
        specs = tmp_path / "specs.json"
        specs.write_text(json.dumps([SPEC_GENERIC, SPEC_ANTI]))
        blobs = []
        for jobs in ("1", "3"):
            base = tmp_path / ("jobs" + jobs)
            code, _, _ = run(
                capsys,
                ["verify", str(specs), "--report", str(base), "--jobs", jobs],
            )
            assert code == 0
            blobs.append(base.with_suffix(".json").read_bytes())
        assert blobs[0] == blobs[1]

    def test_mixed_cases_keep_normalization_pool_clean(self, tmp_path, capsys):
        # The both-integer scale constant is not the measure
        # normalization; a mixed suite must still report a consistent
        # pool drawn from the other cases.
        both_integer = {
            "a": "0", "b": "0", "p": 0, "q": 0, "j": 1, "k": 1,
            "chirality": "holo",
        }
        resonant = {
            "a": "-1/2", "b": "-1/2", "p": 0, "q": 0, "j": 0, "k": 0,
            "chirality": "holo",
        }
        specs = tmp_path / "specs.json"
        specs.write_text(json.dumps([SPEC_GENERIC, resonant, both_integer]))
        base = tmp_path / "report"
        code, out, _ = run(
            capsys, ["verify", str(specs), "--report", str(base)]
        )
        assert code == 0
        doc = json.loads(base.with_suffix(".json").read_text())
        assert doc["all_passed"] is True
        assert doc["rho_norm"]["consistent"] is True
        assert abs(doc["rho_norm"]["mean"] - 0.5) < 1e-2

    def test_tight_tolerance_fails(self, tmp_path, capsys):
        specs = tmp_path / "specs.json"
        specs.write_text(json.dumps([SPEC_ANTI]))
        code, out, err = run(
            capsys, ["verify", str(specs), "--tolerance", "1e-6"]
        )
        assert code == 1
        assert "0 passed, 1 failed" in out
        assert "exceeds tolerance" in err

    def test_empty_spec_list(self, tmp_path, capsys):
        specs = tmp_path / "specs.json"
        specs.write_text("[]")
        code, out, _ = run(capsys, ["verify", str(specs)])
        assert code == 0
        assert "verified 0 specs" in out

    def test_malformed_spec_entry(self, tmp_path, capsys):
        specs = tmp_path / "specs.json"
        specs.write_text('[{"a": "-1/2"}]')
        code, _, err = run(capsys, ["verify", str(specs)])
        assert code == 2
        assert "spec 0" in err

    def test_nonintegrable_spec(self, tmp_path, capsys):
        bad = dict(SPEC_GENERIC)
        bad["a"] = "-3/2"
        specs = tmp_path / "specs.json"
        specs.write_text(json.dumps([bad]))
        code, _, err = run(capsys, ["verify", str(specs)])
        assert code == 3

    def test_env_tolerance_must_be_numeric(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("ASYMCONV_TOL", "abc")
        specs = tmp_path / "specs.json"
        specs.write_text("[]")
        code, _, err = run(capsys, ["verify", str(specs)])
        assert code == 3
        assert "ASYMCONV_TOL" in err

    def test_env_tolerance_is_used(self, tmp_path, capsys, monkeypatch):
        # Tight enough that the anti spec fails through the env default.
        monkeypatch.setenv("ASYMCONV_TOL", "1e-6")
        specs = tmp_path / "specs.json"
        specs.write_text(json.dumps([SPEC_ANTI]))
        code, _, _ = run(capsys, ["verify", str(specs)])
        assert code == 1

    def test_zero_tolerance_rejected(self, tmp_path, capsys):
        specs = tmp_path / "specs.json"
        specs.write_text("[]")
        code, _, err = run(capsys, ["verify", str(specs), "--tolerance", "0"])
        assert code == 3

    def test_zero_jobs_rejected(self, tmp_path, capsys):
        specs = tmp_path / "specs.json"
        specs.write_text("[]")
        code, _, err = run(capsys, ["verify", str(specs), "--jobs", "0"])
        assert code == 3


class TestBernstein:
    def test_cusp_times_cube_roots(self, tmp_path, capsys):
        left = tmp_path / "l.json"
        right = tmp_path / "r.json"
        left.write_text('["-1/2"]')
        right.write_text('["-1/3", "-2/3"]')
        code, out, _ = run(capsys, ["bernstein", str(left), str(right)])
        assert code == 0
        doc = json.loads(out)
        assert doc["canonical"] == ["-5/6", "-1/6"]
        assert doc["raw"] == ["-7/6", "-5/6"]

    def test_identical_singletons(self, tmp_path, capsys):
        doc = tmp_path / "r.json"
        doc.write_text('["-1/2"]')
        code, out, _ = run(capsys, ["bernstein", str(doc), str(doc)])
        assert code == 0
        assert json.loads(out)["canonical"] == ["-1"]

    def test_kappa_widens_candidates(self, tmp_path, capsys):
        doc = tmp_path / "r.json"
        doc.write_text('["-1/2"]')
        code, out, _ = run(
            capsys, ["bernstein", str(doc), str(doc), "--kappa", "1"]
        )
        assert code == 0
        assert json.loads(out)["candidates"] == ["-2", "-1"]

    def test_nonnegative_root_rejected(self, tmp_path, capsys):
        left = tmp_path / "l.json"
        right = tmp_path / "r.json"
        left.write_text('["0"]')
        right.write_text('["-1/2"]')
        code, _, err = run(capsys, ["bernstein", str(left), str(right)])
        assert code == 3

    def test_non_array_document(self, tmp_path, capsys):
        doc = tmp_path / "r.json"
        doc.write_text('{"roots": ["-1/2"]}')
        code, _, err = run(capsys, ["bernstein", str(doc), str(doc)])
        assert code == 2


class TestDemo:
    def test_square_cube_demo(self, tmp_path, capsys):
        csv_path = tmp_path / "demo.csv"
        code, out, _ = run(
            capsys,
            ["demo", "monomial", "--n", "2", "--m", "3", "--csv", str(csv_path)],
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["case"] == "Generic"
        assert doc["spec"]["a"] == "-1/2"
        assert doc["spec"]["b"] == "-2/3"
        assert doc["relative_error"] < 1e-6
        lines = csv_path.read_text().splitlines()
        assert len(lines) == 2

    def test_bad_plateau_is_domain_error(self, capsys):
        code, _, err = run(
            capsys,
            ["demo", "monomial", "--n", "2", "--m", "2", "--plateau", "1.5"],
        )
        assert code == 3

    def test_order_zero_germ_rejected(self, capsys):
        code, _, err = run(capsys, ["demo", "monomial", "--n", "0", "--m", "2"])
        assert code == 3


class TestParserShell:
    def test_missing_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == 2
