import json
import math

import numpy as np
import pytest

import ising_trinity as it
from ising_trinity.cli import main

AGREE = 0.4
MIXED = 0.1


def write_spec(tmp_path, doc, name="model.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def paired_spec(tmp_path):
    """n = 2, coupling log 2: agreeing configurations get probability 0.4."""
    return write_spec(
        tmp_path,
        {
            "n": 2,
            "delta": [0.0, 0.0],
            "sigma": [[0.0, math.log(2.0)], [math.log(2.0), 0.0]],
        },
    )


def read_pmf_csv(text):
    lines = text.strip().split("\n")
    probs = [float(line.rsplit(",", 1)[1]) for line in lines[1:]]
    return lines[0], np.array(probs)


class TestPmfCommand:
    def test_csv_table(self, tmp_path, capsys):
        assert main(["pmf", paired_spec(tmp_path)]) == 0
        header, probs = read_pmf_csv(capsys.readouterr().out)
        assert header == "x_1,x_2,probability"
        np.testing.assert_allclose(probs, [AGREE, MIXED, MIXED, AGREE], atol=1e-15)

    def test_seventeen_digits_round_trip(self, tmp_path, capsys):
        assert main(["pmf", paired_spec(tmp_path)]) == 0
        _, probs = read_pmf_csv(capsys.readouterr().out)
        pmf = it.ising_pmf(it.load_model_spec(paired_spec(tmp_path))[0])
        np.testing.assert_array_equal(probs, pmf.probs)

    @pytest.mark.parametrize("representation", ["spectral", "collider", "latent"])
    def test_all_representations_agree(self, tmp_path, capsys, representation):
        spec = paired_spec(tmp_path)
        assert main(["pmf", spec]) == 0
        _, base = read_pmf_csv(capsys.readouterr().out)
        assert main(["pmf", spec, "--representation", representation]) == 0
        _, probs = read_pmf_csv(capsys.readouterr().out)
        np.testing.assert_allclose(probs, base, atol=1e-12)

    def test_json_format(self, tmp_path, capsys):
        assert main(["pmf", paired_spec(tmp_path), "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["n"] == 2
        assert doc["representation"] == "conventional"
        assert doc["log_z"] == pytest.approx(math.log(5.0), abs=1e-12)
        assert doc["columns"] == ["x_1", "x_2", "probability"]
        assert doc["rows"][0][:2] == [-1, -1]
        assert doc["rows"][0][2] == pytest.approx(AGREE, abs=1e-15)

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "table.csv"
        assert main(["pmf", paired_spec(tmp_path), "-o", str(out)]) == 0
        assert capsys.readouterr().out == ""
        header, probs = read_pmf_csv(out.read_text())
        assert header == "x_1,x_2,probability"
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_too_many_items_exit_code(self, tmp_path, capsys):
        doc = {"n": 21, "delta": [0.0] * 21, "sigma": [[0.0] * 21 for _ in range(21)]}
        assert main(["pmf", write_spec(tmp_path, doc)]) == 3
        assert "error:" in capsys.readouterr().err

    def test_latent_needs_low_rank(self, rng, tmp_path, capsys):
        from conftest import random_spec

        spec = random_spec(rng, 6)
        path = tmp_path / "model.json"
        it.save_model_spec(spec, path)
        assert main(["pmf", str(path), "-r", "latent"]) == 3
        assert "error:" in capsys.readouterr().err


class TestSpecErrors:
    def test_asymmetric_sigma(self, tmp_path, capsys):
        doc = {"n": 2, "delta": [0, 0], "sigma": [[0, 0.7], [0.3, 0]]}
        assert main(["pmf", write_spec(tmp_path, doc)]) == 2
        err = capsys.readouterr().err
        assert "sigma[0][1]" in err and "sigma[1][0]" in err

    def test_unknown_field(self, tmp_path, capsys):
        doc = {"n": 1, "delta": [0], "sigma": [[0]], "beta": 1.0}
        assert main(["pmf", write_spec(tmp_path, doc)]) == 2
        assert "beta" in capsys.readouterr().err

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "model.json"
        path.write_text("{oops")
        assert main(["pmf", str(path)]) == 2
        assert "not valid JSON" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["pmf", str(tmp_path / "absent.json")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_diagonal_is_tolerated_with_warning(self, tmp_path):
        doc = {"n": 2, "delta": [0, 0], "sigma": [[5.0, 0.1], [0.1, 5.0]]}
        with pytest.warns(UserWarning, match="diagonal"):
            assert main(["pmf", write_spec(tmp_path, doc), "-o", "/dev/null"]) == 0

    def test_no_arguments_is_usage_error(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_bad_choice_is_usage_error(self, tmp_path, capsys):
        assert main(["pmf", paired_spec(tmp_path), "-r", "quantum"]) == 2
        capsys.readouterr()


class TestVerifyCommand:
    def test_clean_model_passes(self, tmp_path, capsys):
        assert main(["verify", paired_spec(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "overall: PASS" in out
        assert out.count(" vs ") == 6

    def test_json_report(self, tmp_path, capsys):
        report_path = tmp_path / "report.json"
        assert main(["verify", paired_spec(tmp_path), "--json-report", str(report_path)]) == 0
        capsys.readouterr()
        doc = json.loads(report_path.read_text())
        assert doc["all_pass"] is True
        assert len(doc["pairs"]) == 6
        assert doc["rank"] == 1

    @pytest.mark.parametrize(
        "branch", ["conventional", "spectral", "collider", "latent"]
    )
    def test_fault_injection_fails_verification(self, tmp_path, capsys, branch):
        code = main(["verify", paired_spec(tmp_path), "--inject-fault", branch])
        out = capsys.readouterr().out
        assert code == 1
        assert "overall: FAIL" in out
        assert f"fault injected: branch {branch}" in out

    def test_fault_on_unavailable_branch(self, rng, tmp_path, capsys):
        from conftest import random_spec

        path = tmp_path / "model.json"
        it.save_model_spec(random_spec(rng, 6), path)
        assert main(["verify", str(path), "--inject-fault", "latent"]) == 2
        assert "not evaluated" in capsys.readouterr().err

    def test_too_coarse_quadrature(self, tmp_path, capsys):
        assert main(["verify", paired_spec(tmp_path), "--quad-nodes", "4"]) == 2
        assert "refine" in capsys.readouterr().err


class TestSampleCommand:
    def test_exact_is_deterministic(self, tmp_path, capsys):
        spec = paired_spec(tmp_path)
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        for out in (a, b):
            assert main(
                ["sample", spec, "--method", "exact", "--m", "50", "--seed", "7", "--out", out]
            ) == 0
        capsys.readouterr()
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        side = json.loads((tmp_path / "a.meta.json").read_text())
        assert side["method"] == "exact" and side["seed"] == 7 and side["m"] == 50

    def test_gibbs_writes_meta(self, tmp_path, capsys):
        out = str(tmp_path / "g.csv")
        code = main(
            [
                "sample", paired_spec(tmp_path), "--method", "gibbs",
                "--m", "20", "--out", out, "--burn-in", "50", "--thin", "2",
            ]
        )
        assert code == 0
        assert "wrote 20 draws via gibbs" in capsys.readouterr().out
        side = json.loads((tmp_path / "g.meta.json").read_text())
        assert side["meta"] == {"burn_in": 50, "thin": 2}

    def test_rejection_reports_acceptance_rate(self, tmp_path, capsys):
        out = str(tmp_path / "r.csv")
        code = main(
            ["sample", paired_spec(tmp_path), "--method", "collider-rejection",
             "--m", "500", "--out", out]
        )
        assert code == 0
        assert "acceptance rate" in capsys.readouterr().out
        side = json.loads((tmp_path / "r.meta.json").read_text())
        assert 0.0 < side["meta"]["acceptance_rate"] <= 1.0

    def test_latent_first_works_on_rank_one(self, tmp_path, capsys):
        out = str(tmp_path / "l.csv")
        code = main(
            ["sample", paired_spec(tmp_path), "--method", "latent-first",
             "--m", "30", "--out", out]
        )
        assert code == 0
        capsys.readouterr()
        sample = it.load_sample_set(out)
        assert sample.m == 30 and sample.method == "latent-first"

    def test_latent_first_rejects_wide_models(self, rng, tmp_path, capsys):
        from conftest import low_rank_spec

        path = tmp_path / "model.json"
        it.save_model_spec(low_rank_spec(rng, 5, 2), path)
        code = main(
            ["sample", str(path), "--method", "latent-first", "--m", "5",
             "--out", str(tmp_path / "x.csv")]
        )
        assert code == 3
        assert "exactly one" in capsys.readouterr().err

    def test_zero_draws(self, tmp_path, capsys):
        code = main(
            ["sample", paired_spec(tmp_path), "--method", "gibbs", "--m", "0",
             "--out", str(tmp_path / "x.csv")]
        )
        assert code == 2
        assert "at least 1" in capsys.readouterr().err


class TestFitCommand:
    def test_fit_from_sampled_draws(self, tmp_path, capsys):
        spec = paired_spec(tmp_path)
        draws = str(tmp_path / "draws.csv")
        assert main(
            ["sample", spec, "--method", "exact", "--m", "4000", "--seed", "1",
             "--out", draws]
        ) == 0
        capsys.readouterr()
        assert main(["fit", draws]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["converged"] is True
        assert doc["sigma"][0][1] == pytest.approx(math.log(2.0), abs=0.12)
        assert doc["delta"][0] == pytest.approx(0.0, abs=0.12)

    def test_weight_column_population_fit(self, tmp_path, capsys):
        table = tmp_path / "population.csv"
        table.write_text(
            "x_1,x_2,weight\n"
            f"-1,-1,{AGREE}\n1,-1,{MIXED}\n-1,1,{MIXED}\n1,1,{AGREE}\n"
        )
        assert main(["fit", str(table)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["converged"] is True
        assert doc["sigma"][0][1] == pytest.approx(math.log(2.0), abs=1e-5)
        assert doc["delta"] == pytest.approx([0.0, 0.0], abs=1e-5)

    def test_output_file_and_summary_line(self, tmp_path, capsys):
        table = tmp_path / "population.csv"
        table.write_text(
            "x_1,x_2,weight\n"
            f"-1,-1,{AGREE}\n1,-1,{MIXED}\n-1,1,{MIXED}\n1,1,{AGREE}\n"
        )
        out = tmp_path / "fit.json"
        assert main(["fit", str(table), "--out", str(out)]) == 0
        assert "converged" in capsys.readouterr().out
        assert json.loads(out.read_text())["converged"] is True

    def test_iteration_cap_still_reports(self, tmp_path, capsys):
        table = tmp_path / "population.csv"
        table.write_text(
            "x_1,x_2,weight\n"
            f"-1,-1,{AGREE}\n1,-1,{MIXED}\n-1,1,{MIXED}\n1,1,{AGREE}\n"
        )
        assert main(["fit", str(table), "--max-iter", "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["converged"] is False
        assert doc["iterations"] == 1

    def test_empty_data_file(self, tmp_path, capsys):
        table = tmp_path / "empty.csv"
        table.write_text("")
        assert main(["fit", str(table)]) == 2
        assert "empty" in capsys.readouterr().err

    def test_malformed_row(self, tmp_path, capsys):
        table = tmp_path / "bad.csv"
        table.write_text("x_1,x_2\n1,up\n")
        assert main(["fit", str(table)]) == 2
        assert "malformed" in capsys.readouterr().err

    def test_header_only(self, tmp_path, capsys):
        table = tmp_path / "empty.csv"
        table.write_text("x_1,x_2\n")
        assert main(["fit", str(table)]) == 2
        assert "no rows" in capsys.readouterr().err

    def test_init_spec(self, tmp_path, capsys):
        spec = paired_spec(tmp_path)
        table = tmp_path / "population.csv"
        table.write_text(
            "x_1,x_2,weight\n"
            f"-1,-1,{AGREE}\n1,-1,{MIXED}\n-1,1,{MIXED}\n1,1,{AGREE}\n"
        )
        assert main(["fit", str(table), "--init", spec]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["iterations"] == 0
        assert doc["converged"] is True


class TestExportGraphCommand:
    def test_network_view(self, tmp_path, capsys):
        assert main(["export-graph", paired_spec(tmp_path), "--view", "network"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("graph network {")
        assert "x1 -- x2" in out

    def test_common_cause_view(self, tmp_path, capsys):
        assert main(["export-graph", paired_spec(tmp_path), "--view", "common-cause"]) == 0
        out = capsys.readouterr().out
        assert "theta1 [shape=circle];" in out
        assert "theta1 -> x2;" in out
        assert "theta2" not in out

    def test_collider_view_to_file(self, tmp_path, capsys):
        out_path = tmp_path / "graph.dot"
        assert main(
            ["export-graph", paired_spec(tmp_path), "--view", "collider",
             "--out", str(out_path)]
        ) == 0
        text = out_path.read_text()
        assert "e1 [shape=box];" in text
        assert "x1 -> e1;" in text
