import io
import json

import numpy as np
import pytest

from analysis.inversion import GAUSSIAN_CLOSER
from cli.config import SCHEMA_VERSION
from cli.coordinator import RunCoordinator, run
from cli.report import encode
from core.errors import BOUND_FAILURE_EXIT

SMALL = ["--quiet", "--grid-size", "64"]


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    report = json.loads(captured.out) if captured.out.strip() else None
    return code, report, captured.err


def test_detect_laplace_has_no_component(capsys):
    code, report, _ = invoke(capsys, "detect", "--family", "symgamma", "--shape", "1", *SMALL)
    assert code == 0
    assert report["schema"] == SCHEMA_VERSION
    assert report["command"] == "detect"
    assert report["result"]["gaussian_component"] is False
    assert len(report["result"]["remainder"]["t"]) == 64


def test_detect_finds_a_component_next_to_jumps(capsys):
    code, report, _ = invoke(capsys, "detect", "--family", "gauss", "--variance", "1.4",
                             "--convolve", "cpoisson:rate=3,jump=1", *SMALL)
    assert code == 0
    assert report["result"]["gaussian_component"] is True
    assert report["result"]["a_hat"] == pytest.approx(0.7, abs=1e-4)


def test_rescale_gaussian_fixed_point(capsys):
    code, report, _ = invoke(capsys, "rescale", "--family", "gauss", "--variance", "2", "--m", "5",
                             "--check-fixed-point", *SMALL)
    assert code == 0
    assert report["result"]["fixed_point_deviation"] < 1e-12
    assert report["result"]["deviation"] < 1e-12


def test_sum_rescale_of_cauchy_has_no_gaussian_limit(capsys):
    code, report, _ = invoke(capsys, "rescale", "--family", "cauchy", "--m", "3", "--mode", "sum", *SMALL)
    assert code == 0
    assert report["result"]["deviation"] is None
    assert [d["kind"] for d in report["diagnostics"]] == ["no-clt-limit"]


def test_kurtosis(capsys):
    code, report, _ = invoke(capsys, "kurtosis", "--family", "laplace", "--m", "5", "--quiet")
    assert code == 0
    assert report["result"]["kappa_m"] == pytest.approx(15.0)
    assert report["result"]["relative_error"] < 1e-9


def test_bound_check_assert_passes(capsys):
    code, report, _ = invoke(capsys, "bound-check", "--family", "symgamma", "--shape", "1", "--m", "4",
                             "--r", "3", "--assert", "--lambda-grid-size", "1024", "--quiet")
    assert code == 0
    assert code != BOUND_FAILURE_EXIT
    assert report["result"]["holds"] is True
    assert report["result"]["lhs"] <= report["result"]["rhs"]


def test_distance_defaults_to_matched_gaussian(capsys):
    code, report, _ = invoke(capsys, "distance", "--family", "laplace", "--quiet")
    assert code == 0
    result = report["result"]
    assert result["metric"] == "lambda_r"
    assert result["value"] == pytest.approx(0.174, abs=1e-3)
    assert result["parameters"]["against"]["variance"] == pytest.approx(2.0)


def test_kolmogorov_distance_between_gaussians(capsys):
    code, report, _ = invoke(capsys, "distance", "--family", "gauss", "--variance", "1",
                             "--metric", "kolmogorov", "--other", "gauss:variance=1.21", "--quiet")
    assert code == 0
    assert report["result"]["metric"] == "kolmogorov"
    assert 0.0 < report["result"]["value"] < 0.05


def test_laplace_drift_and_limit(capsys):
    code, report, _ = invoke(capsys, "laplace", "drift", "--family", "drift", "--sigma", "2", "--quiet")
    assert code == 0
    assert report["command"] == "laplace drift"
    assert report["result"]["sigma_hat"] == pytest.approx(2.0)

    code, _, err = invoke(capsys, "laplace", "limit", "--family", "gamma", "--shape", "1", "--quiet")
    assert code == 1
    assert "--m" in err


def test_laplace_limit_uses_the_exact_drift(capsys):
    code, report, _ = invoke(capsys, "laplace", "limit", "--family", "drift", "--sigma", "1",
                             "--convolve", "gamma:shape=1", "--m", "100", "--S", "10", "--quiet")
    assert code == 0
    result = report["result"]
    assert result["sigma_hat"] == 1.0
    s = np.array(result["s"])
    oracle = np.max(np.exp(-s) * (1.0 - (1.0 + 100.0 * s) ** (-1.0 / 100.0)))
    assert result["deviation"] == pytest.approx(oracle, abs=1e-12)


def test_approx_compare_result_is_byte_identical(capsys):
    argv = ["approx-compare", "--family", "symgamma", "--shape", "0.5", "--m", "10", "--quiet"]
    encoded = []
    for _ in range(2):
        coordinator = RunCoordinator(stderr=io.StringIO())
        assert coordinator.run(argv) == 0
        encoded.append(encode(coordinator.report["result"]))
    capsys.readouterr()
    assert encoded[0] == encoded[1]
    assert coordinator.report["result"]["best_alpha"] == pytest.approx(1.95)


def test_approx_compare_on_gaussian(capsys):
    code, report, _ = invoke(capsys, "approx-compare", "--family", "gauss", "--variance", "1", "--m", "5",
                             "--alpha-grid", "1.5,1.9", "--scale-grid", "0.6,0.7", "--quiet")
    assert code == 0
    assert report["result"]["verdict"] == GAUSSIAN_CLOSER
    assert report["result"]["d_K_gaussian"] < 1e-9


def test_empirical_summary(capsys, sample_file):
    path = sample_file("# four points\n1\n-1\n2\n-2\n")
    code, report, _ = invoke(capsys, "empirical", "--samples", path, *SMALL)
    assert code == 0
    result = report["result"]
    assert (result["n"], result["mean"], result["variance"]) == (4, 0.0, 2.5)
    assert result["moments"]["mu2"] == pytest.approx(2.5)
    assert len(result["ecf"]) == 64


def test_detect_on_samples_reports_them(capsys, sample_file):
    path = sample_file("\n".join(str(v) for v in (0.3, -0.1, 0.2, -0.4, 0.1)) + "\n")
    code, report, _ = invoke(capsys, "detect", "--samples", path, "--t-schedule", "0.01,0.1,1",
                             "--t-max", "2", *SMALL)
    assert code == 0
    assert report["result"]["samples"]["n"] == 5
    assert report["diagnostics"][0]["kind"] == "samples"


def test_unknown_subcommand_is_a_usage_error(capsys):
    code, report, err = invoke(capsys, "frobnicate")
    assert code == 1
    assert report is None
    assert "usage" in err


def test_missing_law_is_an_input_error(capsys):
    code, report, err = invoke(capsys, "detect", "--quiet")
    assert code == 1
    assert report is None
    assert "iddlab detect: error" in err


def test_bad_sample_line_is_cited(capsys, sample_file):
    path = sample_file("1.0\n2.0\nabc\n")
    code, _, err = invoke(capsys, "empirical", "--samples", path)
    assert code == 1
    assert "line 3" in err


def test_empty_sample_file(capsys, sample_file):
    code, _, _ = invoke(capsys, "empirical", "--samples", sample_file(""))
    assert code == 1


def test_positivity_failure_exits_two(capsys, sample_file):
    path = sample_file("1\n-1\n")
    code, _, err = invoke(capsys, "detect", "--samples", path, "--quiet")
    assert code == 2
    assert "not positive" in err


def test_config_file_and_flags(capsys, tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"grid_size": 128, "t_max": 20.0}))
    code, report, _ = invoke(capsys, "rescale", "--family", "laplace", "--m", "2", "--config", str(path),
                             "--grid-size", "32", "--quiet")
    assert code == 0
    assert report["config"]["grid_size"] == 32
    assert report["config"]["t_max"] == 20.0

    path.write_text(json.dumps({"grid_sise": 128}))
    code, _, err = invoke(capsys, "rescale", "--family", "laplace", "--m", "2", "--config", str(path))
    assert code == 1
    assert "unknown config keys" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, report, _ = invoke(capsys, "kurtosis", "--family", "laplace", "--m", "3", "--quiet",
                             "--output", str(target))
    assert code == 0
    assert report is None
    assert json.loads(target.read_text())["result"]["m"] == 3


def test_results_are_deterministic(capsys):
    argv = ("detect", "--family", "cpoisson", "--rate", "2", *SMALL)
    _, first, _ = invoke(capsys, *argv)
    _, second, _ = invoke(capsys, *argv)
    assert first["result"] == second["result"]
    assert first["config"] == second["config"]


def test_run_summary_goes_to_stderr(capsys):
    stderr = io.StringIO()
    coordinator = RunCoordinator(stderr=stderr)
    code = coordinator.run(["kurtosis", "--family", "gauss", "--variance", "1", "--m", "4"])
    capsys.readouterr()
    assert code == 0
    text = stderr.getvalue()
    assert "IDDLAB KURTOSIS" in text
    assert "absolute-error" in text
    assert coordinator.report["result"]["kappa_m"] == 0.0
