import json
import subprocess
import sys

import pytest

from epwlab.cli import main

SCHUBERT_72 = "integrate(sigma1^2*(sigma2^2-sigma1*sigma3)*(16*sigma1^3-12*sigma1*sigma2+12*sigma3))"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_non_prime_is_usage_error(capsys):
    code, out, err = run(capsys, "kummer", "--p", "4")
    assert code == 1
    assert out == ""
    assert "prime" in err


def test_bad_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["kummer", "--ext", "3"])
    assert exc.value.code == 1
    capsys.readouterr()


def test_negative_samples_is_usage_error(capsys):
    code, _, _ = run(capsys, "kummer", "--samples", "-1")
    assert code == 1


@pytest.mark.parametrize("prefix", [[], ["eval"]])
def test_schubert_example(capsys, prefix):
    code, report = run_json(capsys, "schubert", *prefix, SCHUBERT_72, "--g", "3", "6")
    assert code == 0
    assert report["value"] == 72
    assert report["schema"] == 1


def test_schubert_class_output_and_unknown_symbol(capsys):
    code, report = run_json(capsys, "schubert", "sigma1^2")
    assert code == 0
    assert isinstance(report["value"], str) and "sigma" in report["value"]
    code, _, _ = run(capsys, "schubert", "tau1")
    assert code == 1


def test_kummer_random(capsys):
    code, report = run_json(capsys, "kummer", "--p", "11", "--seed", "1")
    assert code == 0
    assert report["seed"] == 1 and report["prime"] == 11
    assert report["nodes"]["count"] <= 16
    assert report["discriminant_cross_check"] is True
    assert report["duality"]["passed"] is True


def test_kummer_split_fixture(capsys):
    code, report = run_json(capsys, "kummer", "--fixture", "split")
    assert code == 0
    assert report["nodes"]["count"] == 16
    nodes = report["nodes"]["nodes"]
    assert nodes == sorted(nodes)


def test_epw_example(capsys):
    code, report = run_json(capsys, "epw", "--p", "7", "--seed", "3")
    assert code == 0
    assert report["rank_counts"]["r3"] == 0
    assert report["interp_nullity"] == 1
    assert report["fiber_checks"]
    for check in report["fiber_checks"]:
        assert check["zero_set_mismatches"] == 0
        assert check["nodes_match_rank2"] and check["restriction_proportional"]


def test_verra_runs(capsys):
    code, report = run_json(capsys, "verra", "--samples", "4")
    assert code == 0
    assert report["flavor"] == "main"
    assert all(v == 0 for v in report["failures"].values())
    code, report = run_json(capsys, "verra", "--p", "11", "--fixture", "split", "--flavor", "baby", "--samples", "3")
    assert code == 0
    assert report["net_checks"] == 3


def test_split_fixture_needs_baby_flavor(capsys):
    code, _, _ = run(capsys, "verra", "--fixture", "split", "--flavor", "main")
    assert code == 1


def test_invariants(capsys):
    code, report = run_json(capsys, "invariants")
    assert code == 0
    assert report["invariants_hold"] is True


def test_text_format_and_out_file(capsys, tmp_path):
    target = tmp_path / "report.txt"
    code, out, _ = run(capsys, "schubert", "integrate(sigma1^9)", "--format", "text", "--out", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert "value: 42" in lines
    assert "schema: 1" in lines


def test_output_identical_across_runs_and_threads(capsys, monkeypatch):
    outputs = []
    for threads in ("1", "8", "1"):
        monkeypatch.setenv("EPWLAB_THREADS", threads)
        code, out, _ = run(capsys, "epw", "--p", "7", "--seed", "3")
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1] == outputs[2]


def test_console_script_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "epwlab.cli", "schubert", "integrate(sigma1^9)"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == 42
