import json
import math
import subprocess
import sys

import pytest

from siegelfx.cli import main


@pytest.fixture
def files(tmp_path):
    paths = {
        "two": ('{"rates": [1, 4]}', "two.json"),
        "two_inv": ('{"rates": [1, 0.25]}', "two_inv.json"),
        "three": ('{"rates": [1, 2, 8]}', "three.json"),
        "const": ('{"rates": [1.7, 1.7]}', "const.json"),
        "weighted": ("2,16\n1/3,2/3\n", "weighted.csv"),
        "thirds": ('{"rates": [1, 2, 3], "probabilities": ["1/3", "1/3", "1/3"]}', "thirds.json"),
        "median3": ('{"arity": 2, "representation": "power_law", "exponents": ["-1/3", "1/3"]}', "median3.beta"),
        "bad": ('{"arity": 1, "representation": "power_law", "exponents": [0.5]}', "bad.beta"),
        "broken": ('{"rates": [1, ', "broken.json"),
        "negative": ('{"rates": [1, -4]}', "negative.json"),
        "huge": ('{"rates": [1, 2], "probabilities": ["1/2000003", "2000002/2000003"]}', "huge.json"),
    }
    out = {}
    for key, (text, name) in paths.items():
        p = tmp_path / name
        p.write_text(text)
        out[key] = str(p)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


class TestAggregate:
    def test_geometric(self, capsys, files):
        code, out, _ = run(capsys, "aggregate", "--method", "geometric", "--input", files["two"])
        assert code == 0 and "forward rate: 2 " in out

    def test_json_fields(self, capsys, files):
        code, out, _ = run(capsys, "--output", "json", "aggregate", "--method", "arithmetic", "--input", files["two"])
        d = json.loads(out)
        assert code == 0 and set(d) == {"method", "rate", "n", "siegel_gap"}
        assert d["rate"] == 2.5 and d["n"] == 2 and d["siegel_gap"] == 0.5625

    def test_median_and_beta_agree(self, capsys, files):
        _, out1, _ = run(capsys, "aggregate", "--method", "median", "--input", files["three"], "--output", "json")
        _, out2, _ = run(
            capsys, "aggregate", "--method", "beta", "--beta-file", files["median3"],
            "--input", files["three"], "--output", "json",
        )
        assert json.loads(out1)["rate"] == 2.0
        assert json.loads(out2)["rate"] == pytest.approx(2.0, rel=1e-15)

    def test_mix(self, capsys, files):
        code, out, _ = run(
            capsys, "aggregate", "--method", "mix", "--mix", "geometric,median,0.5",
            "--input", files["three"], "--output", "json",
        )
        assert code == 0 and json.loads(out)["rate"] == pytest.approx(2 ** (7 / 6), rel=1e-14)

    def test_end_to_end_reciprocity(self, capsys, files):
        _, a, _ = run(capsys, "aggregate", "--method", "geometric", "--input", files["two"], "--output", "json")
        _, b, _ = run(capsys, "aggregate", "--method", "geometric", "--input", files["two_inv"], "--output", "json")
        assert json.loads(a)["rate"] * json.loads(b)["rate"] == pytest.approx(1.0, abs=1e-9)

    def test_weighted_geometric_uses_closed_form(self, capsys, files):
        _, out, _ = run(capsys, "aggregate", "--method", "geometric", "--input", files["weighted"], "--output", "json")
        assert json.loads(out)["rate"] == 8.0

    def test_weighted_other_methods_expand(self, capsys, files):
        _, out, _ = run(capsys, "aggregate", "--method", "median", "--input", files["weighted"], "--output", "json")
        assert json.loads(out)["rate"] == 16.0

    def test_text_precision(self, capsys, files):
        _, out, _ = run(capsys, "aggregate", "--method", "arithmetic", "--input", files["three"])
        assert "3.66666666667" in out

    @pytest.mark.parametrize(
        "argv, code",
        [
            (["aggregate", "--method", "geometric", "--input", "missing.json"], 2),
            (["aggregate", "--method", "geometric", "--input", "{broken}"], 2),
            (["aggregate", "--method", "geometric", "--input", "{negative}"], 2),
            (["aggregate", "--method", "beta", "--input", "{two}"], 2),
            (["aggregate", "--method", "beta", "--beta-file", "{median3}", "--input", "{two}"], 3),
            (["aggregate", "--method", "beta", "--beta-file", "{bad}", "--input", "{two}"], 3),
            (["aggregate", "--method", "mix", "--mix", "geometric,median", "--input", "{two}"], 2),
            (["aggregate", "--method", "mix", "--mix", "geometric,median,2", "--input", "{two}"], 2),
            (["aggregate", "--method", "median", "--input", "{huge}"], 2),
        ],
    )
    def test_exit_codes(self, capsys, files, argv, code):
        argv = [a.format(**files) for a in argv]
        got, out, err = run(capsys, *argv)
        assert got == code and err.startswith("error:") and out == ""


class TestCheck:
    def test_geometric_passes(self, capsys):
        code, out, _ = run(capsys, "check", "--method", "geometric")
        assert code == 0 and "PASS" in out

    def test_arithmetic_fails_a3(self, capsys):
        code, out, _ = run(capsys, "check", "--method", "arithmetic", "--output", "json", "--samples", "200")
        d = json.loads(out)
        assert code == 1
        assert [r["axiom"] for r in d["audit"]["results"] if not r["passed"]] == ["A3"]
        assert d["audit"]["results"][2]["witness"]["rates"]

    def test_bad_beta_file(self, capsys, files):
        code, out, _ = run(capsys, "check", "--beta-file", files["bad"])
        assert code == 1 and "reciprocity function" in out and "FAIL" in out

    def test_good_beta_file(self, capsys, files):
        code, out, _ = run(capsys, "check", "--beta-file", files["median3"], "--samples", "300")
        assert code == 0 and "PASS" in out

    def test_seed_emitted_and_reproducible(self, capsys):
        argv = ["check", "--method", "harmonic", "--seed", "99", "--output", "json", "--arity", "2,3"]
        _, a, _ = run(capsys, *argv)
        _, b, _ = run(capsys, *argv)
        assert a == b and json.loads(a)["seed"] == 99

    def test_global_flags_before_subcommand(self, capsys):
        _, out, _ = run(capsys, "--output", "json", "--seed", "5", "--tolerance", "1e-6", "check", "--method", "median")
        d = json.loads(out)
        assert d["seed"] == 5 and d["tolerance"] == 1e-6

    @pytest.mark.parametrize("argv", [["check"], ["check", "--method", "geometric", "--samples", "0"]])
    def test_input_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2


class TestDemos:
    def test_siegel_default(self, capsys):
        code, out, _ = run(capsys, "demo-siegel", "--output", "json")
        d = json.loads(out)
        assert code == 0
        assert d["arithmetic"]["quote"] == 2.5
        assert d["arithmetic"]["reciprocal_quote"] == 0.625
        assert d["arithmetic"]["siegel_gap"] == 0.5625
        assert d["resolution"]["quote"] == 2.0 and abs(d["resolution"]["siegel_gap"]) <= 1e-15

    def test_siegel_text(self, capsys):
        _, out, _ = run(capsys, "demo-siegel")
        for s in ("2.5", "0.625", "0.5625"):
            assert s in out

    def test_siegel_constant(self, capsys, files):
        _, out, _ = run(capsys, "demo-siegel", "--input", files["const"], "--output", "json")
        d = json.loads(out)
        assert abs(d["arithmetic"]["siegel_gap"]) <= 1e-15 and abs(d["resolution"]["siegel_gap"]) <= 1e-15

    def test_siegel_median(self, capsys, files):
        _, out, _ = run(capsys, "demo-siegel", "--input", files["three"], "--method", "median", "--output", "json")
        assert abs(json.loads(out)["resolution"]["siegel_gap"]) <= 1e-15

    def test_group(self, capsys):
        code, out, _ = run(capsys, "demo-group", "--output", "json", "--seed", "3", "--n", "4")
        d = json.loads(out)
        assert code == 0 and d["homomorphism_error"] <= 1e-12 and d["seed"] == 3
        assert d["equivariance"]["geometric/reflection"]["passed"]
        assert not d["equivariance"]["arithmetic/reflection"]["passed"]

    def test_group_text(self, capsys):
        code, out, _ = run(capsys, "demo-group")
        assert code == 0 and "matrix(g1)" in out


class TestImpliedAndExpand:
    def test_implied_prob(self, capsys):
        code, out, _ = run(capsys, "implied-prob", "1", "4")
        assert code == 0 and "0.666666666667  (low-rate state)" in out

    def test_implied_prob_invalid(self, capsys):
        assert run(capsys, "implied-prob", "0", "4")[0] == 2

    def test_expand_stdout(self, capsys, files):
        code, out, _ = run(capsys, "expand", "--input", files["weighted"])
        assert code == 0 and out.strip() == "2.0,16.0,16.0"

    def test_expand_file(self, capsys, files, tmp_path):
        target = tmp_path / "out.json"
        code, _, _ = run(capsys, "expand", "--input", files["weighted"], "--out", str(target))
        assert code == 0 and json.loads(target.read_text())["rates"] == [2.0, 16.0, 16.0]

    def test_expand_uniform_thirds(self, capsys, files):
        _, out, _ = run(capsys, "expand", "--input", files["thirds"], "--out-format", "json")
        assert json.loads(out)["rates"] == [1.0, 2.0, 3.0]

    def test_expand_too_large(self, capsys, files):
        code, _, err = run(capsys, "expand", "--input", files["huge"])
        assert code == 2 and "2000003" in err


def test_module_entry_point(files):
    out = subprocess.run(
        [sys.executable, "-m", "siegelfx", "aggregate", "--method", "geometric", "--input", files["two"]],
        capture_output=True, text=True,
    )
    assert out.returncode == 0 and "2" in out.stdout


def test_argparse_usage_error_is_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["aggregate", "--method", "nope"])
    assert exc.value.code == 2
