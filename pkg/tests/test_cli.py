import json

import pytest

from bsdop.cli import main, parse_int_range, parse_n_grid, read_config_file


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGridParsing:
    def test_explicit_list(self):
        assert parse_n_grid("8,16,32") == [8, 16, 32]

    def test_geometric(self):
        assert parse_n_grid("8:2048:x2") == [8, 16, 32, 64, 128, 256, 512, 1024, 2048]

    def test_arithmetic(self):
        assert parse_n_grid("8:24:+8") == [8, 16, 24]

    def test_single(self):
        assert parse_n_grid("32") == [32]

    def test_bad_step(self):
        with pytest.raises(ValueError):
            parse_n_grid("8:64:*2")

    def test_int_range(self):
        assert parse_int_range("3..10") == (3, 10)
        assert parse_int_range("7") == (7, 7)


class TestMoments:
    def test_exact_output(self, capsys):
        code, out, _ = run(capsys, "moments", "--n", "10", "--K", "2", "--format", "exact")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "0: 1"
        assert lines[1] == "1: z"
        assert lines[2] == "2: 11/10 z^2 + 1/5 z"

    def test_k_zero(self, capsys):
        code, out, _ = run(capsys, "moments", "--n", "5", "--K", "0")
        assert code == 0
        assert out.strip() == "0: 1"

    def test_dec_format(self, capsys):
        code, out, _ = run(capsys, "moments", "--n", "10", "--K", "2", "--format", "dec")
        assert code == 0
        assert "1.1000000000000001 z^2" in out

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "moments", "--n", "10", "--K", "2", "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert data["n"] == 10
        assert data["polys"][2] == [[1, "1/5"], [2, "11/10"]]

    def test_bad_arguments_exit_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["moments", "--K", "2"])
        assert exc.value.code == 2
        code, _, _ = run(capsys, "moments", "--n", "0", "--K", "2")
        assert code == 2


class TestVerify:
    def test_oracle_small_grid(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "oracle", "--n", "3..4", "--k", "0..3")
        assert code == 0
        assert "oracle: 8/8 cases passed" in out
        assert out.count("PASS oracle") == 8

    def test_basis_identity(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "basis-identity", "--n", "1..4", "--v", "1..4")
        assert code == 0
        assert "16/16 cases passed" in out

    def test_tail_inequality(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "tail-inequality")
        assert code == 0

    def test_unknown_suite_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--suite", "everything"])
        assert exc.value.code == 2


class TestConverge:
    def test_square_closed_form_rows(self, capsys):
        code, out, _ = run(
            capsys, "converge", "--fn", "poly:0,0,1", "--r", "1", "--n", "8,16,32"
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0].startswith("n,sup_error,")
        assert lines[1].split(",")[1] == "0.375"
        assert lines[2].split(",")[1] == "0.1875"
        assert lines[3].split(",")[1] == "0.09375"
        assert "# bound_thm1=PASS" in out

    def test_exact_reproduction_note(self, capsys):
        code, out, _ = run(capsys, "converge", "--fn", "poly:0,1", "--r", "1", "--n", "8,16,32")
        assert code == 0
        assert "exact-reproduction" in out

    def test_byte_identical_csv(self, tmp_path, capsys):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for target in (first, second):
            code, _, _ = run(
                capsys,
                "converge", "--fn", "exp:a=1/2", "--r", "1",
                "--n", "8:32:x2", "--out", str(target),
            )
            assert code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_hypothesis_violation_exit_2(self, capsys):
        code, _, err = run(capsys, "converge", "--fn", "exp:a=1/2", "--r", "3", "--n", "8,16")
        assert code == 2
        assert "r*A < 1" in err

    def test_plot_format(self, capsys):
        code, out, _ = run(
            capsys,
            "converge", "--fn", "poly:0,0,1", "--r", "1", "--n", "8,16,32",
            "--format", "plot",
        )
        assert code == 0
        blocks = out.strip().split("\n\n")
        assert blocks[0].startswith("# series: sup_error")
        assert "8 0.375" in blocks[0]
        assert any(block.startswith("# series: n_error") for block in blocks)

    def test_json_meta_echo(self, capsys):
        code, out, _ = run(
            capsys,
            "converge", "--fn", "poly:0,0,1", "--r", "1", "--n", "8,16,32",
            "--format", "json",
        )
        assert code == 0
        data = json.loads(out)
        assert data["meta"]["fn"] == "poly:0,0,1"
        assert data["meta"]["residual_rho"] == "A*r"
        assert data["summary"]["slope"] == "-1.0000000000000002"


class TestConfigFile:
    def test_values_and_comments(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text('fn = poly:0,0,1\nr = 1  # radius\nn = "8,16,32"\n\n# done\n')
        values = read_config_file(str(config))
        assert values == {"fn": "poly:0,0,1", "r": "1", "n": "8,16,32"}

    def test_flags_override_config(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("fn=poly:0,0,1\nr=1\nn=8,16\nformat=json\n")
        code, out, _ = run(
            capsys, "converge", "--config", str(config), "--n", "8,16,32"
        )
        assert code == 0
        data = json.loads(out)
        assert data["meta"]["n"] == "8,16,32"  # flag beat the config file
        assert data["meta"]["format"] == "json"  # config beat the default

    def test_threads_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("BSDOP_THREADS", "3")
        code, out, _ = run(
            capsys,
            "converge", "--fn", "poly:0,0,1", "--r", "1", "--n", "8,16,32",
            "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["meta"]["threads"] == 3


class TestVoronovskajaCommand:
    def test_cube_residual_rows(self, capsys):
        code, out, _ = run(capsys, "voronovskaja", "--fn", "poly:0,0,0,1", "--r", "1", "--n", "8,16")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "n,resid,n2_resid,bound_thm2,K"
        assert lines[1].split(",")[2] == "14"
        assert lines[2].split(",")[2] == "14"
        assert "# bound_thm2=PASS" in out

    def test_square_identically_zero(self, capsys):
        code, out, _ = run(capsys, "voronovskaja", "--fn", "poly:0,0,1", "--r", "1", "--n", "8,16")
        assert code == 0
        for line in out.strip().split("\n")[1:3]:
            assert line.split(",")[1] == "0"

    def test_exp_quarter_verdict(self, capsys):
        code, out, _ = run(capsys, "voronovskaja", "--fn", "exp:a=1/4", "--r", "1", "--n", "8,16")
        assert code == 0
        assert "# bound_thm2=PASS" in out

    def test_hypothesis_exit_2(self, capsys):
        code, _, err = run(capsys, "voronovskaja", "--fn", "exp:a=1/2", "--r", "1", "--n", "8")
        assert code == 2
        assert "A*(r+1) < 1" in err


class TestDerivativeCommand:
    def test_linear_zero_errors(self, capsys):
        code, out, _ = run(capsys, "derivative", "--fn", "poly:0,1", "--p", "1", "--r", "1", "--n", "8,16")
        assert code == 0
        for line in out.strip().split("\n")[1:3]:
            assert line.split(",")[1] == "0"

    def test_square_closed_form(self, capsys):
        code, out, _ = run(capsys, "derivative", "--fn", "poly:0,0,1", "--p", "1", "--r", "1", "--n", "8")
        assert code == 0
        assert out.strip().split("\n")[1].split(",")[1] == "0.5"

    def test_exp_second_derivative_verdict(self, capsys):
        code, out, _ = run(
            capsys,
            "derivative", "--fn", "exp:a=1/2", "--p", "2", "--r", "1", "--r1", "1.5",
            "--n", "8,16",
        )
        assert code == 0
        assert "# bound_deriv=PASS" in out
