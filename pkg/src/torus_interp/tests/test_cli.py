#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

import json

import numpy as np
import pytest

from torus_interp import __version__
from torus_interp.cli import main
from torus_interp.experiments import CONVERGENCE_COLUMNS
from torus_interp.kernel import KernelSpec, TruncationPolicy, kernel_at_zero
from torus_interp.reader import load_model, read_data_file
from torus_interp.solver import RegularizedSolver

# ------------------------------------------------------------------------------


def _values(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


class TestFitAndEval:
    @pytest.fixture
    def model_path(self, tmp_path):
        data = tmp_path / "data.txt"
        data.write_text("# single site\n0.25 2.0\n")
        path = tmp_path / "model.yaml"
        code = main(["fit", str(data), "--lambda", "10", "--omega", "2", "--out", str(path)])
        assert code == 0
        return path

    @pytest.mark.unit
    def test_fit(self, capsys, model_path):
        output = _values(capsys.readouterr().out)
        assert output["n"] == "1"
        assert output["omega"] == "[2]"
        assert float(output["kappa_measured"]) == 1.0

        w0 = kernel_at_zero(KernelSpec(1, 1, 10.0, omega=(2,)))
        model = load_model(model_path)
        assert model.coeffs[0] == pytest.approx(2.0 / (w0 + 0.01), rel=1e-14)
        assert float(output["max_residual"]) == pytest.approx(2.0 * 0.01 / (w0 + 0.01), rel=1e-5)

    @pytest.mark.unit
    def test_eval_points(self, model_path, tmp_path, capsys):
        queries = tmp_path / "queries.txt"
        queries.write_text("0.25\n1.25\n-0.75\n")
        capsys.readouterr()
        assert main(["eval", str(model_path), "--points", str(queries)]) == 0
        values = [float(v) for v in capsys.readouterr().out.split()]

        w0 = kernel_at_zero(KernelSpec(1, 1, 10.0, omega=(2,)))
        assert values[0] == pytest.approx(2.0 * w0 / (w0 + 0.01), rel=1e-13)
        # periodic copies of the site give the identical value
        assert values[1] == values[0]
        assert values[2] == values[0]

    @pytest.mark.unit
    def test_eval_grid_to_file(self, model_path, tmp_path):
        out = tmp_path / "values.txt"
        assert main(["eval", str(model_path), "--grid-res", "4", "--out", str(out)]) == 0
        values = np.loadtxt(out)
        assert values.shape == (4,)
        # the site 1/4 is the second grid node
        assert values[1] == np.max(values)

    @pytest.mark.unit
    def test_eval_needs_queries(self, model_path, capsys):
        assert main(["eval", str(model_path)]) == 2
        assert "--points" in capsys.readouterr().err


class TestFullKernel:
    @pytest.fixture
    def data_path(self, tmp_path):
        path = tmp_path / "data.txt"
        path.write_text("0.1 1.0\n0.45 -0.5\n0.8 0.25\n")
        return path

    @pytest.mark.component
    def test_fixed_radius_round_trip(self, capsys, data_path, tmp_path):
        path = tmp_path / "full.yaml"
        code = main(["fit", str(data_path), "--lambda", "10", "--radius", "200", "--out", str(path)])
        assert code == 0
        assert _values(capsys.readouterr().out)["omega"] == "full (R=200)"
        assert load_model(path).truncation_radius == 200

        queries = tmp_path / "queries.txt"
        queries.write_text("0.1\n0.3\n1.8\n")
        assert main(["eval", str(path), "--points", str(queries)]) == 0
        values = [float(v) for v in capsys.readouterr().out.split()]

        solver = RegularizedSolver()
        spec = KernelSpec(1, 1, 10.0, truncation=TruncationPolicy(radius=200))
        reference = solver.fit(read_data_file(data_path), spec)
        expected = solver.evaluate(reference, np.array([[0.1], [0.3], [0.8]]))
        np.testing.assert_allclose(values, expected, rtol=1e-12, atol=1e-14)

    @pytest.mark.component
    def test_tolerance(self, capsys, data_path, tmp_path):
        path = tmp_path / "full.yaml"
        code = main(["fit", str(data_path), "--lambda", "10", "--tol", "1e-6", "--out", str(path)])
        assert code == 0
        assert _values(capsys.readouterr().out)["omega"].startswith("full (R=")
        radius = load_model(path).truncation_radius
        assert 1 < radius < 10**7

    @pytest.mark.unit
    def test_radius_and_tol_conflict(self, capsys, data_path, tmp_path):
        args = ["--radius", "10", "--tol", "1e-3", "--out", str(tmp_path / "m.yaml")]
        assert main(["fit", str(data_path), "--lambda", "10"] + args) == 2
        assert "either radius or tol" in capsys.readouterr().err


class TestExitCodes:
    @pytest.mark.unit
    def test_parse_error(self, tmp_path, capsys):
        data = tmp_path / "data.txt"
        data.write_text("0.1 1.0\n# comment\n0.3 abc\n")
        code = main(["fit", str(data), "--lambda", "1", "--omega", "2", "--out", str(tmp_path / "m.yaml")])
        assert code == 2
        assert ":3:" in capsys.readouterr().err

    @pytest.mark.unit
    def test_missing_options(self, tmp_path, capsys):
        data = tmp_path / "data.txt"
        data.write_text("0.1 1.0\n")
        assert main(["fit", str(data), "--out", str(tmp_path / "m.yaml")]) == 2
        assert "--lambda" in capsys.readouterr().err

    @pytest.mark.unit
    def test_lambda_out_of_range(self, tmp_path):
        data = tmp_path / "data.txt"
        data.write_text("0.1 1.0\n")
        code = main(["fit", str(data), "--lambda", "1e13", "--omega", "2", "--out", str(tmp_path / "m.yaml")])
        assert code == 2

    @pytest.mark.unit
    def test_truncation_error(self, tmp_path, capsys):
        data = tmp_path / "data.txt"
        data.write_text("0.1 1.0\n0.6 2.0\n")
        code = main(["fit", str(data), "--lambda", "1", "--out", str(tmp_path / "m.yaml")])
        assert code == 3
        err = capsys.readouterr().err
        assert "truncation" in err
        assert "--radius" in err
        assert not (tmp_path / "m.yaml").exists()

    @pytest.mark.unit
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestFeasibility:
    @pytest.mark.unit
    def test_feasible(self, capsys):
        assert main(["feasibility", "--alpha", "0.2", "--beta", "0.5", "--k", "1"]) == 0
        output = capsys.readouterr().out
        assert "r=0.3" in output.splitlines()
        assert "b-a(2k-1) = 0.3" in output

    @pytest.mark.unit
    def test_infeasible(self, capsys):
        assert main(["feasibility", "--alpha", "0.25", "--beta", "0.25", "--k", "1"]) == 4
        assert "infeasible" in capsys.readouterr().err
        assert main(["feasibility", "--alpha", "0.25", "--beta", "0.25", "--k", "1", "--force"]) == 0

    @pytest.mark.unit
    def test_suggested(self, capsys):
        assert main(["feasibility", "--m", "1"]) == 0
        output = capsys.readouterr().out
        assert "suggested alpha=0.32 beta=0.98 k=1" in output
        assert "r=0.66" in output.splitlines()

    @pytest.mark.unit
    def test_config_file(self, tmp_path, capsys):
        config = tmp_path / "run.yaml"
        config.write_text("alpha: 0.2\nbeta: 0.5\nk: 1\n")
        assert main(["feasibility", "--config", str(config)]) == 0
        assert "r=0.3" in capsys.readouterr().out.splitlines()

        # flags win over the file
        assert main(["feasibility", "--config", str(config), "--beta", "0.2"]) == 4


class TestStudies:
    @pytest.mark.component
    def test_convergence_report(self, tmp_path, capsys):
        out = tmp_path / "convergence.csv"
        code = main(
            [
                "convergence",
                "--target",
                "square",
                "--n-list",
                "64,128",
                "--grid-res",
                "256",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert out.read_text().splitlines()[0] == ",".join(CONVERGENCE_COLUMNS)
        with open(tmp_path / "convergence.json") as fp:
            metadata = json.load(fp)
        assert metadata["margin"] == pytest.approx(0.66)
        assert "config_hash=" in capsys.readouterr().out

    @pytest.mark.unit
    def test_convergence_infeasible(self, capsys):
        code = main(
            ["convergence", "--target", "square", "--n-list", "64", "--alpha", "0.25", "--beta", "0.25"]
        )
        assert code == 4
        assert "margin" in capsys.readouterr().err

    @pytest.mark.component
    def test_kh_points(self, tmp_path, capsys):
        points = tmp_path / "points.txt"
        points.write_text("0.5\n")
        assert main(["kh", "--target", "sawtooth", "--points", str(points)]) == 0
        output = _values(capsys.readouterr().out)
        assert float(output["discrepancy"]) == 0.5
        assert output["holds"] == "True"

    @pytest.mark.component
    def test_kh_study(self, capsys):
        assert main(["kh", "--target", "sawtooth", "--n-list", "16,64"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("n,qmc_error")
        assert len(lines) == 4

    @pytest.mark.component
    def test_cond(self, capsys):
        code = main(["cond", "--omega", "8", "--lambda-list", "1,10", "--n-list", "16,32"])
        assert code == 0
        output = capsys.readouterr().out
        assert "slope_in_lambda=" in output

    @pytest.mark.component
    def test_limit(self, capsys):
        code = main(
            [
                "limit",
                "--target",
                "square",
                "--n",
                "16",
                "--omega",
                "32",
                "--lambda-list",
                "16,256,4096",
            ]
        )
        assert code == 0
        output = capsys.readouterr().out
        assert "floor omega=[64]" in output

    @pytest.mark.component
    def test_sobolev(self, capsys):
        code = main(
            ["sobolev", "--target", "smooth_tp", "--lambda", "1000", "--omega", "4", "--n-list", "16,64"]
        )
        assert code == 0
        assert capsys.readouterr().out.splitlines()[0].startswith("n,mesh_norm")
