#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

import json
import os

import h5py
import numpy as np
import pytest
import yaml

from torus_interp.kernel import KernelSpec, TruncationPolicy
from torus_interp.parallel.single_process_parallel_manager import (
    SingleProcessParallelManager,
)
from torus_interp.reader import load_model
from torus_interp.solver import RegularizedSolver, ScatteredData
from torus_interp.writer import (
    MODEL_FORMAT,
    ReportWriter,
    StudyReport,
    atomic_write,
    config_hash,
    save_model,
)

# ------------------------------------------------------------------------------


@pytest.fixture
def report():
    return StudyReport(
        columns=("n", "l2_error"),
        rows=[
            {"n": 64, "l2_error": 0.125, "omega_per_axis": [3]},
            {"n": 256, "l2_error": 0.0625, "omega_per_axis": [5], "status": "failed"},
        ],
        metadata={"study": "convergence", "seed": 0},
    )


class TestStudyReport:
    @pytest.mark.unit
    def test_accessors(self, report):
        assert len(report) == 2
        np.testing.assert_array_equal(report.column("n"), [64.0, 256.0])
        np.testing.assert_array_equal(report.as_array(), [[64.0, 0.125], [256.0, 0.0625]])
        assert report.extra_fields() == {
            "omega_per_axis": [[3], [5]],
            "status": [None, "failed"],
        }

    @pytest.mark.unit
    def test_config_hash(self):
        assert config_hash({"a": 1, "b": (1, 2)}) == config_hash({"b": [1, 2], "a": 1})
        assert config_hash({"a": 1}) != config_hash({"a": 2})
        assert len(config_hash({})) == 64


class TestReportWriter:
    @pytest.mark.unit
    def test_csv_and_metadata(self, report, tmp_path):
        csv_path = str(tmp_path / "out" / "study.csv")
        writer = ReportWriter(SingleProcessParallelManager(), csv_results_file_name=csv_path)
        writer.save_report(report)

        with open(csv_path) as fp:
            lines = fp.read().splitlines()
        assert lines == ["n,l2_error", "64,0.125", "256,0.0625"]

        with open(tmp_path / "out" / "study.json") as fp:
            metadata = json.load(fp)
        assert metadata["study"] == "convergence"
        assert metadata["columns"] == ["n", "l2_error"]
        assert metadata["rows"]["status"] == [None, "failed"]

        # nothing but the outputs is left in the directory
        assert sorted(os.listdir(tmp_path / "out")) == ["study.csv", "study.json"]

    @pytest.mark.unit
    def test_h5(self, report, tmp_path):
        h5_path = str(tmp_path / "study.h5")
        writer = ReportWriter(SingleProcessParallelManager(), h5_results_file_name=h5_path)
        writer.save_report(report)

        with h5py.File(h5_path, "r") as f:
            np.testing.assert_array_equal(f["columns"]["l2_error"][()], [0.125, 0.0625])
            status = [json.loads(v) for v in f["extras"]["status"][()]]
            assert status == [None, "failed"]
            assert json.loads(f.attrs["metadata"])["seed"] == 0

    @pytest.mark.unit
    def test_h5_parents(self, report, tmp_path):
        h5_path = str(tmp_path / "study.h5")
        for group in ("first", "second"):
            writer = ReportWriter(
                SingleProcessParallelManager(),
                h5_results_file_name=h5_path,
                h5_parent_group_name=group,
            )
            writer.save_report(report)

        with h5py.File(h5_path, "r") as f:
            assert sorted(f.keys()) == ["first", "second"]
            np.testing.assert_array_equal(f["second"]["columns"]["n"][()], [64.0, 256.0])

    @pytest.mark.unit
    def test_warns_without_outputs(self):
        with pytest.warns(UserWarning, match="No results will be written"):
            ReportWriter(SingleProcessParallelManager())

    @pytest.mark.unit
    def test_atomic_write_failure(self, tmp_path):
        target = tmp_path / "result.txt"
        target.write_text("old")

        def fail(handle):
            handle.write("partial")
            raise RuntimeError("interrupted")

        with pytest.raises(RuntimeError):
            atomic_write(target, fail)
        assert target.read_text() == "old"
        assert os.listdir(tmp_path) == ["result.txt"]


class TestModelFile:
    @pytest.mark.unit
    @pytest.mark.parametrize(
        "spec",
        [
            KernelSpec(2, 2, 37.5, omega=(5, 3)),
            KernelSpec(1, 1, 12.0, truncation=TruncationPolicy(radius=300)),
        ],
        ids=["truncated", "full"],
    )
    def test_round_trip_is_exact(self, spec, tmp_path):
        rng = np.random.default_rng(17)
        data = ScatteredData(points=rng.random((25, spec.m)), values=rng.standard_normal(25))
        solver = RegularizedSolver()
        model = solver.fit(data, spec)

        path = tmp_path / "model.yaml"
        save_model(model, path, run_config={"command": "fit"})
        loaded = load_model(path)

        np.testing.assert_array_equal(loaded.points, model.points)
        np.testing.assert_array_equal(loaded.coeffs, model.coeffs)
        np.testing.assert_array_equal(loaded.values, model.values)
        assert loaded.spec.lam == spec.lam
        assert loaded.bound == model.bound

        queries = rng.random((1000, spec.m))
        np.testing.assert_array_equal(
            solver.evaluate(loaded, queries), solver.evaluate(model, queries)
        )

    @pytest.mark.unit
    def test_document(self, tmp_path):
        spec = KernelSpec(1, 1, 2.0, omega=(3,))
        model = RegularizedSolver().fit(ScatteredData(points=[[0.5]], values=[1.0]), spec)
        path = tmp_path / "model.yaml"
        save_model(model, path, run_config={"command": "fit", "seed": 0})

        with open(path) as fp:
            document = yaml.safe_load(fp)
        assert document["format"] == MODEL_FORMAT
        assert document["version"] == 1
        assert document["omega"] == [3]
        assert document["truncation_radius"] is None
        assert document["provenance"]["config_hash"] == config_hash(
            {"command": "fit", "seed": 0}
        )
