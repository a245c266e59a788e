#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

import datetime
import hashlib
import json
import os
import pathlib
import tempfile
import warnings

from dataclasses import dataclass, field

import h5py
import numpy as np
import yaml

import idaes.logger as idaeslog

from pyomo.common.config import ConfigDict, ConfigValue

_log = idaeslog.getLogger(__name__)

MODEL_FORMAT = "torus-interp-model"
MODEL_VERSION = 1


@dataclass
class StudyReport:
    """
    Rows of a study in sweep order.

    ``columns`` are the CSV columns (in order); every row is a dict holding at
    least those keys and possibly extra per-row fields (status, per-axis
    omega, ...) that only go to the metadata and the H5 copy.
    """

    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([row[name] for row in self.rows], dtype=float)

    def as_array(self):
        if not self.rows:
            return np.zeros((0, len(self.columns)))
        return np.array(
            [[float(row[name]) for name in self.columns] for row in self.rows]
        )

    def extra_fields(self):
        "Row fields outside the CSV columns, as lists."
        names = []
        for row in self.rows:
            for key in row:
                if key not in self.columns and key not in names:
                    names.append(key)
        return {name: [row.get(name) for row in self.rows] for name in names}


def _to_builtin(value):
    "numpy scalars/arrays and tuples to plain python for json/yaml."
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_builtin(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


def canonical_json(value):
    return json.dumps(_to_builtin(value), sort_keys=True, separators=(",", ":"), default=str)


def config_hash(config):
    "SHA-256 of the canonical JSON dump of a run configuration."
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def atomic_write(path, write, mode="w"):
    """
    Write ``path`` through a temporary file in the same directory that is
    renamed over the target once ``write(handle)`` returns.
    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        mode=mode, dir=path.parent, prefix=f".{path.name}.", delete=False
    )
    try:
        with handle:
            write(handle)
        os.replace(handle.name, path)
    except BaseException:
        if os.path.exists(handle.name):
            os.remove(handle.name)
        raise


class ReportWriter:
    CONFIG = ConfigDict()

    CONFIG.declare(
        "csv_results_file_name",
        ConfigValue(
            default=None, domain=str, description="filepath to the output CSV file."
        ),
    )

    CONFIG.declare(
        "h5_results_file_name",
        ConfigValue(
            default=None, domain=str, description="filepath to the output H5 file."
        ),
    )

    CONFIG.declare(
        "h5_parent_group_name",
        ConfigValue(
            default=None,
            domain=str,
            description="Parent group name (container like objects, similar to a folder/directory in a file system) for the study outputs to be saved.",
        ),
    )

    CONFIG.declare(
        "metadata_file_name",
        ConfigValue(
            default=None,
            domain=str,
            description="filepath to the JSON metadata sidecar; defaults to the CSV path with a .json suffix.",
        ),
    )

    def __init__(
        self,
        parallel_manager,
        **options,
    ):
        self.parallel_manager = parallel_manager
        self.config = self.CONFIG(options)

        if self.parallel_manager.is_root_process():
            if (
                self.config.h5_results_file_name is None
                and self.config.csv_results_file_name is None
            ):
                warnings.warn(
                    "No results will be written to disk as h5_results_file_name and csv_results_file_name are both None"
                )

    def _metadata_path(self):
        if self.config.metadata_file_name is not None:
            return self.config.metadata_file_name
        if self.config.csv_results_file_name is not None:
            return str(pathlib.Path(self.config.csv_results_file_name).with_suffix(".json"))
        return None

    def _write_to_csv(self, report):
        def write(handle):
            np.savetxt(
                handle,
                report.as_array(),
                header=",".join(report.columns),
                delimiter=",",
                fmt="%.17g",
                comments="",
            )

        atomic_write(self.config.csv_results_file_name, write)
        _log.info(f"wrote {len(report)} rows to {self.config.csv_results_file_name}")

    def _write_metadata(self, report, path):
        payload = dict(report.metadata)
        payload["columns"] = list(report.columns)
        payload["rows"] = report.extra_fields()

        def write(handle):
            json.dump(_to_builtin(payload), handle, indent=2, sort_keys=True, default=str)
            handle.write("\n")

        atomic_write(path, write)

    def _write_output_to_h5(self, report):
        h5_results_file_name = self.config.h5_results_file_name
        pathlib.Path(h5_results_file_name).parent.mkdir(parents=True, exist_ok=True)
        if self.config.h5_parent_group_name is None:
            # No parent groups exists, a new file will be created regardless
            f = h5py.File(h5_results_file_name, "w")
            parent_grp = f
        else:
            mode = "a" if os.path.isfile(h5_results_file_name) else "w"
            f = h5py.File(h5_results_file_name, mode)
            if self.config.h5_parent_group_name in f:
                del f[self.config.h5_parent_group_name]
            parent_grp = f.require_group(self.config.h5_parent_group_name)

        try:
            columns = parent_grp.create_group("columns")
            for name in report.columns:
                columns.create_dataset(name, data=report.column(name))
            extras = parent_grp.create_group("extras")
            for name, values in report.extra_fields().items():
                try:
                    data = np.array(
                        [np.nan if v is None else v for v in values], dtype=float
                    )
                except (TypeError, ValueError):
                    data = np.array([json.dumps(_to_builtin(v)) for v in values], dtype="S")
                extras.create_dataset(name, data=data)
            parent_grp.attrs["metadata"] = canonical_json(report.metadata)
        finally:
            f.close()

    def save_report(self, report):
        "Write the CSV, the metadata sidecar and the optional H5 copy of ``report``."
        if not self.parallel_manager.is_root_process():
            return report

        if self.config.csv_results_file_name is not None:
            self._write_to_csv(report)
        metadata_path = self._metadata_path()
        if metadata_path is not None:
            self._write_metadata(report, metadata_path)
        if self.config.h5_results_file_name is not None:
            self._write_output_to_h5(report)
        return report


def model_document(model, run_config=None):
    "The versioned YAML document for a fitted model."
    provenance = {
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config_hash": config_hash(run_config if run_config is not None else {}),
    }
    document = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "m": int(model.spec.m),
        "k": int(model.spec.k),
        "lambda": float(model.spec.lam),
        "omega": list(model.spec.omega.omega) if model.spec.is_truncated else [],
        "truncation_radius": model.truncation_radius,
        "points": model.points.tolist(),
        "coeffs": model.coeffs.tolist(),
        "provenance": provenance,
    }
    if model.values is not None:
        document["values"] = model.values.tolist()
    return document


def save_model(model, path, run_config=None):
    "Write ``model`` as YAML; floats are stored by repr and load back bit-exactly."
    document = model_document(model, run_config)

    def write(handle):
        yaml.safe_dump(document, handle, sort_keys=False, default_flow_style=None)

    atomic_write(path, write)
    _log.info(f"saved model with {model.n} sites to {path}")
    return document
