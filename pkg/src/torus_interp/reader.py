#################################################################################
# torus-interp Copyright (c) 2024, the torus-interp developers.
# All rights reserved.
#
# Please see the files COPYRIGHT.md and LICENSE.md for full copyright and license
# information, respectively.
#################################################################################

import math

import numpy as np
import yaml

import idaes.logger as idaeslog

from torus_interp.exceptions import InputError
from torus_interp.kernel import KernelSpec, TruncationPolicy
from torus_interp.solver import FittedModel, ScatteredData
from torus_interp.torus import FrequencyBound, as_points, wrap_array
from torus_interp.writer import MODEL_FORMAT, MODEL_VERSION

_log = idaeslog.getLogger(__name__)


def _parse_rows(filename, expected_columns=None):
    """
    Whitespace-separated float rows; ``#`` starts a comment and blank lines
    are skipped. Returns the rows and their 1-based line numbers.
    """
    try:
        with open(filename) as fp:
            lines = fp.readlines()
    except OSError as err:
        raise InputError(f"Could not open file {filename}: {err}") from err

    rows, line_numbers = [], []
    for number, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        fields = text.split()
        try:
            row = [float(v) for v in fields]
        except ValueError:
            raise InputError(
                f"{filename}:{number}: could not parse {text!r} as numbers", line=number
            )
        if not all(math.isfinite(v) for v in row):
            raise InputError(f"{filename}:{number}: non-finite value", line=number)
        if expected_columns is None:
            expected_columns = len(row)
        if len(row) != expected_columns:
            raise InputError(
                f"{filename}:{number}: expected {expected_columns} columns, got {len(row)}",
                line=number,
            )
        rows.append(row)
        line_numbers.append(number)

    if not rows:
        raise InputError(f"{filename} contains no data rows")
    return np.array(rows, dtype=float), line_numbers


def read_data_file(filename, m=None):
    """
    Read scattered data: one site per line, m coordinates then the value.

    Arguments:
        filename : path of the data file
        m (optional) : dimension; inferred from the column count when omitted

    Returns:
        ScatteredData
    """
    rows, _ = _parse_rows(filename, None if m is None else m + 1)
    if rows.shape[1] < 2:
        raise InputError(f"{filename}: a data row needs at least one coordinate and a value")
    data = ScatteredData(points=rows[:, :-1], values=rows[:, -1])
    _log.info(f"read {data.n} sites in m={data.m} from {filename}")
    return data


def read_query_file(filename, m):
    "Query sites (one per line, m coordinates) as an (N, m) array."
    rows, line_numbers = _parse_rows(filename)
    if rows.shape[1] != m:
        raise InputError(
            f"{filename}:{line_numbers[0]}: query points have {rows.shape[1]} coordinates "
            f"but the model has m={m}",
            line=line_numbers[0],
        )
    return rows


def load_model(filename):
    """
    Load a model written by :func:`torus_interp.writer.save_model`; the
    points and coefficients come back bit-exactly.
    """
    document = ModelReader._yaml_to_dict(filename)
    return ModelReader.model_from_document(document, filename)


class ModelReader:
    @staticmethod
    def _yaml_to_dict(yaml_filename):
        """Reads and stores a yaml file as a dictionary

        Args:
            yaml_filename (str):
                The filename of the yaml file to read.

        Returns:
            input_dict (dict):
                The result of reading the yaml file and translating
                its structure into a dictionary.

        """

        try:
            with open(yaml_filename) as fp:
                input_dict = yaml.safe_load(fp)
        except (OSError, yaml.YAMLError) as err:
            raise InputError("Could not open file %s: %s" % (yaml_filename, err)) from err

        if not isinstance(input_dict, dict):
            raise InputError("%s does not hold a mapping" % yaml_filename)
        return input_dict

    @staticmethod
    def model_from_document(document, source="<document>"):
        if document.get("format") != MODEL_FORMAT:
            raise InputError(f"{source}: not a {MODEL_FORMAT} file")
        if document.get("version") != MODEL_VERSION:
            raise InputError(
                f"{source}: unsupported model version {document.get('version')!r} "
                f"(expected {MODEL_VERSION})"
            )
        missing = [
            key
            for key in ("m", "k", "lambda", "omega", "points", "coeffs")
            if key not in document
        ]
        if missing:
            raise InputError(f"{source}: missing keys {missing}")

        m = int(document["m"])
        points = wrap_array(as_points(np.array(document["points"], dtype=float), m))
        coeffs = np.array(document["coeffs"], dtype=float)
        if coeffs.shape != (points.shape[0],):
            raise InputError(
                f"{source}: {points.shape[0]} points but {coeffs.size} coefficients"
            )

        omega = document["omega"]
        if omega:
            spec = KernelSpec(m, document["k"], document["lambda"], omega=tuple(omega))
            bound = spec.omega
        else:
            radius = document.get("truncation_radius")
            if radius is None:
                raise InputError(f"{source}: full-kernel model without truncation_radius")
            spec = KernelSpec(
                m, document["k"], document["lambda"], truncation=TruncationPolicy(radius=radius)
            )
            bound = FrequencyBound.uniform(int(radius), m)

        values = document.get("values")
        if values is not None:
            values = np.array(values, dtype=float)
        for array in (points, coeffs, values):
            if array is not None:
                array.setflags(write=False)
        return FittedModel(points=points, coeffs=coeffs, spec=spec, bound=bound, values=values)


class RunConfigReader(ModelReader):
    "YAML run configuration for the command line."

    def read(self, yaml_filename):
        config = self._yaml_to_dict(yaml_filename)
        _log.debug(f"run configuration from {yaml_filename}: {sorted(config)}")
        return {str(key).replace("-", "_"): value for key, value in config.items()}
