import csv
import json

import numpy as np
import pytest

from superres.formats import (
    dump_json,
    load_json,
    measure_from_json,
    measure_to_json,
    samples_from_json,
    samples_to_json,
    write_curve_csv,
)
from superres.model import AtomicMeasure, SampleVector, sample_spikes


class TestMeasureJSON:
    def test_roundtrip(self, rng):
        x = AtomicMeasure(1, rng.random(4), rng.standard_normal(4) + 1j * rng.standard_normal(4))
        doc = measure_to_json(x)
        assert set(doc) == {"dim", "locations", "amp_re", "amp_im"}
        back = measure_from_json(doc)
        assert np.array_equal(back.locations, x.locations)
        assert np.array_equal(back.amplitudes, x.amplitudes)

    def test_two_dim_roundtrip(self, rng):
        x = AtomicMeasure(2, rng.random((3, 2)), rng.standard_normal(3) + 0j)
        back = measure_from_json(measure_to_json(x))
        assert back.dim == 2
        assert np.array_equal(back.locations, x.locations)


class TestSamplesJSON:
    def test_roundtrip_and_field_names(self, rng):
        y = sample_spikes(AtomicMeasure(1, rng.random(3), np.ones(3)), 5)
        doc = samples_to_json(y)
        assert doc["fc"] == 5 and doc["k_min"] == -5
        assert len(doc["coeff_re"]) == 11
        back = samples_from_json(doc)
        assert np.array_equal(back.coeffs, y.coeffs)

    def test_increasing_k_convention_enforced(self):
        doc = {"dim": 1, "fc": 2, "k_min": 0, "coeff_re": [0] * 5, "coeff_im": [0] * 5}
        with pytest.raises(ValueError, match="increasing k"):
            samples_from_json(doc)

    def test_json_serializable(self, tmp_path, rng):
        y = sample_spikes(AtomicMeasure(1, rng.random(2), np.ones(2)), 3)
        path = tmp_path / "samples.json"
        dump_json(samples_to_json(y), path)
        back = samples_from_json(load_json(path))
        assert np.abs(back.coeffs - y.coeffs).max() == 0.0


class TestCurveCSV:
    def test_header_and_rows(self, tmp_path):
        path = tmp_path / "curve.csv"
        t = np.array([0.0, 0.5])
        vals = np.array([1.0 + 2.0j, -0.5j])
        write_curve_csv(path, t, vals)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "re", "im"]
        assert float(rows[1][1]) == 1.0 and float(rows[1][2]) == 2.0
        assert float(rows[2][2]) == -0.5
