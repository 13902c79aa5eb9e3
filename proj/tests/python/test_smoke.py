# Copyright 2026 The PASS Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import os
import pathlib

import numpy as np
import pytest

import pass_privacy as pp

SCHEMA = [
    pp.Attribute("s", 2, pp.Role.PRIVATE),
    pp.Attribute("u", 3, pp.Role.USEFUL),
]


@pytest.fixture(scope="module")
def split():
    data = pp.generate_synthetic(SCHEMA, 300, noise_scale=0.3, seed=1)
    return pp.split_train_test(data, 0.2, 2)


@pytest.fixture(scope="module")
def model(split):
    train, _ = split
    return pp.train_pass(train, substitutes=16, hidden=[8], embed_dim=4, epochs=5,
                         batch_size=64, seed=3)


def test_synthetic_shapes(split):
    train, test = split
    assert train.num_samples == 240
    assert test.num_samples == 60
    assert train.features.shape == (240, 5)
    assert set(train.labels("u")) <= {0, 1, 2}


def test_probabilities_are_row_stochastic(split, model):
    _, test = split
    p = model.substitution_probs(test.features)
    assert p.shape == (60, 16)
    np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)
    assert (p >= 0).all()


def test_release_is_seeded(split, model):
    _, test = split
    a = model.release(test.features, repeats=2, seed=9)
    b = model.release(test.features, repeats=2, seed=9)
    assert a.shape == (120, test.feature_dim)
    np.testing.assert_array_equal(a, b)
    picks = model.substitute(test.features, repeats=2, seed=9)
    assert len(picks) == 120 and max(picks) < 16


def test_evaluate_reports_every_attribute(split, model):
    train, test = split
    report = pp.evaluate(model, train, test, repeats=1, seed=4)
    assert [a["attribute"] for a in report["attributes"]] == ["s", "u"]
    for a in report["attributes"]:
        assert a["nag"] >= 0.0
    assert math.isfinite(report["mnag"])


def test_checkpoint_round_trip(tmp_path, split, model):
    train, test = split
    path = str(tmp_path / "ckpt.json")
    model.save(path, "abc", 3)
    back = pp.load_checkpoint(path, train)
    np.testing.assert_array_equal(back.substitution_probs(test.features),
                                  model.substitution_probs(test.features))


def test_scalar_helpers():
    assert pp.nag(0.967, 0.1, 0.999) == pytest.approx(0.96440489, abs=1e-8)
    assert pp.entropy([0.5, 0.5]) == pytest.approx(math.log(2))
    with pytest.raises(pp.ValidationError):
        pp.nag(0.5, 0.6, 0.6)


def test_config_errors_are_typed():
    with pytest.raises(pp.ConfigError) as err:
        pp.config_hash("[data]\nattributes = s:2:private,u:2:useful\nbogus = 1\n")
    assert "data.bogus" in str(err.value)
    text = "[data]\nattributes = s:2:private,u:2:useful\n"
    assert pp.config_hash(text) == pp.config_hash(pp.canonical_config(text))


def test_quickstart_run(tmp_path):
    cfg = pathlib.Path(os.environ.get("PASS_SOURCE_DIR", pathlib.Path(__file__).parents[2]))
    summary = pp.run(str(cfg / "configs" / "quickstart.cfg"), out_dir=str(tmp_path / "out"))
    assert summary["code"] == 0, summary["log"]
    assert "metrics.csv" in summary["files"]
    assert "pass mnag=" in summary["log"]
    assert (tmp_path / "out" / "checkpoint.json").exists()
