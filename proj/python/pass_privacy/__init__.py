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

"""PASS: stochastic data substitution for private-attribute protection."""

from pass_privacy._pass_core import (
    Attribute,
    ConfigError,
    Dataset,
    Model,
    PassError,
    Role,
    ValidationError,
    canonical_config,
    config_hash,
    entropy,
    evaluate,
    generate_synthetic,
    load_checkpoint,
    nag,
    run,
    split_train_test,
    train_pass,
)

__all__ = [
    "Attribute",
    "ConfigError",
    "Dataset",
    "Model",
    "PassError",
    "Role",
    "ValidationError",
    "canonical_config",
    "config_hash",
    "entropy",
    "evaluate",
    "generate_synthetic",
    "load_checkpoint",
    "nag",
    "run",
    "split_train_test",
    "train_pass",
]
