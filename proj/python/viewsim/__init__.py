# Copyright 2026 The viewsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Viewability-threshold control laboratory."""

from viewsim._core import (
    ALPHA_MEAN_POSITIVE,
    ALPHA_MEDIAN,
    ConfigError,
    ViewsimError,
    alpha_mean_positive,
    alpha_median,
    alpha_samples,
    generate_lld,
    greedy_sweep_pass_fraction,
    greedy_threshold,
    policy_act,
    predict_next_viewability,
    reward,
    run_experiment,
    safe_logit,
    sigmoid,
    train_agent,
    tune,
    validate_config,
)

__all__ = [
    "ALPHA_MEAN_POSITIVE",
    "ALPHA_MEDIAN",
    "ConfigError",
    "ViewsimError",
    "alpha_mean_positive",
    "alpha_median",
    "alpha_samples",
    "generate_lld",
    "greedy_sweep_pass_fraction",
    "greedy_threshold",
    "policy_act",
    "predict_next_viewability",
    "reward",
    "run_experiment",
    "safe_logit",
    "sigmoid",
    "train_agent",
    "tune",
    "validate_config",
]
