# Copyright 2026 The PAL Refine Authors. All Rights Reserved.
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
# ==============================================================================
"""Perceptual artifact localization and zoom-in refinement."""

from pal_refine._core import (
    BackendError,
    ConfigError,
    DecodeError,
    Error,
    InvalidInputError,
    LookupError,
    PipelineError,
    ProtocolError,
    connected_components,
    decode_mask,
    default_prompt,
    dilate,
    encode_mask,
    erode,
    evaluate_miou,
    holm_bonferroni,
    naive_refine,
    par,
    permutation_test,
    plan_crops,
    rank_by_par,
    refine,
    run_command,
    stub_detect,
)

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "ConfigError",
    "DecodeError",
    "Error",
    "InvalidInputError",
    "LookupError",
    "PipelineError",
    "ProtocolError",
    "connected_components",
    "decode_mask",
    "default_prompt",
    "dilate",
    "encode_mask",
    "erode",
    "evaluate_miou",
    "holm_bonferroni",
    "naive_refine",
    "par",
    "permutation_test",
    "plan_crops",
    "rank_by_par",
    "refine",
    "run_command",
    "stub_detect",
]
