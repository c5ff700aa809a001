# Copyright 2026 the c2esim authors
# SPDX-License-Identifier: Apache-2.0
"""Cloud2Edge elastic training simulator."""

from ._core import (
    MetricsReport,
    Scenario,
    ScenarioError,
    UnsupportedDescriptor,
    accuracy_after,
    apply_overrides,
    generate_scenario,
    parse_scenario,
    parse_scenario_file,
    render_scenario,
    simulate,
    suggest_architectures,
    validate_scenario,
)

__all__ = [
    "MetricsReport",
    "Scenario",
    "ScenarioError",
    "UnsupportedDescriptor",
    "accuracy_after",
    "apply_overrides",
    "generate_scenario",
    "parse_scenario",
    "parse_scenario_file",
    "render_scenario",
    "simulate",
    "suggest_architectures",
    "validate_scenario",
]
