"""End-to-end mining runs: config parsing, pipeline, and reporting.

A run ingests a CSV, enumerates full-assignment patterns, scores them with
Fisher's exact test, applies the selected procedures, and reports rejected
patterns together with their Pareto fronts and the pairwise utility measures
between methods.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import yaml

from .exact_tests import Sidedness
from .patterns import (
    BinRule,
    CategoricalSchema,
    TargetSpec,
    TransactionTable,
    VariableSpec,
    build_hypotheses,
    enumerate_patterns,
    ingest_csv,
)
from .procedures import (
    Hypothesis,
    ProcedureResult,
    bonferroni,
    holm,
    spur,
    t_bonferroni,
    tarone_threshold,
    weighted_bonferroni,
)
from .utility import dominating_subset, less_useful_count_weights, utility_measure

__all__ = [
    "ConfigError",
    "InternalInvariantError",
    "RunConfig",
    "MiningReport",
    "load_run_config",
    "run_mining",
]

MINING_METHODS = ("spur", "t_bonferroni", "bonferroni", "weighted_bonferroni", "holm")
WEIGHT_MODES = ("less_useful_count",)


class ConfigError(ValueError):
    """Configuration file is malformed or inconsistent."""


class InternalInvariantError(AssertionError):
    """A guaranteed property failed at report time; indicates a bug."""


@dataclass(frozen=True)
class RunConfig:
    input: str
    schema: CategoricalSchema
    methods: tuple[str, ...]
    alpha: float
    sidedness: Sidedness
    min_support: int = 1
    output: str | None = None
    weights: str | None = None

    def __post_init__(self) -> None:
        if not self.methods:
            raise ConfigError("at least one method must be selected")
        unknown = [m for m in self.methods if m not in MINING_METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; available: {list(MINING_METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError(f"duplicate methods in {list(self.methods)}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.min_support < 0:
            raise ConfigError(f"min_support must be non-negative, got {self.min_support}")
        wants_weights = "weighted_bonferroni" in self.methods
        if wants_weights and self.weights is None:
            raise ConfigError("weights must be set when weighted_bonferroni is selected")
        if not wants_weights and self.weights is not None:
            raise ConfigError("weights is only meaningful with weighted_bonferroni")
        if self.weights is not None and self.weights not in WEIGHT_MODES:
            raise ConfigError(f"unknown weights mode {self.weights!r}; available: {list(WEIGHT_MODES)}")


def _require_keys(mapping: Mapping[str, Any], allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(mapping, Mapping):
        raise ConfigError(f"{where}: expected a mapping, got {type(mapping).__name__}")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}; allowed: {sorted(allowed)}")
    missing = required - set(mapping)
    if missing:
        raise ConfigError(f"{where}: missing required keys {sorted(missing)}")


def _parse_bin(raw: Mapping[str, Any], where: str) -> BinRule:
    _require_keys(raw, {"category", "lower", "upper"}, {"category"}, where)
    lower, upper = raw.get("lower"), raw.get("upper")
    return BinRule(
        category=str(raw["category"]),
        lower=None if lower is None else float(lower),
        upper=None if upper is None else float(upper),
    )


def _parse_variable(raw: Mapping[str, Any], position: int) -> VariableSpec:
    where = f"schema.variables[{position}]"
    _require_keys(raw, {"name", "role", "categories", "bins", "direction"}, {"name", "role", "categories"}, where)
    cats = raw["categories"]
    if not isinstance(cats, list) or not all(isinstance(c, (str, int, float)) for c in cats):
        raise ConfigError(f"{where}: categories must be a list of scalars")
    bins = raw.get("bins")
    parsed_bins = None
    if bins is not None:
        if not isinstance(bins, list):
            raise ConfigError(f"{where}: bins must be a list")
        parsed_bins = tuple(_parse_bin(b, f"{where}.bins[{i}]") for i, b in enumerate(bins))
    try:
        return VariableSpec(
            name=str(raw["name"]),
            role=str(raw["role"]),
            categories=tuple(str(c) for c in cats),
            bins=parsed_bins,
            direction=None if raw.get("direction") is None else str(raw["direction"]),
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_schema(raw: Mapping[str, Any]) -> CategoricalSchema:
    _require_keys(raw, {"target", "variables"}, {"target", "variables"}, "schema")
    _require_keys(raw["target"], {"column", "positive"}, {"column", "positive"}, "schema.target")
    if not isinstance(raw["variables"], list) or not raw["variables"]:
        raise ConfigError("schema.variables must be a non-empty list")
    variables = tuple(_parse_variable(v, i) for i, v in enumerate(raw["variables"]))
    target = TargetSpec(column=str(raw["target"]["column"]), positive=str(raw["target"]["positive"]))
    try:
        return CategoricalSchema(variables=variables, target=target)
    except ValueError as exc:
        raise ConfigError(f"schema: {exc}") from exc


def load_run_config(path: str) -> RunConfig:
    """Parse and validate a mining config file; unknown keys are hard errors."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    _require_keys(
        raw,
        {"input", "schema", "methods", "alpha", "sidedness", "min_support", "output", "weights"},
        {"input", "schema", "methods", "alpha", "sidedness"},
        path,
    )
    methods = raw["methods"]
    if not isinstance(methods, list):
        raise ConfigError(f"{path}: methods must be a list")
    try:
        sidedness = Sidedness(str(raw["sidedness"]))
    except ValueError:
        raise ConfigError(
            f"{path}: sidedness must be one of {[s.value for s in Sidedness]}, got {raw['sidedness']!r}"
        ) from None
    return RunConfig(
        input=str(raw["input"]),
        schema=parse_schema(raw["schema"]),
        methods=tuple(str(m) for m in methods),
        alpha=float(raw["alpha"]),
        sidedness=sidedness,
        min_support=int(raw.get("min_support", 1)),
        output=None if raw.get("output") is None else str(raw["output"]),
        weights=None if raw.get("weights") is None else str(raw["weights"]),
    )


@dataclass
class MiningReport:
    """Everything a mining run produced, ready for serialization."""

    config: RunConfig
    dataset: dict[str, Any]
    methods: dict[str, dict[str, Any]]
    utility_matrix: dict[str, dict[str, int]] | None

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "input": self.config.input,
            "alpha": self.config.alpha,
            "sidedness": self.config.sidedness.value,
            "min_support": self.config.min_support,
            "dataset": self.dataset,
            "methods": self.methods,
            "utility_matrix": self.utility_matrix,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    def patterns_tsv(self) -> str:
        names = self.config.schema.variable_names
        lines = ["\t".join(["method", *names, "p", "psi", "in_dominating_set"])]
        for method in self.config.methods:
            for entry in self.methods[method]["rejected"]:
                lines.append(
                    "\t".join(
                        [
                            method,
                            *entry["labels"],
                            f"{entry['p']:.6g}",
                            f"{entry['psi']:.6g}",
                            str(entry["in_dominating_set"]).lower(),
                        ]
                    )
                )
        return "\n".join(lines) + "\n"


def _run_method(
    method: str,
    hypotheses: Sequence[Hypothesis],
    config: RunConfig,
    order,
) -> ProcedureResult:
    if method == "spur":
        return spur(hypotheses, config.alpha, order)
    if method == "t_bonferroni":
        return t_bonferroni(hypotheses, config.alpha)
    if method == "bonferroni":
        return bonferroni(hypotheses, config.alpha)
    if method == "holm":
        return holm(hypotheses, config.alpha)
    if method == "weighted_bonferroni":
        weights = less_useful_count_weights([h.key for h in hypotheses], order)
        return weighted_bonferroni(hypotheses, weights, config.alpha)
    raise ConfigError(f"unknown method {method!r}")


def _trace_json(result: ProcedureResult) -> list[dict[str, Any]]:
    return [
        {
            "t": rec.t,
            "sigma": rec.sigma,
            "delta": rec.delta,
            "p_min": rec.p_min,
            "tau": rec.tau,
            "rejected": rec.rejected,
            "ignored": list(rec.ignored),
            "n_testable": rec.n_testable,
        }
        for rec in result.trace
    ]


def run_mining(config: RunConfig, drop_unmappable: bool = False) -> MiningReport:
    """Execute the full pipeline for one config and build the report.

    Raises InternalInvariantError if the guaranteed containment between the
    testability-aware baseline's Pareto front and the iterative procedure's
    rejections fails, which would mean an implementation bug.
    """
    table = ingest_csv(config.input, config.schema, drop_unmappable=drop_unmappable)
    patterns = enumerate_patterns(table, config.schema, config.min_support)
    order = config.schema.preference_order()
    hypotheses = build_hypotheses(patterns, config.sidedness, order)
    sigma1 = tarone_threshold(hypotheses, config.alpha, 0.0) if hypotheses else None
    n_testable = (
        sum(1 for h in hypotheses if h.psi <= sigma1) if sigma1 is not None else 0
    )

    results: dict[str, ProcedureResult] = {}
    method_blocks: dict[str, dict[str, Any]] = {}
    rejected_keys: dict[str, list] = {}
    for method in config.methods:
        result = _run_method(method, hypotheses, config, order)
        results[method] = result
        indices = sorted(result.rejected)
        keys = [hypotheses[i].key for i in indices]
        # Equal keys share dominance relations, so value membership in the
        # front is well defined even with duplicates.
        front = dominating_subset(keys, order)
        entries = []
        for i, key in zip(indices, keys):
            pattern = patterns[i][0]
            entries.append(
                {
                    "pattern": list(pattern),
                    "labels": list(config.schema.pattern_labels(pattern)),
                    "p": hypotheses[i].p,
                    "psi": hypotheses[i].psi,
                    "family": list(key.family),
                    "utility": list(key.utility),
                    "in_dominating_set": key in front,
                }
            )
        rejected_keys[method] = keys
        block: dict[str, Any] = {
            "n_rejected": len(indices),
            "rejected": entries,
            "dominating_subset": [e["labels"] for e in entries if e["in_dominating_set"]],
        }
        if result.threshold is not None:
            block["threshold"] = result.threshold
        if result.trace:
            block["trace"] = _trace_json(result)
            block["stopped_at"] = result.stopped_at
        method_blocks[method] = block

    matrix = None
    if len(config.methods) > 1:
        matrix = {
            a: {
                b: utility_measure(rejected_keys[a], rejected_keys[b], order)
                for b in config.methods
                if b != a
            }
            for a in config.methods
        }
        if "spur" in results and "t_bonferroni" in results:
            if matrix["t_bonferroni"]["spur"] != 0:
                raise InternalInvariantError(
                    "utility measure from the testability-aware baseline to the "
                    f"iterative procedure is {matrix['t_bonferroni']['spur']}, expected 0"
                )

    dataset = {
        "n_rows": table.n_rows,
        "n_positive": table.n_positive,
        "n_dropped_rows": len(table.dropped_rows),
        "n_patterns": len(patterns),
        "sigma1": sigma1,
        "n_testable_at_sigma1": n_testable,
    }
    return MiningReport(config=config, dataset=dataset, methods=method_blocks, utility_matrix=matrix)
