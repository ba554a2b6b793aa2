"""Command-line interface: `ovofair run` and `ovofair sweep`.

Exit codes: 0 success, 1 usage error, 2 data error, 3 when every fold of
every run was infeasible (the report is still written).
"""

from __future__ import annotations

import argparse
import sys

import yaml

from .datasets import DataFormatError
from .harness import (
    APPROACHES,
    ConfigError,
    ExperimentConfig,
    RunResult,
    emit_report,
    emit_sweep,
    run_experiment,
    sweep_epsilon,
)
from .metrics import Criterion, DisparityForm
from .mitigators import MitigationKind


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits with 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ovofair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("--config", help="YAML/JSON key-value file; flags override it")
        p.add_argument("--dataset", help="adult, compas or synthetic:<spec path>")
        p.add_argument("--approach", choices=APPROACHES)
        p.add_argument("--method", choices=[m.value for m in MitigationKind])
        p.add_argument("--criterion", choices=[c.value for c in Criterion])
        p.add_argument("--form", choices=[f.value for f in DisparityForm])
        p.add_argument("--epsilon", type=float)
        p.add_argument("--folds", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--attribute", help="sensitive attribute for the single-attribute baseline")
        p.add_argument("--data-dir", dest="data_dir", help="dataset directory (or $OVOFAIR_DATA)")
        p.add_argument("--cache-dir", dest="cache_dir", help="directory for fitted-model cache")
        p.add_argument("--fairness-weight", dest="fairness_weight", type=float)
        p.add_argument("--grid-quantiles", dest="grid_quantiles", type=int)
        p.add_argument("--restarts", type=int)
        p.add_argument("--out", help="output report path")
        p.add_argument("--format", choices=["csv", "json"], dest="fmt")

    run_p = sub.add_parser("run", help="one cross-validated experiment")
    add_common(run_p)
    sweep_p = sub.add_parser("sweep", help="experiments over a range of epsilon")
    add_common(sweep_p)
    sweep_p.add_argument("--eps-start", dest="eps_start", type=float)
    sweep_p.add_argument("--eps-end", dest="eps_end", type=float)
    sweep_p.add_argument("--eps-step", dest="eps_step", type=float)
    return parser


_CONFIG_KEYS = {
    "dataset", "approach", "method", "criterion", "form", "epsilon", "folds",
    "seed", "attribute", "data_dir", "cache_dir", "fairness_weight",
    "grid_quantiles", "restarts", "out", "format", "eps_start", "eps_end",
    "eps_step",
}


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise UsageError(f"cannot parse config file {path}: {exc}")
    if not isinstance(raw, dict):
        raise UsageError(f"config file {path} must be a key-value mapping")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    return raw


def _merged_options(args: argparse.Namespace) -> dict:
    options: dict = {}
    if args.config:
        options.update(_load_config_file(args.config))
    if "format" in options:
        options["fmt"] = options.pop("format")
    for key in (
        "dataset", "approach", "method", "criterion", "form", "epsilon", "folds",
        "seed", "attribute", "data_dir", "cache_dir", "fairness_weight",
        "grid_quantiles", "restarts", "out", "fmt", "eps_start", "eps_end", "eps_step",
    ):
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    return options


def _experiment_config(options: dict) -> ExperimentConfig:
    if "dataset" not in options:
        raise UsageError("--dataset is required (adult, compas or synthetic:<path>)")
    kwargs: dict = {"dataset": str(options["dataset"])}
    if "approach" in options:
        kwargs["approach"] = str(options["approach"])
    if options.get("method") is not None:
        try:
            kwargs["method"] = MitigationKind(str(options["method"]))
        except ValueError:
            raise UsageError(f"unknown method {options['method']!r}")
    if options.get("criterion") is not None:
        try:
            kwargs["criterion"] = Criterion(str(options["criterion"]))
        except ValueError:
            raise UsageError(f"unknown criterion {options['criterion']!r}")
    if options.get("form") is not None:
        try:
            kwargs["disparity_form"] = DisparityForm(str(options["form"]))
        except ValueError:
            raise UsageError(f"unknown disparity form {options['form']!r}")
    for key in ("epsilon", "fairness_weight"):
        if options.get(key) is not None:
            kwargs[key] = float(options[key])
    for key in ("folds", "seed", "grid_quantiles", "restarts"):
        if options.get(key) is not None:
            kwargs[key] = int(options[key])
    for key in ("attribute", "data_dir", "cache_dir"):
        if options.get(key) is not None:
            kwargs[key] = str(options[key])
    try:
        config = ExperimentConfig(**kwargs)
        config.validate()
    except ConfigError as exc:
        raise UsageError(str(exc))
    return config


def _summarize(result: RunResult) -> str:
    cfg = result.config
    method = "-" if cfg.method is None else cfg.method.value
    feasible = sum(1 for f in result.folds if f.feasible)
    return (
        f"{cfg.dataset} {cfg.approach} {method} {cfg.criterion.value} "
        f"{cfg.disparity_form.value} eps={cfg.epsilon:g}: "
        f"gamma={result.mean_gamma:.4f}+-{result.std_gamma:.4f} "
        f"acc={result.mean_balanced_accuracy:.4f}+-{result.std_balanced_accuracy:.4f} "
        f"feasible {feasible}/{len(result.folds)}"
    )


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        options = _merged_options(args)
        config = _experiment_config(options)
        fmt = options.get("fmt", "json")
        out = options.get("out")

        if args.command == "run":
            result = run_experiment(config)
            results = [result]
            if out:
                emit_report(result, fmt, out)
                print(f"report written to {out}")
        else:
            eps_start = float(options.get("eps_start", 0.03))
            eps_end = float(options.get("eps_end", 0.99))
            eps_step = float(options.get("eps_step", 0.03))
            try:
                results = sweep_epsilon(config, eps_start, eps_end, eps_step)
            except ConfigError as exc:
                raise UsageError(str(exc))
            if out:
                emit_sweep(results, fmt, out)
                print(f"sweep table written to {out}")

        for result in results:
            print(_summarize(result))
        for note in results[0].deviation_notes:
            print(f"note: {note}")
        if all(not f.feasible for r in results for f in r.folds):
            print("warning: no fold satisfied the disparity cap", file=sys.stderr)
            return 3
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, DataFormatError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
