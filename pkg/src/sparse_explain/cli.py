"""Command-line interface.

Exit codes: 0 success, 1 data or compute error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import io as fio
from .errors import ExplainError, UndefinedCorrelationError
from .evaluation import (MISSING_RANK_POLICY, SynthConfig, curve_report, default_k_grid,
                         explanation_curve, generate_synthetic, spearman_topk)
from .pipeline import (ExplainSettings, compute_ranking, explain_dataset_ec,
                       explain_dataset_shapley)
from .ranking import EcCredit, RankMethod, beta_proportions

ALL_METHODS = ("shapley", "ec", "beta", "coverage")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    model_path: Optional[str] = None
    data_path: Optional[str] = None
    method: Optional[str] = None
    threshold: float = 0.0
    samples: int = 10_000
    seed: int = 0
    ks: Optional[tuple[int, ...]] = None
    top_k: int = 1000
    output_path: str = "-"
    parallelism: int = 1
    ec_credit: str = EcCredit.MEMBERSHIP.value
    ec_search: str = "linear"
    max_size: int = 12
    exact_limit: int = 20

    def settings(self) -> ExplainSettings:
        return ExplainSettings(ec_search=self.ec_search, max_size=self.max_size,
                               samples=self.samples, seed=self.seed,
                               exact_limit=self.exact_limit,
                               ec_credit=EcCredit(self.ec_credit))

    def metadata(self, command: str) -> dict[str, object]:
        # Output path and parallelism do not affect results and stay out of the header.
        meta = {"command": command}
        for key, value in dataclasses.asdict(self).items():
            if key in ("output_path", "parallelism") or value is None:
                continue
            if key == "ks":
                value = ",".join(map(str, value))
            meta[key] = value
        return meta


class UsageError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _method_list(text: str) -> tuple[str, ...]:
    values = tuple(v.strip() for v in text.split(",") if v.strip())
    bad = [v for v in values if v not in ALL_METHODS]
    if bad or not values:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {ALL_METHODS}")
    return values


def _intercept(text: str) -> Optional[float]:
    if text == "auto":
        return None
    return float(text)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-explain",
        description="Explain linear models on sparse binary data with evidence "
                    "counterfactuals and voting-game Shapley values.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threshold", type=float, default=0.0,
                        help="decision threshold on the linear score (default 0)")
    common.add_argument("--seed", type=_non_negative_int, default=0)
    common.add_argument("--samples", type=_positive_int, default=10_000,
                        help="Monte Carlo permutations for instances above --exact-limit")
    common.add_argument("--exact-limit", type=_non_negative_int, default=20)
    common.add_argument("--ec-search", choices=("linear", "greedy", "complete"),
                        default="linear")
    common.add_argument("--max-size", type=_positive_int, default=12,
                        help="largest subset tried by --ec-search complete")
    common.add_argument("--ec-credit", choices=[c.value for c in EcCredit],
                        default=EcCredit.MEMBERSHIP.value)
    common.add_argument("--parallelism", type=_positive_int, default=1)
    common.add_argument("--out", default="-", help="output file (default stdout)")

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--model", required=True, help="model TSV")
    inputs.add_argument("--data", required=True, help="SVMLight data file")

    p = sub.add_parser("explain", parents=[common, inputs],
                       help="per-instance EC or Shapley scores")
    p.add_argument("--method", choices=("ec", "shapley"), required=True)

    p = sub.add_parser("rank", parents=[common, inputs], help="global feature ranking")
    p.add_argument("--method", choices=ALL_METHODS, required=True)
    p.add_argument("--feature-names", help="feature name sidecar TSV")

    p = sub.add_parser("curve", parents=[common, inputs], help="explanation curves")
    p.add_argument("--methods", type=_method_list, default=ALL_METHODS)
    p.add_argument("--ks", type=_int_list, default=None,
                   help="strictly increasing k values (default 1,2,5,10,...,num_features)")

    p = sub.add_parser("correlate", parents=[common],
                       help="Spearman correlation matrix between rankings")
    p.add_argument("--model")
    p.add_argument("--data")
    p.add_argument("--methods", type=_method_list, default=ALL_METHODS)
    p.add_argument("--ranking", action="append", default=[], metavar="NAME=PATH",
                   help="use a ranking CSV written by 'rank' instead of computing one")
    p.add_argument("--top-k", type=_positive_int, default=1000)

    p = sub.add_parser("synth", help="write a synthetic model and dataset")
    p.add_argument("--out-dir", required=True)
    defaults = SynthConfig()
    for f in dataclasses.fields(SynthConfig):
        flag = "--" + f.name.replace("_", "-")
        default = getattr(defaults, f.name)
        if f.name == "intercept":
            p.add_argument(flag, type=_intercept, default=default,
                           help="fixed intercept, or 'auto' to calibrate to --positive-rate")
            continue
        kind = int if isinstance(default, int) else float
        p.add_argument(flag, type=kind, default=default)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        model_path=getattr(args, "model", None),
        data_path=getattr(args, "data", None),
        method=getattr(args, "method", None),
        threshold=args.threshold, samples=args.samples, seed=args.seed,
        ks=getattr(args, "ks", None), top_k=getattr(args, "top_k", 1000),
        output_path=args.out, parallelism=args.parallelism,
        ec_credit=args.ec_credit, ec_search=args.ec_search, max_size=args.max_size,
        exact_limit=args.exact_limit)


def _load_inputs(config: RunConfig):
    model = fio.load_model(config.model_path, threshold=config.threshold)
    dataset = fio.load_dataset(config.data_path)
    m = max(model.num_features, dataset.num_features)
    model = dataclasses.replace(model, num_features=m)
    return model, dataset


def cmd_explain(args, config: RunConfig) -> str:
    model, dataset = _load_inputs(config)
    settings = config.settings()
    rows = []
    if args.method == "ec":
        credit = EcCredit(config.ec_credit)
        for exp in explain_dataset_ec(model, dataset, settings, config.parallelism):
            if exp is None:
                continue
            share = 1.0 if credit is EcCredit.MEMBERSHIP else 1.0 / exp.size
            rows.extend((exp.instance_id, f, share) for f in sorted(exp.features))
    else:
        for att in explain_dataset_shapley(model, dataset, settings, config.parallelism):
            if att is None:
                continue
            rows.extend((att.instance_id, f, float(att.values[f])) for f in sorted(att.values))
    return fio.format_csv(config.metadata("explain"),
                          ["instance_id", "feature_id", "score"], rows)


def cmd_rank(args, config: RunConfig) -> str:
    model, dataset = _load_inputs(config)
    ranking = compute_ranking(args.method, model, dataset, config.settings(),
                              config.parallelism)
    header = ["rank", "feature_id", "normalized_score", "raw_score"]
    extra = []
    if args.method == RankMethod.BETA.value:
        props = beta_proportions(model)
        header.append("proportional_beta")
        extra.append(lambda f: props[f])
    if args.feature_names:
        names = fio.load_feature_names(args.feature_names)
        header.append("feature_name")
        extra.append(lambda f: names.get(f, ""))
    rows = [[i, e.feature, e.score, e.raw] + [x(e.feature) for x in extra]
            for i, e in enumerate(ranking.entries, start=1)]
    meta = config.metadata("rank")
    meta["raw_total"] = repr(ranking.raw_total)
    if args.method == RankMethod.SHAPLEY.value:
        meta["normalization"] = "signed total"
    return fio.format_csv(meta, header, rows)


def cmd_curve(args, config: RunConfig) -> str:
    model, dataset = _load_inputs(config)
    m = model.num_features
    ks = list(config.ks) if config.ks else default_k_grid(m)
    if ks[-1] > m:
        raise UsageError(f"--ks values must not exceed num_features={m}")
    X = dataset.to_csr(m)
    curves = [explanation_curve(compute_ranking(method, model, dataset, config.settings(),
                                                config.parallelism),
                                model, dataset, ks, X=X)
              for method in args.methods]
    ratios = None
    if "beta" in args.methods:
        report = curve_report(curves)
        ratios = {c.method: report.ratios(c.method) for c in curves}
    header = ["method", "k", "explained_count", "explained_fraction"]
    if ratios:
        header.append("ratio_to_beta")
    rows = []
    for c in curves:
        for i, ((k, e), frac) in enumerate(zip(c.points, c.fractions())):
            row = [c.method, k, e, frac]
            if ratios:
                row.append(ratios[c.method][i])
            rows.append(row)
    meta = config.metadata("curve")
    meta["methods"] = ",".join(args.methods)
    meta["baseline_positive_count"] = curves[0].baseline_positive_count if curves else 0
    return fio.format_csv(meta, header, rows)


def cmd_correlate(args, config: RunConfig) -> str:
    rankings = {}
    for spec in args.ranking:
        name, sep, path = spec.partition("=")
        if not sep or not name or not path:
            raise UsageError(f"--ranking expects NAME=PATH, got {spec!r}")
        rankings[name] = fio.load_ranking(path, name)
    if not rankings:
        if not (config.model_path and config.data_path):
            raise UsageError("correlate needs --model and --data, or --ranking files")
        model, dataset = _load_inputs(config)
        for method in args.methods:
            rankings[method] = compute_ranking(method, model, dataset, config.settings(),
                                               config.parallelism)
    names = list(rankings)
    rows = []
    for a in names:
        row = [a]
        for b in names:
            try:
                row.append(spearman_topk(rankings[a], rankings[b], config.top_k).rho)
            except UndefinedCorrelationError:
                row.append(math.nan)
        rows.append(row)
    meta = config.metadata("correlate")
    meta["rankings"] = ",".join(names)
    meta["rows"] = "top-k features of the row method, ranked against the column method"
    meta["missing_rank_policy"] = MISSING_RANK_POLICY
    return fio.format_csv(meta, [""] + names, rows)


def cmd_synth(args) -> None:
    values = {f.name: getattr(args, f.name) for f in dataclasses.fields(SynthConfig)}
    config = SynthConfig(**values)
    model, dataset = generate_synthetic(config)
    meta = "".join(f"# {k}={v}\n" for k, v in dataclasses.asdict(config).items())
    out = Path(args.out_dir)
    fio.write_text(out / "model.tsv", meta + fio.format_model(model))
    fio.write_text(out / "data.svm", meta + fio.format_dataset(dataset))


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "synth":
            cmd_synth(args)
            return 0
        config = _config(args)
        if config.ks is not None and any(b <= a for a, b in zip(config.ks, config.ks[1:])):
            raise UsageError(f"--ks must be strictly increasing, got {config.ks}")
        if config.ks is not None and config.ks[0] < 0:
            raise UsageError("--ks values must be non-negative")
        handler = {"explain": cmd_explain, "rank": cmd_rank, "curve": cmd_curve,
                   "correlate": cmd_correlate}[args.command]
        fio.write_text(config.output_path, handler(args, config))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (ExplainError, OSError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run_cli())
