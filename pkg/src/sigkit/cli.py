"""Command-line surface: run, recommend, validate.

``run`` executes a named test — or, with --auto, the registry-recommended
one after the normality gate — on TSV input and prints a report.
``recommend`` prints the registry's choice for a measure.  ``validate``
runs the Monte Carlo level sweep and prints its CSV.

Exit codes: 0 success, 1 usage error, 2 data error, 3 degenerate sample.
Diagnostics go to stderr; reports go to stdout or --output.
"""

import argparse
import io
import json
import os
import sys

from . import __version__, measures, validity
from .recommend import lookup as lookup_measure, recommend as make_recommendation
from .data_io import (
    FORMS,
    NormalitySummary,
    Report,
    combiner_from_name,
    load_input,
    render_report,
)
from .errors import InvalidArgument, SigkitError
from .measures import PairedScores, per_example_values
from .significance import (
    TAILS,
    correlation_bootstrap,
    correlation_z_independent,
    mcnemar,
    paired_bootstrap,
    paired_t,
    permutation_test,
    wilcoxon_signed_rank,
)

__all__ = ["main"]

TEST_IDS = ("mcnemar", "paired_t", "wilcoxon", "bootstrap", "permutation", "z_test")

_TEST_FORMS = {
    "mcnemar": ("correctness",),
    "paired_t": ("scores", "counts"),
    "wilcoxon": ("scores", "counts"),
    "bootstrap": ("scores", "counts", "correlation"),
    "permutation": ("scores", "counts"),
    "z_test": ("correlation",),
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit-code-1 errors."""

    def error(self, message):
        raise InvalidArgument(message)


def _build_parser():
    parser = _Parser(prog="sigkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sigkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a significance test on TSV input")
    pick = run.add_mutually_exclusive_group(required=True)
    pick.add_argument("--test", choices=TEST_IDS, help="test to execute")
    pick.add_argument(
        "--auto",
        action="store_true",
        help="let the registry choose the test for --measure (normality-gated)",
    )
    run.add_argument("--measure", help="evaluation measure id (see `recommend`)")
    run.add_argument(
        "--form",
        choices=FORMS,
        help="input schema; defaults to the measure's registry form",
    )
    run.add_argument("--input", required=True, help="TSV input (system A for correlation)")
    run.add_argument("--input-b", help="system B predictions (correlation form)")
    run.add_argument("--gold", help="gold standard file (correlation form)")
    run.add_argument("--combiner", help="counts reduction: mean|accuracy|precision|recall|f1|f_beta|ratio")
    run.add_argument("--beta", type=float, default=1.0, help="beta for --combiner f_beta")
    run.add_argument("--num-idx", type=int, default=0, help="numerator column for --combiner ratio")
    run.add_argument("--den-idx", type=int, default=1, help="denominator column for --combiner ratio")
    run.add_argument("--alpha", type=float, default=0.05, help="significance level")
    run.add_argument("--tail", choices=TAILS, default="two_sided")
    run.add_argument("--resamples", type=int, default=10_000, help="bootstrap/permutation resamples")
    run.add_argument("--seed", type=int, help="resampling seed (default: $SIGKIT_SEED, else entropy)")
    run.add_argument(
        "--mode",
        choices=("auto", "exact", "approx", "sampled"),
        default="auto",
        help="wilcoxon: exact|approx; permutation: exact|sampled",
    )
    run.add_argument("--alpha-norm", type=float, default=0.05, help="normality gate level for --auto")
    run.add_argument("--format", choices=("json", "text"), default="json")
    run.add_argument("--output", help="write the report here instead of stdout")

    rec = sub.add_parser("recommend", help="print the registry's test choice for a measure")
    rec.add_argument("--measure", required=True, help="evaluation measure id")
    rec.add_argument("--form", choices=FORMS, help="input schema override")
    rec.add_argument("--input", help="TSV input, needed to gate a parametric candidate")
    rec.add_argument("--input-b", help="system B predictions (correlation form)")
    rec.add_argument("--gold", help="gold standard file (correlation form)")
    rec.add_argument("--combiner", help="counts reduction (see `run --combiner`)")
    rec.add_argument("--beta", type=float, default=1.0)
    rec.add_argument("--num-idx", type=int, default=0)
    rec.add_argument("--den-idx", type=int, default=1)
    rec.add_argument("--alpha-norm", type=float, default=0.05, help="normality gate level")
    rec.add_argument("--format", choices=("json", "text"), default="json")
    rec.add_argument("--output", help="write here instead of stdout")

    val = sub.add_parser("validate", help="Monte Carlo rejection-rate sweep (CSV)")
    val.add_argument("--trials", type=int, default=10_000, help="trials per grid cell")
    val.add_argument("--alpha", type=float, default=0.05, help="nominal level under test")
    val.add_argument("--resamples", type=int, default=1000, help="resamples for sampling tests")
    val.add_argument("--seed", type=int, default=0, help="trial-stream seed")
    val.add_argument("--output", help="write the CSV here instead of stdout")
    return parser


def _emit(data, output):
    if output is None or output == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        with open(output, "wb") as fh:
            fh.write(data)


def _resolve_cli_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("SIGKIT_SEED")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise InvalidArgument(f"SIGKIT_SEED must be an integer, got {env!r}") from None


def _load(args, form):
    combiner = None
    if args.combiner is not None:
        combiner = combiner_from_name(
            args.combiner, beta=args.beta, num_idx=args.num_idx, den_idx=args.den_idx
        )
    return load_input(
        form,
        args.input,
        path_b=args.input_b,
        gold_path=args.gold,
        combiner=combiner,
    )


def _resolve_form(args, spec):
    form = args.form
    if form is None and spec is not None:
        form = spec.ingestion_form
    if form is None:
        raise InvalidArgument("--form is required when --measure is not given")
    return form


def _as_paired_scores(data, form):
    if form == "scores":
        return data
    va = per_example_values(data, "A")
    vb = per_example_values(data, "B")
    return PairedScores(ids=data.ids, a=va, b=vb)


def _gate_deltas(data, form):
    """Per-example A-B differences used by the normality gate."""
    if form in ("scores", "counts"):
        return _as_paired_scores(data, form).deltas()
    if form == "correlation":
        sample_a, sample_b = data
        return sample_a.predictions - sample_b.predictions
    return None


def _correlation_kind(spec):
    if spec is not None and spec.measure_id in ("pearson", "spearman"):
        return spec.measure_id
    return "pearson"


def _execute(test_id, form, data, args, spec):
    allowed = _TEST_FORMS[test_id]
    if form not in allowed:
        raise InvalidArgument(
            f"test {test_id!r} ingests {' or '.join(allowed)}, not {form!r}"
        )
    if test_id == "mcnemar":
        if args.tail != "two_sided":
            raise InvalidArgument("mcnemar is two-sided only")
        return mcnemar(data, alpha=args.alpha)
    if test_id == "paired_t":
        return paired_t(_as_paired_scores(data, form), tail=args.tail, alpha=args.alpha)
    if test_id == "wilcoxon":
        if args.mode == "sampled":
            raise InvalidArgument("wilcoxon modes are auto|exact|approx")
        return wilcoxon_signed_rank(
            _as_paired_scores(data, form), tail=args.tail, alpha=args.alpha, mode=args.mode
        )
    if test_id == "permutation":
        if args.mode == "approx":
            raise InvalidArgument("permutation modes are auto|exact|sampled")
        return permutation_test(
            data,
            R=args.resamples,
            seed=_resolve_cli_seed(args.seed),
            tail=args.tail,
            alpha=args.alpha,
            mode=args.mode,
        )
    if test_id == "bootstrap":
        seed = _resolve_cli_seed(args.seed)
        if form == "correlation":
            sample_a, sample_b = data
            return correlation_bootstrap(
                sample_a,
                sample_b,
                kind=_correlation_kind(spec),
                B=args.resamples,
                seed=seed,
                tail=args.tail,
                alpha=args.alpha,
            )
        return paired_bootstrap(
            data, B=args.resamples, seed=seed, tail=args.tail, alpha=args.alpha
        )
    if test_id == "z_test":
        sample_a, sample_b = data
        kind = _correlation_kind(spec)
        corr = measures.pearson_r if kind == "pearson" else measures.spearman_rho
        return correlation_z_independent(
            kind,
            corr(sample_a),
            corr(sample_b),
            sample_a.n,
            tail=args.tail,
            alpha=args.alpha,
        )
    raise InvalidArgument(f"unknown test {test_id!r}")


def _cmd_run(args):
    spec = lookup_measure(args.measure) if args.measure is not None else None
    if args.auto and spec is None:
        raise InvalidArgument("--auto requires --measure")
    form = _resolve_form(args, spec)
    data, digest = _load(args, form)
    basis = None
    normality = None
    if args.auto:
        rec = make_recommendation(
            spec.measure_id,
            deltas=_gate_deltas(data, form),
            alpha_norm=args.alpha_norm,
        )
        test_id = rec.test_id
        basis = rec.basis
        normality = NormalitySummary.from_report(rec.normality)
    else:
        test_id = args.test
    result = _execute(test_id, form, data, args, spec)
    report = Report(
        result=result,
        measure_id=spec.measure_id if spec is not None else None,
        basis=basis,
        normality=normality,
        input_sha256=digest,
    )
    _emit(render_report(report, args.format), args.output)
    return 0


def _render_recommendation(rec, fmt):
    normality = None
    if rec.normality is not None:
        normality = {
            "statistic": rec.normality.statistic,
            "p_value": float(rec.normality.p_value),
            "pass": rec.normality.passed,
        }
    if fmt == "json":
        payload = {
            "measure": rec.measure_id,
            "test": rec.test_id,
            "basis": rec.basis,
            "normality": normality,
            "version": __version__,
        }
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    out = io.StringIO()
    print(f"sigkit {__version__}", file=out)
    print(f"measure:    {rec.measure_id}", file=out)
    print(f"test:       {rec.test_id}", file=out)
    print(f"basis:      {rec.basis}", file=out)
    if normality is not None:
        state = "pass" if normality["pass"] else "fail"
        print(
            f"normality:  K2={normality['statistic']:g} "
            f"p={normality['p_value']:g} ({state})",
            file=out,
        )
    return out.getvalue().encode("utf-8")


def _cmd_recommend(args):
    spec = lookup_measure(args.measure)
    deltas = None
    if spec.parametric is not None:
        if args.input is None:
            raise InvalidArgument(
                f"measure {spec.measure_id!r} has a parametric candidate; "
                "provide --input so the normality gate can run"
            )
        form = _resolve_form(args, spec)
        data, _ = _load(args, form)
        deltas = _gate_deltas(data, form)
    rec = make_recommendation(
        spec.measure_id, deltas=deltas, alpha_norm=args.alpha_norm
    )
    _emit(_render_recommendation(rec, args.format), args.output)
    return 0


def _cmd_validate(args):
    estimates = validity.default_grid(
        trials=args.trials,
        alpha=args.alpha,
        seed=args.seed,
        resamples=args.resamples,
    )
    out = io.StringIO()
    validity.write_csv(estimates, out)
    _emit(out.getvalue().encode("utf-8"), args.output)
    return 0


def main(argv=None):
    try:
        args = _build_parser().parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "recommend":
            return _cmd_recommend(args)
        return _cmd_validate(args)
    except SigkitError as exc:
        print(f"sigkit: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover - exercised via `python -m`
    sys.exit(main())
