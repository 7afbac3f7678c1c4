"""Command-line interface.

One binary with four subcommands:

* ``fit``      fit a model and print a coefficient report
* ``compare``  change-in-scaled-deviance test of two nested formulas
* ``tariff``   build the rating table for a fitted model
* ``bm``       bonus-malus trajectory simulation and steady-state analysis

Reports go to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 input/parse/schema errors, 2 fit non-convergence.
"""

from __future__ import annotations

import argparse
import sys

from .bonusmalus import (
    DEFAULT_TABLE,
    BonusMalusTable,
    expected_premium,
    load_table_json,
    stationary_distribution,
)
from .design import encode_design, infer_schema, load_portfolio
from .distributions import chi_square_quantile
from .errors import NonConvergenceError, TariffGLMError
from .families import family_by_name
from .fitting import FitControls, FitResult, fit, wald_statistics
from .formula import parse_formula
from .inference import REJECT, compare_nested
from .report import ReportDocument, Table, fmt_estimate, fmt_pvalue, render_json
from .tariff import build_tariff_table

__all__ = ["main"]


def _load(path: str):
    schema = infer_schema(path)
    dataset = load_portfolio(path, schema)
    if dataset.exposure_defaulted:
        print(
            f"warning: no exposure column in {path}; all exposures set to 1.0",
            file=sys.stderr,
        )
    return dataset


def _fit_formula(
    dataset, formula_text: str, family_name: str, max_iterations: int | None = None
) -> tuple[FitResult, str]:
    formula = parse_formula(formula_text)
    design = encode_design(dataset, formula)
    controls = (
        FitControls(max_iterations=max_iterations) if max_iterations else FitControls()
    )
    result = fit(design, family_by_name(family_name), controls)
    return result, str(formula)


def _coefficient_table(result: FitResult) -> Table:
    rows = []
    for w in wald_statistics(result):
        rows.append(
            (
                w.label,
                fmt_estimate(w.estimate),
                fmt_estimate(w.std_error),
                f"{w.z_value:.3f}",
                fmt_pvalue(w.p_value),
            )
        )
    return Table(
        headers=("", "Estimate", "Std. Error", "z value", "Pr(>|z|)"),
        rows=tuple(rows),
    )


def _fit_payload(result: FitResult, formula_text: str) -> dict:
    return {
        "command": "fit",
        "formula": formula_text,
        "family": result.family.name,
        "n_observations": result.n_observations,
        "coefficients": [
            {
                "label": w.label,
                "estimate": w.estimate,
                "std_error": w.std_error,
                "z_value": w.z_value,
                "p_value": w.p_value,
            }
            for w in wald_statistics(result)
        ],
        "null_deviance": result.null_deviance,
        "df_null": result.df_null,
        "deviance": result.deviance,
        "df_residual": result.df_residual,
        "log_likelihood": result.log_likelihood,
        "aic": result.aic,
        "iterations": result.n_iterations,
        "converged": result.converged,
    }


def _cmd_fit(args) -> int:
    dataset = _load(args.data)
    result, formula_text = _fit_formula(
        dataset, args.formula, args.family, args.max_iterations
    )
    if args.json:
        sys.stdout.write(render_json(_fit_payload(result, formula_text)))
        return 0
    doc = ReportDocument()
    doc.add_text("", f"Model: {formula_text}\nFamily: {result.family.name}")
    doc.add_table("Coefficients:", _coefficient_table(result))
    doc.add_text(
        "",
        "\n".join(
            [
                f"Null deviance: {fmt_estimate(result.null_deviance)}"
                f"  on {result.df_null} degrees of freedom",
                f"Residual deviance: {fmt_estimate(result.deviance)}"
                f"  on {result.df_residual} degrees of freedom",
                f"AIC: {fmt_estimate(result.aic)}",
                f"Number of iterations: {result.n_iterations}",
            ]
        ),
    )
    sys.stdout.write(doc.render_plain())
    return 0


def _cmd_compare(args) -> int:
    dataset = _load(args.data)
    reduced, reduced_text = _fit_formula(dataset, args.reduced, args.family)
    full, full_text = _fit_formula(dataset, args.full, args.family)
    report = compare_nested(reduced, full, alpha=args.alpha)
    critical = chi_square_quantile(args.alpha, report.df)
    verdict = (
        "reject the reduced model in favour of the full model"
        if report.decision == REJECT
        else "keep the reduced model; the extra terms are not justified"
    )
    if args.json:
        payload = {
            "command": "compare",
            "reduced_formula": reduced_text,
            "full_formula": full_text,
            "family": args.family,
            "alpha": args.alpha,
            "reduced_deviance": reduced.scaled_deviance,
            "reduced_df": reduced.df_residual,
            "full_deviance": full.scaled_deviance,
            "full_df": full.df_residual,
            "statistic": report.statistic,
            "q": report.df,
            "critical_value": critical,
            "p_value": report.p_value,
            "decision": report.decision,
        }
        sys.stdout.write(render_json(payload))
        return 0
    lines = [
        f"Nested model comparison (alpha = {args.alpha:g})",
        f"Reduced: {reduced_text}",
        f"Full:    {full_text}",
        "",
        f"Reduced scaled deviance: {fmt_estimate(reduced.scaled_deviance)}"
        f"  on {reduced.df_residual} degrees of freedom",
        f"Full scaled deviance:    {fmt_estimate(full.scaled_deviance)}"
        f"  on {full.df_residual} degrees of freedom",
        f"Change in scaled deviance: {fmt_estimate(report.statistic)}  on q = {report.df}",
        f"Critical value at alpha {args.alpha:g}: {fmt_estimate(critical)}",
        f"p-value: {fmt_pvalue(report.p_value)}",
        f"Decision: {verdict}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _cmd_tariff(args) -> int:
    dataset = _load(args.data)
    result, formula_text = _fit_formula(dataset, args.formula, args.family)
    table = build_tariff_table(result)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                if args.output.endswith(".json"):
                    fh.write(render_json(table.to_json_obj()))
                else:
                    table.write_csv(fh)
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
            return 1
        sys.stdout.write(
            f"tariff with {len(table.cells)} cells written to {args.output}\n"
        )
        return 0
    if args.json:
        payload = {"command": "tariff", "formula": formula_text}
        payload.update(table.to_json_obj())
        sys.stdout.write(render_json(payload))
        return 0
    headers = tuple(name for name, _ in table.dimensions) + (
        "Annual rate",
        "Years to one claim",
        "Relativity",
    )
    rows = tuple(
        combo
        + (
            f"{cell.annual_rate:.6f}",
            f"{cell.years_to_one_claim:.3f}",
            f"{cell.relativity:.5f}",
        )
        for combo, cell in table.cells.items()
    )
    doc = ReportDocument()
    doc.add_text("", f"Model: {formula_text}")
    doc.add_table("Tariff:", Table(headers=headers, rows=rows))
    sys.stdout.write(doc.render_plain())
    return 0


def _bm_table(args) -> BonusMalusTable:
    if args.table:
        return load_table_json(args.table)
    return DEFAULT_TABLE


def _cmd_bm_simulate(args) -> int:
    table = _bm_table(args)
    claims = [int(c) for c in args.claims.split(",") if c.strip() != ""]
    if any(c < 0 for c in claims):
        raise TariffGLMError("claim counts must be nonnegative")
    trajectory = table.simulate_trajectory(args.start, claims, args.base)
    if args.json:
        payload = {
            "command": "bm-simulate",
            "start_step": args.start,
            "base_premium": args.base,
            "years": [
                {
                    "year": t.year,
                    "claims": claims[t.year - 1],
                    "premium_paid": t.premium_paid,
                    "step_after": t.step_after,
                }
                for t in trajectory
            ],
        }
        sys.stdout.write(render_json(payload))
        return 0
    rows = tuple(
        (str(t.year), str(claims[t.year - 1]), f"{t.premium_paid:.2f}", str(t.step_after))
        for t in trajectory
    )
    doc = ReportDocument()
    doc.add_text("", f"Start step: {args.start}   Base premium: {args.base:.2f}")
    doc.add_table(
        "Trajectory:",
        Table(headers=("Year", "Claims", "Premium paid", "Step after"), rows=rows),
    )
    sys.stdout.write(doc.render_plain())
    return 0


def _cmd_bm_steady(args) -> int:
    table = _bm_table(args)
    distribution = stationary_distribution(table, args.lam)
    premium = expected_premium(table, distribution, args.base)
    if args.json:
        payload = {
            "command": "bm-steady",
            "lambda": args.lam,
            "base_premium": args.base,
            "distribution": [
                {
                    "step": s,
                    "percentage": table.percentages[s - 1],
                    "probability": float(distribution[s - 1]),
                }
                for s in range(1, table.n_steps + 1)
            ],
            "expected_premium": premium,
        }
        sys.stdout.write(render_json(payload))
        return 0
    rows = tuple(
        (str(s), f"{table.percentages[s - 1]:g}", f"{distribution[s - 1]:.10f}")
        for s in range(1, table.n_steps + 1)
    )
    doc = ReportDocument()
    doc.add_text("", f"Claim frequency: {args.lam:g}   Base premium: {args.base:.2f}")
    doc.add_table(
        "Steady-state distribution:",
        Table(headers=("Step", "Percentage", "Probability"), rows=rows),
    )
    doc.add_text("", f"Expected premium: {premium:.2f}")
    sys.stdout.write(doc.render_plain())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tariffglm",
        description="Claim-frequency GLM fitting, tariff building, and "
        "bonus-malus analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model and report coefficients")
    p_fit.add_argument("data", help="portfolio CSV file")
    p_fit.add_argument("--formula", required=True, help='e.g. "claims ~ region + type"')
    p_fit.add_argument("--family", default="poisson", choices=("poisson", "normal"))
    p_fit.add_argument(
        "--max-iterations", type=int, default=None, help="cap on IRLS iterations"
    )
    p_fit.add_argument("--json", action="store_true", help="machine-readable output")
    p_fit.set_defaults(handler=_cmd_fit)

    p_cmp = sub.add_parser("compare", help="test a reduced model against a full one")
    p_cmp.add_argument("data", help="portfolio CSV file")
    p_cmp.add_argument("--reduced", required=True, help="reduced-model formula")
    p_cmp.add_argument("--full", required=True, help="full-model formula")
    p_cmp.add_argument("--family", default="poisson", choices=("poisson", "normal"))
    p_cmp.add_argument("--alpha", type=float, default=0.05)
    p_cmp.add_argument("--json", action="store_true")
    p_cmp.set_defaults(handler=_cmd_compare)

    p_tar = sub.add_parser("tariff", help="build the rating table for a model")
    p_tar.add_argument("data", help="portfolio CSV file")
    p_tar.add_argument("--formula", required=True)
    p_tar.add_argument("--family", default="poisson", choices=("poisson", "normal"))
    p_tar.add_argument("--output", help="write CSV (or JSON if the name ends in .json)")
    p_tar.add_argument("--json", action="store_true")
    p_tar.set_defaults(handler=_cmd_tariff)

    p_bm = sub.add_parser("bm", help="bonus-malus analysis")
    bm_sub = p_bm.add_subparsers(dest="bm_command", required=True)

    p_sim = bm_sub.add_parser("simulate", help="follow a claims history year by year")
    p_sim.add_argument("--start", type=int, default=DEFAULT_TABLE.entry_step)
    p_sim.add_argument(
        "--claims", required=True, help="comma-separated claims per year, e.g. 0,0,1"
    )
    p_sim.add_argument("--base", type=float, default=100.0, help="base (100%%) premium")
    p_sim.add_argument("--table", help="JSON file overriding the built-in table")
    p_sim.add_argument("--json", action="store_true")
    p_sim.set_defaults(handler=_cmd_bm_simulate)

    p_std = bm_sub.add_parser("steady", help="long-run step distribution")
    p_std.add_argument(
        "--lambda", dest="lam", type=float, required=True, help="mean claims per year"
    )
    p_std.add_argument("--base", type=float, default=100.0, help="base (100%%) premium")
    p_std.add_argument("--table", help="JSON file overriding the built-in table")
    p_std.add_argument("--json", action="store_true")
    p_std.set_defaults(handler=_cmd_bm_steady)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (TariffGLMError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
