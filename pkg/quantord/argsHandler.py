import argparse
from .constants import Constants


def _floatList(text: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _nameList(text: str) -> list:
    return [part.strip() for part in text.split(",") if part.strip()]


class ArgsHandler:
    @staticmethod
    def buildParser() -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog="quantord", description="Bayesian quantile regression for ordinal outcomes.")
        parser.add_argument("--debug", action="store_true", help="Enables exception reporting in terminal.")
        parser.add_argument("--quiet", action="store_true", help="Hides the progress bar and informational messages.")
        commands = parser.add_subparsers(dest="command", required=True)

        fit = commands.add_parser("fit", help="Fit the ordinal quantile model at one or more quantile levels.")
        fit.add_argument("--data", type=str, required=True, help="CSV file with a header row.")
        fit.add_argument("--response", type=str, default="y", help="Name of the ordinal response column.")
        fit.add_argument("--covariates", type=_nameList, default=None, help="Comma-separated covariate columns (default: all others).")
        fit.add_argument("--no-intercept", action="store_true", help="Do not prepend a column of ones.")
        fit.add_argument("--model", choices=("or1", "or2"), default="or1", help="or1: J >= 4 with estimated cut-points; or2: J = 3 with fixed cut-points.")
        fit.add_argument("--quantiles", type=_floatList, default=list(Constants.QUANTILES), help="Comma-separated quantile levels in (0, 1).")
        fit.add_argument("--cutpoints", type=_floatList, default=list(Constants.OR2_CUTPOINTS), help="The two fixed cut-points for or2.")
        fit.add_argument("--iterations", type=int, default=Constants.ITERATIONS, help="Total MCMC sweeps including burn-in.")
        fit.add_argument("--burnin", type=int, default=Constants.BURN_IN, help="Sweeps discarded before storing draws.")
        fit.add_argument("--thin", type=int, default=Constants.THIN, help="Store every n-th post burn-in sweep.")
        fit.add_argument("--seed", type=int, default=Constants.SEED, help="Seed of the random number streams.")
        fit.add_argument("--iota", type=float, default=Constants.IOTA, help="Random-walk tuning scalar for the cut-point step (or1).")
        fit.add_argument("--priors", type=str, default=None, help="JSON prior file (beta_mean, beta_cov, delta_mean, delta_cov, n0, d0).")
        fit.add_argument("--out", type=str, default="quantord_out", help="Output directory.")
        fit.add_argument("--keep-draws", action="store_true", help="Write draws.csv for every quantile (needed by 'effect').")
        fit.add_argument("--workers", type=int, default=1, help="Fit quantile levels in parallel processes.")
        fit.add_argument("--no-block-move", action="store_true", help="Run the plain Gibbs sweeps without the joint parameter move.")

        simulate = commands.add_parser("simulate", help="Write a simulated dataset as CSV.")
        simulate.add_argument("--study", type=int, choices=(1, 2), required=True, help="1: four categories, 2: three categories.")
        simulate.add_argument("--n", type=int, default=300, help="Number of observations.")
        simulate.add_argument("--seed", type=int, default=Constants.SEED, help="Seed of the random number stream.")
        simulate.add_argument("--out", type=str, required=True, help="Destination CSV path.")

        effect = commands.add_parser("effect", help="Average change in category probabilities from a covariate change.")
        effect.add_argument("--fit", type=str, required=True, help="Output directory of a fit run with --keep-draws.")
        effect.add_argument("--covariate", type=str, required=True, help="Name of the covariate to change.")
        effect.add_argument("--from", dest="from_value", type=float, default=None, help="Value the covariate is set to before the change.")
        effect.add_argument("--to", dest="to_value", type=float, default=None, help="Value the covariate is set to after the change.")
        effect.add_argument("--delta", type=float, default=None, help="Additive change applied to every observation instead of --from/--to.")
        effect.add_argument("--data", type=str, default=None, help="Override the data file recorded by the fit.")
        effect.add_argument("--out", type=str, default=None, help="Directory for effects.csv (default: the fit directory).")

        summary = commands.add_parser("summarize", help="Print posterior summaries of a fit run with --keep-draws.")
        summary.add_argument("--fit", type=str, required=True, help="Output directory of a fit run.")
        return parser

    @staticmethod
    def getArgs(argv=None):
        return ArgsHandler.buildParser().parse_args(argv)
