import sys
from colorama import Fore
from .argsHandler import ArgsHandler
from .commands import EffectConfig, RunConfig, cmdEffect, cmdFit, cmdSimulate, cmdSummarize, errorJson
from .constants import Constants
from .diagnostics import CovariateChange
from .errors import ConfigError, ParameterError, QuantOrdError
from .logManager import configureLogging
from .statusBar import StatusBar


def runCommand(args) -> int:
    if args.command == "fit":
        cmdFit(RunConfig.fromArgs(args), StatusBar(enabled=None if not args.quiet else False))
    elif args.command == "simulate":
        data = cmdSimulate(args.study, args.n, args.seed, args.out)
        print(f"{Constants.COLOR_ORANGE}⮑{Fore.WHITE} Wrote {data.n} rows with {data.J} categories to "
              f"{Constants.COLOR_ORANGE}{args.out}{Fore.WHITE}")
    elif args.command == "effect":
        try:
            change = CovariateChange(args.from_value, args.to_value, args.delta)
        except ParameterError as e:
            raise ConfigError(e.message) from None
        frame = cmdEffect(EffectConfig(args.fit, args.covariate, change, args.data, args.out))
        print(frame.to_string(index=False))
    elif args.command == "summarize":
        cmdSummarize(args.fit)
    return Constants.EXIT_OK


def main(argv=None) -> int:
    args = ArgsHandler.getArgs(argv)
    configureLogging(verbose=not args.quiet)
    try:
        return runCommand(args)
    except KeyboardInterrupt:
        print(f"{Constants.COLOR_ORANGE}[Interrupted] quantord was interrupted. Finished quantiles are kept.{Fore.WHITE}")
        return Constants.EXIT_INTERRUPTED
    except QuantOrdError as e:
        if args.debug:
            raise
        print(errorJson(e), file=sys.stderr)
        return e.exitCode
    except Exception:
        if args.debug:
            raise
        print(f"{Constants.COLOR_ORANGE}Error: an unhandled exception has occured. Use the --debug argument to enable exception reporting.{Fore.WHITE}",
              file=sys.stderr)
        return Constants.EXIT_FAILURE


def mainEntryPoint():
    sys.exit(main())


if __name__ == "__main__":
    mainEntryPoint()
