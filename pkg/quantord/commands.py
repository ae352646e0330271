"""The fit, simulate, effect and summarize commands behind the console script."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import json
import os
import time
import numpy as np
import pandas as pd
from colorama import Fore
from .constants import Constants
from .dataLoader import loadDataset
from .diagnostics import Chain, CovariateChange, covariateEffect, dic, gammaSummary, posteriorPredictive, summarize, summaryFrame
from .distributions import QuantileSpec, RngState
from .errors import ConfigError, DataError, ParameterError, QuantOrdError
from .logManager import LogManager, getLogger
from .modelCore import CutpointVector, OrdinalDataset, PriorSpec
from .samplerOr1 import McmcConfig, runOr1
from .samplerOr2 import runOr2
from .simData import STUDIES, simulate, writeDatasetCsv
from .statusBar import StatusBar

logger = getLogger(__name__)


@dataclass
class RunConfig:
    model: str = "or1"
    quantiles: tuple = Constants.QUANTILES
    dataPath: str = ""
    response: str = "y"
    covariates: tuple = ()
    intercept: bool = True
    cutpoints: tuple = Constants.OR2_CUTPOINTS
    priorPath: str | None = None
    iterations: int = Constants.ITERATIONS
    burnIn: int = Constants.BURN_IN
    seed: int = Constants.SEED
    iota: float = Constants.IOTA
    thin: int = Constants.THIN
    outDir: str = "quantord_out"
    keepDraws: bool = False
    workers: int = 1
    blockMove: bool = True

    def validate(self) -> "RunConfig":
        if self.model not in ("or1", "or2"):
            raise ConfigError(f"Unknown model '{self.model}'; use or1 or or2.")
        if not self.quantiles:
            raise ConfigError("At least one quantile level is required.")
        for p in self.quantiles:
            if not 0.0 < p < 1.0:
                raise ConfigError(f"Quantile {p} is outside (0, 1).")
        if len(set(self.quantiles)) != len(self.quantiles):
            raise ConfigError("Quantile levels must be distinct.")
        if self.model == "or2":
            if len(self.cutpoints) != 2 or not self.cutpoints[0] < self.cutpoints[1]:
                raise ConfigError("or2 needs exactly two increasing fixed cut-points.")
        if self.workers < 1:
            raise ConfigError("--workers must be at least 1.")
        self.mcmcConfig()
        return self

    def mcmcConfig(self) -> McmcConfig:
        return McmcConfig(self.iterations, self.burnIn, self.seed, self.iota, self.thin, self.blockMove)

    def echo(self) -> dict:
        values = asdict(self)
        values["quantiles"] = list(self.quantiles)
        values["covariates"] = list(self.covariates)
        values["cutpoints"] = list(self.cutpoints)
        return values

    @classmethod
    def fromArgs(cls, args) -> "RunConfig":
        return cls(
            model=args.model,
            quantiles=tuple(args.quantiles),
            dataPath=args.data,
            response=args.response,
            covariates=tuple(args.covariates or ()),
            intercept=not args.no_intercept,
            cutpoints=tuple(args.cutpoints),
            priorPath=args.priors,
            iterations=args.iterations,
            burnIn=args.burnin,
            seed=args.seed,
            iota=args.iota,
            thin=args.thin,
            outDir=args.out,
            keepDraws=args.keep_draws,
            workers=args.workers,
            blockMove=not args.no_block_move,
        ).validate()


@dataclass
class EffectConfig:
    fitDir: str
    covariate: str
    change: CovariateChange
    dataPath: str | None = None
    outDir: str | None = None


@dataclass
class FitResult:
    p: float
    rows: list
    diagnostics: dict
    chain: Chain = field(repr=False)


def loadPriors(path: str | None, k: int, J: int) -> PriorSpec:
    if not path:
        return PriorSpec.defaults(k, J)
    try:
        with open(path, encoding="utf-8") as file:
            values = json.load(file)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Could not read prior file '{path}': {e}", {"path": path}) from None
    if not isinstance(values, dict):
        raise ConfigError("Prior file must hold a JSON object.", {"path": path})
    try:
        return PriorSpec.fromDict(values, k, J)
    except ParameterError as e:
        raise ConfigError(f"Invalid prior file '{path}': {e.message}", {"path": path}) from None


def checkCompatibility(config: RunConfig, data: OrdinalDataset):
    if config.model == "or2" and data.J != 3:
        raise ConfigError(f"or2 needs a three-category response; the data has {data.J} categories.")
    if config.model == "or1" and data.J < 4:
        raise ConfigError(f"or1 needs at least four categories; the data has {data.J}. Use or2 for J = 3.")


def quantileDir(outDir: str, p: float) -> str:
    return os.path.join(outDir, f"p{p:g}")


def fitQuantile(config: RunConfig, data: OrdinalDataset, prior: PriorSpec, index: int, progress=None) -> FitResult:
    """Fit one quantile level on the substream (seed, index)."""
    p = config.quantiles[index]
    spec = QuantileSpec(p)
    rng = RngState(config.seed).substream(index)
    mcmc = config.mcmcConfig()
    fixedCuts = CutpointVector.fixed(config.cutpoints) if config.model == "or2" else None

    started = time.perf_counter()
    if config.model == "or1":
        chain = runOr1(data, prior, spec, mcmc, rng, progress)
    else:
        chain = runOr2(data, prior, spec, fixedCuts, mcmc, rng, progress)
    elapsed = time.perf_counter() - started

    result = dic(chain, data, spec, fixedCuts)
    diagnostics = {
        "model": config.model,
        "p": p,
        "DIC": result.dic,
        "p_D": result.pD,
        "D_bar": result.dBar,
        "D_theta_bar": result.dThetaBar,
        "iterations": config.iterations,
        "burn_in": config.burnIn,
        "thin": config.thin,
        "seed": config.seed,
        "substream": index,
        "wall_time_seconds": elapsed,
        "k": data.k,
        "J": data.J,
        "covariate_names": list(data.covariateNames),
        "observed_shares": (data.categoryCounts() / data.n).tolist(),
        "predicted_shares": posteriorPredictive(chain, data, spec, fixedCuts).tolist(),
        "config": config.echo(),
    }
    if config.model == "or1":
        diagnostics.update({
            "acceptance_rate": chain.acceptRate,
            "iota": config.iota,
            "anchor": chain.meta["anchor"],
            "gamma_posterior_mean": gammaSummary(chain),
            "dhat": chain.meta["dhat"],
            "dhat_fallback": chain.meta["dhat_fallback"],
            "dhat_computed": chain.meta["dhat_computed"],
        })
    else:
        diagnostics["cutpoints"] = list(config.cutpoints)
    diagnostics["block_move"] = chain.meta["block_move"]
    diagnostics["block_acceptance_rate"] = chain.meta["block_acceptance_rate"]
    return FitResult(p, summarize(chain), diagnostics, chain)


def _fitWorker(payload):
    config, data, prior, index = payload
    return fitQuantile(config, data, prior, index)


def writeFitArtifacts(config: RunConfig, result: FitResult):
    target = quantileDir(config.outDir, result.p)
    os.makedirs(target, exist_ok=True)
    summaryFrame(result.rows).to_csv(os.path.join(target, Constants.SUMMARY_FILE), index=False,
                                     float_format=Constants.SUMMARY_FORMAT)
    with open(os.path.join(target, Constants.DIAGNOSTICS_FILE), "w", encoding="utf-8") as file:
        json.dump(result.diagnostics, file, indent=2, sort_keys=True)
        file.write("\n")
    if config.keepDraws:
        result.chain.toFrame().to_csv(os.path.join(target, Constants.DRAWS_FILE), index=False,
                                      float_format=Constants.DRAWS_FORMAT)


def _logEntries(result: FitResult) -> dict:
    entries = {"DIC": result.diagnostics["DIC"], "p_D": result.diagnostics["p_D"]}
    if "acceptance_rate" in result.diagnostics:
        entries["acceptance rate"] = result.diagnostics["acceptance_rate"]
    if result.diagnostics["block_move"]:
        entries["block acceptance rate"] = result.diagnostics["block_acceptance_rate"]
    for row in result.rows:
        entries[row.name] = f"mean {row.mean:.6g} | std {row.std:.6g} | if {row.ifFactor:.3g}"
    return entries


def cmdFit(config: RunConfig, statusBar: StatusBar | None = None) -> list:
    statusBar = statusBar or StatusBar(enabled=False)
    data = loadDataset(config.dataPath, config.response, config.covariates, config.intercept)
    checkCompatibility(config, data)
    prior = loadPriors(config.priorPath, data.k, data.J)
    os.makedirs(config.outDir, exist_ok=True)
    logManager = LogManager(config.outDir)
    logManager.startRun()

    results = []

    def report(result: FitResult):
        writeFitArtifacts(config, result)
        logManager.logFit(config.model, result.p, config.seed, _logEntries(result))
        statusBar.printAbove(f"• p = {Constants.COLOR_ORANGE}{result.p:g}{Fore.WHITE} | "
                             f"DIC {Constants.COLOR_ORANGE}{result.diagnostics['DIC']:.2f}{Fore.WHITE}")
        results.append(result)

    if config.workers > 1 and len(config.quantiles) > 1:
        statusBar.start(f"Fitting {len(config.quantiles)} quantiles on {config.workers} workers")
        payloads = [(config, data, prior, i) for i in range(len(config.quantiles))]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for result in pool.map(_fitWorker, payloads):
                report(result)
    else:
        for index, p in enumerate(config.quantiles):
            logger.info(f"Fitting {config.model} at p = {p:g}.")
            statusBar.start(f"p = {p:g}")
            report(fitQuantile(config, data, prior, index, statusBar.update))

    comparison = pd.DataFrame({
        "p": [r.p for r in results],
        "dic": [r.diagnostics["DIC"] for r in results],
        "p_d": [r.diagnostics["p_D"] for r in results],
        "dbar": [r.diagnostics["D_bar"] for r in results],
    }).sort_values(["dic", "p"], kind="mergesort")
    comparison.to_csv(os.path.join(config.outDir, Constants.DIC_FILE), index=False,
                      float_format=Constants.SUMMARY_FORMAT)
    statusBar.stop(f"{Constants.COLOR_ORANGE}[Finished] {Fore.WHITE}Fitted {len(results)} quantile level(s) "
                   f"into {config.outDir}.")
    return results


def cmdSimulate(study: int, n: int, seed: int, outPath: str) -> OrdinalDataset:
    if study not in STUDIES:
        raise ConfigError(f"Unknown study {study}; choose from {sorted(STUDIES)}.")
    data = simulate(STUDIES[study], n, RngState(seed))
    directory = os.path.dirname(outPath)
    if directory:
        os.makedirs(directory, exist_ok=True)
    writeDatasetCsv(data, outPath)
    return data


def _fitDirs(fitDir: str) -> list:
    if not os.path.isdir(fitDir):
        raise DataError(f"Fit directory '{fitDir}' does not exist.", {"path": fitDir})
    found = []
    for name in sorted(os.listdir(fitDir)):
        path = os.path.join(fitDir, name)
        if os.path.isfile(os.path.join(path, Constants.DIAGNOSTICS_FILE)):
            found.append(path)
    if not found:
        raise DataError(f"No fitted quantiles found in '{fitDir}'. Run 'quantord fit' first.", {"path": fitDir})
    return found


def loadFit(path: str) -> tuple:
    """Chain and diagnostics of one fitted quantile directory."""
    with open(os.path.join(path, Constants.DIAGNOSTICS_FILE), encoding="utf-8") as file:
        diagnostics = json.load(file)
    drawsPath = os.path.join(path, Constants.DRAWS_FILE)
    if not os.path.isfile(drawsPath):
        raise DataError(f"'{drawsPath}' is missing. Re-run 'quantord fit' with --keep-draws to retain the draws.",
                        {"path": drawsPath})
    frame = pd.read_csv(drawsPath, float_precision="round_trip")
    return Chain.fromFrame(frame, dict(diagnostics)), diagnostics


def cmdEffect(config: EffectConfig) -> pd.DataFrame:
    dirs = _fitDirs(config.fitDir)
    fits = [loadFit(path) for path in dirs]
    fits.sort(key=lambda fit: fit[1]["p"])

    echo = fits[0][1]["config"]
    dataPath = config.dataPath or echo["dataPath"]
    data = loadDataset(dataPath, echo["response"], echo["covariates"], echo["intercept"])

    table = {"category": np.arange(1, data.J + 1)}
    for chain, diagnostics in fits:
        spec = QuantileSpec(diagnostics["p"])
        fixedCuts = CutpointVector.fixed(diagnostics["cutpoints"]) if chain.model == "or2" else None
        table[f"p{spec.p:g}"] = covariateEffect(chain, data, spec, config.covariate, config.change, fixedCuts)

    frame = pd.DataFrame(table)
    outDir = config.outDir or config.fitDir
    os.makedirs(outDir, exist_ok=True)
    frame.to_csv(os.path.join(outDir, Constants.EFFECTS_FILE), index=False, float_format=Constants.DRAWS_FORMAT)
    return frame


def cmdSummarize(fitDir: str) -> dict:
    tables = {}
    for path in _fitDirs(fitDir):
        chain, diagnostics = loadFit(path)
        rows = summarize(chain)
        tables[diagnostics["p"]] = summaryFrame(rows)

        header = (f"| {diagnostics['model']} | p = {diagnostics['p']:g} | DIC = {diagnostics['DIC']:.2f} "
                  f"| p_D = {diagnostics['p_D']:.2f} |")
        print(f"{Constants.COLOR_ORANGE}{'=' * len(header)}{Fore.WHITE}")
        print(header)
        for row in rows:
            flag = " (degenerate)" if row.degenerate else ""
            print(f"  {row.name:<20} mean {Constants.COLOR_ORANGE}{row.mean:>10.4f}{Fore.WHITE}"
                  f"  std {row.std:>8.4f}  if {row.ifFactor:>6.2f}{flag}"
                  f"  [{row.q025:.4f}, {row.q975:.4f}]")
        observed = ", ".join(f"{v:.3f}" for v in diagnostics["observed_shares"])
        predicted = ", ".join(f"{v:.3f}" for v in diagnostics["predicted_shares"])
        print(f"  shares observed ({observed}) | predicted ({predicted})")
    return tables


def errorJson(error: QuantOrdError) -> str:
    return json.dumps(error.toDict(), sort_keys=True, default=str)
