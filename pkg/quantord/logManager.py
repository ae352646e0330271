import logging
import os
from colorama import Fore, Style
from .constants import Constants

_ROOT = "quantord"

_LEVEL_COLORS = {
    logging.DEBUG: Fore.WHITE,
    logging.INFO: Fore.WHITE,
    logging.WARNING: Constants.COLOR_ORANGE,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED,
}


class ColorFormatter(logging.Formatter):
    def format(self, record):
        color = _LEVEL_COLORS.get(record.levelno, Fore.WHITE)
        tag = record.levelname.capitalize()
        return f"{color}[{tag}]{Fore.WHITE} {record.getMessage()}{Style.RESET_ALL}"


def getLogger(name: str) -> logging.Logger:
    if name != _ROOT and not name.startswith(_ROOT + "."):
        name = f"{_ROOT}.{name}"
    return logging.getLogger(name)


def configureLogging(verbose: bool = True):
    root = logging.getLogger(_ROOT)
    for handler in list(root.handlers):
        if getattr(handler, "_quantord", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler()
    handler.setFormatter(ColorFormatter())
    handler._quantord = True
    root.addHandler(handler)
    root.setLevel(logging.INFO if verbose else logging.WARNING)
    root.propagate = False
    return root


class LogManager:
    """Appends a readable record of each fitted quantile to the run log."""

    def __init__(self, outDir: str, filename: str = Constants.RUN_LOG):
        self.outDir = outDir
        self.path = os.path.join(outDir, filename)

    def startRun(self):
        os.makedirs(self.outDir, exist_ok=True)
        open(self.path, "w", encoding="utf-8").close()

    def logFit(self, model: str, p: float, seed: int, entries: dict):
        os.makedirs(self.outDir, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as file:
            logHeader = f"| {model} | p = {p:g} | seed = {seed} |"
            logSpacer = "=" * len(logHeader)
            file.writelines(f"{logSpacer}\n{logHeader}\n")

            for key, value in entries.items():
                if isinstance(value, float):
                    value = f"{value:.6g}"
                file.writelines(f"{key}: {value}\n")
