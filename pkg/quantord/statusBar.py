import sys
import time
import threading
import itertools
import atexit
import re
from colorama import Fore, Style, just_fix_windows_console
from .constants import Constants

_ANSI_RE = re.compile(r'\x1b\[[0-9;?]*[ -/]*[@-~]')


def _visible_len(s: str) -> int:
    return len(_ANSI_RE.sub('', s))


def formatProgress(sweep: int, total: int, burnIn: int, width: int = 24) -> str:
    total = max(total, 1)
    filled = int(width * min(sweep, total) / total)
    phase = "burn-in" if sweep <= burnIn else "sampling"
    gauge = "#" * filled + "." * (width - filled)
    return f"[{gauge}] sweep {sweep}/{total} ({phase})"


class StatusBar:
    """Spinner line showing the label and sweep gauge of the running chain."""

    def __init__(self, enabled=None, frames="⠋⠙⠹⠸⠼⠴⠦⠧⠇⠏", interval=0.1, stream=None):
        self.stream = stream or sys.stdout
        if enabled is None:
            enabled = hasattr(self.stream, "isatty") and self.stream.isatty()
        self.enabled = enabled
        self.frames = frames
        self.interval = interval
        self._label = ""
        self._progress = ""
        self._stop = threading.Event()
        self._lock = threading.Lock()
        self._thread = None
        self._hidden_cursor = False
        self._prev_vis_len = 0
        if self.enabled:
            just_fix_windows_console()
            atexit.register(self._show_cursor)

    def _write(self, text):
        self.stream.write(text)
        self.stream.flush()

    def _hide_cursor(self):
        if not self._hidden_cursor:
            self._write("\033[?25l")
            self._hidden_cursor = True

    def _show_cursor(self):
        if self._hidden_cursor:
            self._write("\033[?25h")
            self._hidden_cursor = False

    def _erase_line(self):
        self._write("\r\033[2K")
        self._prev_vis_len = 0

    def renderLine(self, frame: str) -> str:
        text = f"{self._label} {self._progress}".strip()
        return f"{Constants.COLOR_ORANGE}\033[1m{frame}\033[0m{Fore.WHITE} {text}{Style.RESET_ALL}"

    def start(self, label=""):
        with self._lock:
            self._label = label
            self._progress = ""
        if not self.enabled or (self._thread and self._thread.is_alive()):
            return
        self._stop.clear()
        self._hide_cursor()
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    def _loop(self):
        for frame in itertools.cycle(self.frames):
            if self._stop.is_set():
                break
            with self._lock:
                line = self.renderLine(frame)
            visLen = _visible_len(line)
            padding = " " * max(self._prev_vis_len - visLen, 0)
            self._write("\r" + line + padding)
            self._prev_vis_len = visLen
            time.sleep(self.interval)

    def update(self, sweep: int, total: int, burnIn: int):
        """Progress callback handed to the samplers."""
        with self._lock:
            self._progress = formatProgress(sweep, total, burnIn)

    def printAbove(self, msg):
        if self.enabled:
            self._erase_line()
        print(msg, file=self.stream)

    def stop(self, finalText=None):
        if self._thread and self._thread.is_alive():
            self._stop.set()
            self._thread.join(timeout=0.5)
        self._thread = None
        if self.enabled:
            self._erase_line()
            self._show_cursor()
        if finalText is not None:
            print(finalText, file=self.stream)
