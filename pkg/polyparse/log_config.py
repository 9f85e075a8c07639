"""
Log Configuration - Clean Console Logging for polyparse
=======================================================

Configures one readable logging setup for every command:
- Compact coloured console lines on stderr (stdout stays free for CoNLL-U output)
- Short aliases for the package modules
- Collapses bursts of identical per-sentence warnings
- Optional plain-text log file (the training log)

Usage:
    from polyparse.log_config import setup_clean_logging
    setup_clean_logging()
"""

import sys
import logging
from datetime import datetime
from typing import Dict, List, Optional, Tuple

# ============================================
# Enable ANSI colours on Windows
# ============================================
if sys.platform == "win32":
    try:
        import ctypes
        kernel32 = ctypes.windll.kernel32
        kernel32.SetConsoleMode(kernel32.GetStdHandle(-11), 7)
    except Exception:
        pass


# ============================================
# ANSI colours
# ============================================
class C:
    """ANSI colour codes"""
    RESET = "\033[0m"
    BOLD = "\033[1m"
    DIM = "\033[2m"

    GRAY = "\033[90m"
    RED = "\033[91m"
    GREEN = "\033[92m"
    YELLOW = "\033[93m"
    BLUE = "\033[94m"
    WHITE = "\033[97m"


# ============================================
# Filters
# ============================================

class RepeatedWarningFilter(logging.Filter):
    """
    Collapses runs of identical warnings.

    Reading a large treebank can emit the same complaint (say, a multi-root
    sentence) hundreds of times. The first `max_repeats` copies of a message
    template pass; later copies are dropped and counted in `suppressed`.
    """

    def __init__(self, max_repeats: int = 5):
        super().__init__()
        self.max_repeats = max_repeats
        self._seen: Dict[Tuple[str, str], int] = {}
        self.suppressed = 0

    def filter(self, record: logging.LogRecord) -> bool:
        if record.levelno != logging.WARNING:
            return True

        key = (record.name, str(record.msg))
        count = self._seen.get(key, 0) + 1
        self._seen[key] = count

        if count > self.max_repeats:
            self.suppressed += 1
            return False
        if count == self.max_repeats:
            record.msg = f"{record.msg} (further identical warnings suppressed)"
        return True


# ============================================
# Clean formatter
# ============================================

class CleanFormatter(logging.Formatter):
    """
    Formatter producing short readable lines.

    Format:
        HH:MM:SS.ms LEVEL    [module] message

    Coloured by level when `use_colors` is set.
    """

    LEVEL_COLORS = {
        logging.DEBUG: C.GRAY,
        logging.INFO: C.BLUE,
        logging.WARNING: C.YELLOW,
        logging.ERROR: C.RED,
        logging.CRITICAL: C.RED + C.BOLD,
    }

    MODULE_ALIASES = {
        "polyparse.training.trainer": "Train",
        "polyparse.training.evaluation": "Eval",
        "polyparse.treebank": "Treebank",
        "polyparse.lexicon": "Lexicon",
        "polyparse.parsing": "Parser",
        "polyparse.storage": "Store",
        "polyparse.cli": "CLI",
    }

    def __init__(self, use_colors: bool = True, show_module: bool = True):
        super().__init__()
        self.use_colors = use_colors
        self.show_module = show_module

    def format(self, record: logging.LogRecord) -> str:
        now = datetime.fromtimestamp(record.created)
        timestamp = now.strftime("%H:%M:%S") + f".{now.microsecond // 1000:03d}"

        level_name = record.levelname[:8].ljust(8)

        module = record.name
        for full_name, alias in self.MODULE_ALIASES.items():
            if module.startswith(full_name):
                module = alias
                break

        message = record.getMessage()
        if record.exc_info:
            message = f"{message}\n{self.formatException(record.exc_info)}"

        if self.use_colors:
            level_color = self.LEVEL_COLORS.get(record.levelno, C.WHITE)
            parts = [
                f"{C.DIM}{timestamp}{C.RESET}",
                f"{level_color}{level_name}{C.RESET}",
            ]
            if self.show_module and module:
                parts.append(f"{C.DIM}[{module}]{C.RESET}")
        else:
            parts = [timestamp, level_name]
            if self.show_module and module:
                parts.append(f"[{module}]")
        parts.append(message)

        return " ".join(parts)


# ============================================
# Handler
# ============================================

class SmartStreamHandler(logging.StreamHandler):
    """
    Stream handler that:
    - Uses the clean formatter
    - Collapses repeated warnings
    - Writes to stderr so CoNLL-U on stdout stays clean
    """

    def __init__(self, use_colors: Optional[bool] = None):
        super().__init__(stream=sys.stderr)
        if use_colors is None:
            use_colors = hasattr(sys.stderr, "isatty") and sys.stderr.isatty()
        self.setFormatter(CleanFormatter(use_colors=use_colors))
        self.addFilter(RepeatedWarningFilter())


# ============================================
# Main setup
# ============================================

def setup_clean_logging(
    level: int = logging.INFO,
    log_file: Optional[str] = None,
    silence_libraries: Optional[List[str]] = None,
) -> logging.Logger:
    """
    Configure logging for a polyparse run.

    Args:
        level: Minimum level (default: INFO)
        log_file: Also write plain lines to this file (e.g. the training log)
        silence_libraries: Loggers raised to WARNING

    Returns:
        The configured root logger
    """
    if silence_libraries is None:
        silence_libraries = ["numpy", "asyncio"]

    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    smart_handler = SmartStreamHandler()
    smart_handler.setLevel(level)
    root_logger.addHandler(smart_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(CleanFormatter(use_colors=False))
        file_handler.setLevel(level)
        root_logger.addHandler(file_handler)

    for lib in silence_libraries:
        logging.getLogger(lib).setLevel(logging.WARNING)

    return root_logger
