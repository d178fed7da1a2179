import logging
import sys

from ..core.config import EngineConfig

_RED = "\033[31m"
_RESET = "\033[0m"


class _ColorFormatter(logging.Formatter):
    def format(self, record):
        text = super().format(record)
        if record.levelno >= logging.WARNING:
            return f"{_RED}{text}{_RESET}"
        return text


def get_logger(name: str) -> logging.Logger:
    """Return a module logger; handlers are attached once on the package root"""
    root = logging.getLogger("app")
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        formatter_cls = _ColorFormatter if EngineConfig.COLOR else logging.Formatter
        handler.setFormatter(formatter_cls("%(message)s"))
        root.addHandler(handler)
        root.setLevel(logging.WARNING)
        root.propagate = False
    return logging.getLogger(name)


def set_verbosity(verbose: bool):
    logging.getLogger("app").setLevel(logging.INFO if verbose else logging.WARNING)
