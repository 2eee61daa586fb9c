import logging
import os

_FORMAT = "[%(name)s] %(asctime)s: %(message)s"
_DATEFMT = "%Y-%m-%d %H:%M:%S"
_ROOT = "momentforge"


def _configure_root():
    root = logging.getLogger(_ROOT)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT, datefmt=_DATEFMT))
        root.addHandler(handler)
        root.propagate = False
        level = os.environ.get("MOMENTFORGE_LOG_LEVEL", "WARNING").upper()
        root.setLevel(getattr(logging, level, logging.WARNING))
    return root


def get_logger(name):
    """Logger below the momentforge namespace, e.g. get_logger("hankel")"""
    _configure_root()
    if name.startswith(_ROOT):
        return logging.getLogger(name)
    return logging.getLogger(f"{_ROOT}.{name}")


def set_verbosity(count):
    """Map a -v count onto the package log level"""
    root = _configure_root()
    if count >= 2:
        root.setLevel(logging.DEBUG)
    elif count == 1:
        root.setLevel(logging.INFO)
