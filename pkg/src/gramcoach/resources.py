"""Access to bundled data files (toy grammars, suites, treebank)."""

from importlib import resources

from .errors import InputError

BUNDLED = {
    "toy": "data/toy.tdl",
    "toy-underconstrained": "data/toy_underconstrained.tdl",
}

BUNDLED_SUITES = {
    "grammatical": "data/suites/grammatical.items",
    "learner": "data/suites/learner.items",
    "ambiguity": "data/suites/ambiguity.items",
}

BUNDLED_TREEBANK = "data/mini_treebank.tsv"


def read_data(relpath):
    return (resources.files("gramcoach") / relpath).read_text(encoding="utf-8")


def load_bundled_or_path(name):
    """Resolve a --grammar argument: a bundled name or a file path."""
    if name in BUNDLED:
        return read_data(BUNDLED[name])
    try:
        with open(name, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise InputError(f"cannot read grammar {name!r}: {exc}") from exc


def load_suite_or_path(name):
    if name in BUNDLED_SUITES:
        return read_data(BUNDLED_SUITES[name])
    try:
        with open(name, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise InputError(f"cannot read suite {name!r}: {exc}") from exc


def load_treebank_or_path(name):
    if name in ("mini", "bundled"):
        return read_data(BUNDLED_TREEBANK)
    try:
        with open(name, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise InputError(f"cannot read treebank {name!r}: {exc}") from exc
