"""Built-in litmus programs.

Each ``*.lit`` file in this directory is a corpus entry named after the file.
Variants swap an abstract object for an implementation; their annotations are
dropped because they speak about the abstract object's operations.
"""

from __future__ import annotations

import difflib
from importlib import resources
from pathlib import Path

from ..core import UsageError
from ..lang.ast import ProgramSpec
from ..lang.parser import parse_program

VARIANTS = {
    "seqlock-client": ("lock-client", {"l": "seqlock"}),
    "seqlock-rlx-client": ("lock-client", {"l": "seqlock_rlx"}),
    "ticketlock-client": ("lock-client", {"l": "ticketlock"}),
    "treiber-client": ("mp-sync", {"s": "treiber"}),
    "treiber": ("mp-sync", {"s": "treiber"}),
    "treiber-two-push": ("stack-two-push", {"s": "treiber"}),
}

# Default loop bound per entry where the generic default is not the intended one.
DEFAULT_BOUNDS = {"mp-unsync": 2, "mp-sync": 2, "treiber-client": 3, "treiber": 3}


def _files() -> dict[str, str]:
    root = resources.files(__package__)
    return {p.name[:-4]: p.name for p in root.iterdir() if p.name.endswith(".lit")}


def names() -> list[str]:
    return sorted(set(_files()) | set(VARIANTS))


def text(name: str) -> str:
    files = _files()
    if name not in files:
        raise UsageError(f"no corpus file {name!r}")
    return resources.files(__package__).joinpath(files[name]).read_text()


def load(name: str) -> ProgramSpec:
    """Parse a corpus entry, a variant, or a path to a ``.lit`` file."""
    if name in VARIANTS:
        base, kinds = VARIANTS[name]
        spec = load(base).with_objects(kinds)
        return spec.replace(annotations=(), init_annotation=None, invariants=(), lets=(), name=name)
    if name in _files():
        return parse_program(text(name), name)
    p = Path(name)
    if p.is_file():
        return parse_program(p.read_text(), p.stem)
    close = difflib.get_close_matches(name, names(), n=3)
    hint = f"; did you mean {' or '.join(close)}?" if close else "; see `rarsim list`"
    raise UsageError(f"unknown program {name!r}{hint}")


def describe(name: str) -> str:
    """One-line description: the leading comment of the file, or the variant's substitution."""
    if name in VARIANTS:
        base, kinds = VARIANTS[name]
        subs = ", ".join(f"{o} as {k}" for o, k in sorted(kinds.items()))
        return f"{base} with {subs}"
    for line in text(name).splitlines():
        if line.startswith("#"):
            return line.lstrip("# ").strip()
    return ""


def default_bound(name: str) -> int:
    from ..explorer import Bounds
    return DEFAULT_BOUNDS.get(name, Bounds().loop_bound)


def clients() -> list[str]:
    """Every corpus entry that is a closed client program."""
    return names()
