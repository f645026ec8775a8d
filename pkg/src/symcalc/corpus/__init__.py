"""Example programs shipped with the package."""
from __future__ import annotations

from importlib import resources

from ..core import Program


def names() -> list[str]:
    return sorted(
        p.name.removesuffix(".sym")
        for p in resources.files(__name__).iterdir()
        if p.name.endswith(".sym")
    )


def source(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.sym").read_text(encoding="utf-8")


def load(name: str) -> Program:
    from ..parser import parse_program

    return parse_program(source(name), filename=f"{name}.sym")
