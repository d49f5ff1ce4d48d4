"""Bundled example models."""

from importlib import resources

from ..dsl import parse_model

NAMES = ("alice-bob", "fig12a", "fig12b", "fig13a", "fig13b", "texting",
         "uber-a", "uber-b", "uber-c")


def path(name: str):
    return resources.files(__name__) / f"{name}.scm"


def source(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"no corpus model named {name!r}")
    return path(name).read_text(encoding="utf-8")


def load(name: str):
    return parse_model(source(name), f"{name}.scm")
