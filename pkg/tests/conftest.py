"""Shared generators for fuzz and property tests."""

from __future__ import annotations

import random

import pytest

from railyard.diagram import Diagram, NonTerminal, Polarity, Sequence, Stack, Terminal
from railyard.pipeline import LayoutParams

LABELS = ["a", "b", "c", "id", "expr", "x1", "if", "CREATE", ",", "value-name"]


def random_diagram(rng: random.Random, budget: int) -> tuple[Diagram, int]:
    """A random diagram using at most ``budget`` constructors (at least 1)."""
    if budget <= 1:
        kind = rng.choice(["t", "n"])
    else:
        kind = rng.choices(["t", "n", "seq", "stack"], weights=[3, 2, 4, 3])[0]
    if kind == "t":
        return Terminal(rng.choice(LABELS)), 1
    if kind == "n":
        return NonTerminal(rng.choice(LABELS)), 1
    if kind == "stack":
        top, used_top = random_diagram(rng, (budget - 1) // 2)
        bottom, used_bottom = random_diagram(rng, budget - 1 - used_top)
        pol = rng.choice([Polarity.POSITIVE, Polarity.NEGATIVE])
        return Stack(pol, top, bottom), 1 + used_top + used_bottom
    n_children = rng.randint(0, min(6, budget - 1))
    children = []
    used = 1
    for _ in range(n_children):
        if used >= budget:
            break
        child, u = random_diagram(rng, budget - used)
        children.append(child)
        used += u
    return Sequence(tuple(children)), used


def random_params(rng: random.Random, min_content: float) -> LayoutParams:
    wrap_mode = rng.choice(["local", "local", "local", "global"])
    return LayoutParams(
        target_width=min_content + rng.random() * (min_content * 1.5 + 300.0),
        wrap_mode=wrap_mode,
        align_items=rng.choice(["top", "center", "bottom", "baseline"]),
        justify_content=rng.choice(
            ["start", "end", "center", "space-between", "space-around", "space-evenly"]
        ),
        flex_absorb=rng.random(),
        gap=rng.choice([0.0, 0.0, 4.0, 8.0]),
        global_budget=30_000,
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
