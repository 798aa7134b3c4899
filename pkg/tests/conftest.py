from __future__ import annotations

import numpy as np
import pytest

from jordansweep import ClosedPolyline, EnginePolicy, Order, koch_generate, run_sweep
from jordansweep.oracle import random_simple_polygon

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
C_SHAPE = [(0, 0), (3, 0), (3, 3), (0, 3), (0, 2), (2, 2), (2, 1), (0, 1)]
TRIANGLE = [(0, 0), (2, 0), (1, 2)]
STAIRCASE = [(0, 0), (3, 0), (3, 1), (2, 1), (2, 2), (1, 2), (1, 3), (0, 3)]
COMB = [(0, 0), (7, 0), (7, 3), (6, 3), (6, 1), (5, 1), (5, 3), (4, 3), (4, 1), (3, 1),
        (3, 3), (2, 3), (2, 1), (1, 1), (1, 3), (0, 3)]
SPIRAL = [(0, 0), (5, 0), (5, 3), (1, 3), (1, 4), (5, 4), (5, 5), (0, 5), (0, 2), (4, 2), (4, 1), (0, 1)]

NAMED_CURVES = {
    "square": SQUARE,
    "c_shape": C_SHAPE,
    "triangle": TRIANGLE,
    "staircase": STAIRCASE,
    "comb": COMB,
    "spiral": SPIRAL,
}


def named_curve(name: str) -> ClosedPolyline:
    if name.startswith("koch"):
        return koch_generate(int(name[4:]))
    return ClosedPolyline(NAMED_CURVES[name])


def random_polygons(count: int, seed: int = 2024) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [random_simple_polygon(rng) for _ in range(count)]


@pytest.fixture
def square() -> ClosedPolyline:
    return ClosedPolyline(SQUARE)


@pytest.fixture
def c_shape() -> ClosedPolyline:
    return ClosedPolyline(C_SHAPE)


@pytest.fixture
def triangle() -> ClosedPolyline:
    return ClosedPolyline(TRIANGLE)


@pytest.fixture(scope="session")
def state_cache():
    cache: dict = {}

    def get(name: str, order: Order = Order.LARGEST_FIRST):
        key = (name, order)
        if key not in cache:
            cache[key] = run_sweep(named_curve(name), None, EnginePolicy(order=order))
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    order = sorted(results, key=lambda k: (int(k.rstrip("s")), k))
    for key in order:
        terminalreporter.write_line(results[key])
