"""
Shared fixtures.
"""
import pytest
from hypothesis import settings

from src.graph import FlowGraph, load_graph

from .strategies import fixture_file

settings.register_profile("seeded", derandomize=True)
settings.load_profile("seeded")


@pytest.fixture
def verification_graph() -> FlowGraph:
    """Divisor-counting trace with a self-verification step."""
    return load_graph(fixture_file("verification_trace"))


@pytest.fixture
def dangling_graph() -> FlowGraph:
    """Chain to the conclusion plus one reflection with no path to it."""
    return load_graph(fixture_file("chain_with_dangling"))


@pytest.fixture
def diamond_graph() -> FlowGraph:
    return load_graph(fixture_file("diamond"))
