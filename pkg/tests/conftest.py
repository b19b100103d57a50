from __future__ import annotations

import pytest

from traceplay import build_index

from oracles import generate_reference_trace


@pytest.fixture(scope="session")
def reference_trace(tmp_path_factory):
    """Desk-scale reference workload: 40 nodes, ~10k events, AODV tails."""
    path = tmp_path_factory.mktemp("traces") / "reference.tr"
    generate_reference_trace(path)
    return path


@pytest.fixture(scope="session")
def reference_index(reference_trace):
    return build_index(reference_trace)


@pytest.fixture(scope="session")
def small_trace(tmp_path_factory):
    """A 300-event variant for the cheaper replay comparisons."""
    path = tmp_path_factory.mktemp("traces") / "small.tr"
    generate_reference_trace(path, node_count=12, event_count=300, seed=99)
    return path
