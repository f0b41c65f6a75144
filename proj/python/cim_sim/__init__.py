"""Competitive influence simulation on subjective-logic opinions."""

from ._cim import (
    Opinion,
    discount,
    dissonance,
    from_evidence,
    fuse,
    graph_size,
    project,
    report,
    run_experiment,
    schemes,
    simulate,
    strategies,
    train,
    trust,
    vacuity_maximize,
)

__all__ = [
    "Opinion",
    "discount",
    "dissonance",
    "from_evidence",
    "fuse",
    "graph_size",
    "project",
    "report",
    "run_experiment",
    "schemes",
    "simulate",
    "strategies",
    "train",
    "trust",
    "vacuity_maximize",
]
