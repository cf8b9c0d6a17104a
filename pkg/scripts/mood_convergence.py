#!/usr/bin/env python3
"""Experiment: how fast does pairwise mood compensation average the troupe?

Sweeps kappa with gates disabled and prints the rounds needed for the mood
variance to fall below 1e-6 of its initial value.
"""

import sys

import numpy as np

from affectstage.canvas import Fragment, Placement
from affectstage.troupe import Agent, CompensationParams, Troupe, compensation_round


def rounds_to_converge(n_agents, kappa, seed, ratio=1e-6, cap=20_000):
    rng = np.random.default_rng(seed)
    frag = Fragment(id="f", spec={"kind": "solid", "color": [1, 1, 1, 1], "size": [2, 2]})
    agents = tuple(
        Agent(id=i, fragment=frag, placement=Placement(0, 0), mood=float(m))
        for i, m in enumerate(rng.uniform(-10, 10, n_agents))
    )
    troupe = Troupe(
        agents=agents,
        states=("a", "b"),
        compensation=CompensationParams(kappa=kappa, gates_enabled=False),
    )
    v0 = float(np.var(troupe.moods()))
    for tick in range(cap):
        troupe = compensation_round(troupe, tick=tick, seed=seed)
        if float(np.var(troupe.moods())) < ratio * v0:
            return tick + 1
    return None


def main() -> int:
    n_agents = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    print(f"agents={n_agents}, gates disabled, variance target 1e-6 of initial")
    print(f"{'kappa':>6} {'median rounds':>14} {'min':>5} {'max':>5}")
    for kappa in (0.1, 0.25, 0.5, 0.75, 1.0):
        counts = [rounds_to_converge(n_agents, kappa, seed) for seed in range(20)]
        counts = [c for c in counts if c is not None]
        print(
            f"{kappa:>6.2f} {int(np.median(counts)):>14} {min(counts):>5} {max(counts):>5}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
