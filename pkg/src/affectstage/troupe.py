"""The troupe of image-composing agents.

Each agent carries a signed sensitivity table over (sequence, emotional state)
pairs; recognized states drive a clamped, decaying mood which budgets how many
scene changes the agent may propose per tick.  At a fixed period agents meet
pairwise and the cheerful ones concede part of their surplus to the gloomy
ones, conserving the troupe's total mood.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .canvas import (
    Fragment,
    Perturbation,
    QualityVector,
    Scene,
    SequenceConfig,
    apply_action,
    metrics,
    render,
    utility,
)
from .seeds import derive_seed

DEFAULT_MOOD_BOUND = 10.0
DEFAULT_DECAY = 0.9
DEFAULT_BASE_BUDGET = 8

TRANSLATE_MAX = 32  # candidate translations are +-1..+-32 canvas units per axis
SCALE_FACTORS = (0.9, 1.1)
OPACITY_STEP = 0.1


class TroupeError(ValueError):
    """Raised for invalid troupe configuration or stimuli."""


@dataclass(frozen=True)
class Agent:
    """One poster-gluer: a mood, a sensitivity table, and a carried fragment."""

    id: int
    fragment: Fragment
    placement: object  # canvas.Placement snapshot; the scene holds the live one
    sensitivity: dict = field(default_factory=dict)  # (sequence id, state id) -> weight
    mood: float = 0.0


@dataclass(frozen=True)
class CompensationParams:
    """Pairwise mood-compensation tuning: period, rate, and the two mood gates."""

    period: int = 8
    kappa: float = 0.5
    theta_plus: float = 5.0
    theta_minus: float = -5.0
    gates_enabled: bool = True

    def __post_init__(self):
        if self.period < 1:
            raise TroupeError("compensation period must be >= 1")
        if not (0.0 < self.kappa <= 1.0):
            raise TroupeError("kappa must be in (0, 1]")
        if not self.theta_minus < self.theta_plus:
            raise TroupeError("theta_minus must be below theta_plus")


@dataclass(frozen=True)
class Troupe:
    agents: tuple[Agent, ...]
    states: tuple[str, ...]
    mood_bound: float = DEFAULT_MOOD_BOUND
    decay: float = DEFAULT_DECAY
    compensation: CompensationParams = CompensationParams()

    def __post_init__(self):
        ids = [a.id for a in self.agents]
        if ids != list(range(len(ids))):
            raise TroupeError("agent ids must be unique and contiguous from 0")
        if not self.mood_bound > 0:
            raise TroupeError("mood bound must be positive")
        if not (0.0 <= self.decay <= 1.0):
            raise TroupeError("mood decay must be in [0, 1]")
        for a in self.agents:
            if abs(a.mood) > self.mood_bound:
                raise TroupeError(f"agent {a.id} mood {a.mood} outside bound")
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "states", tuple(self.states))

    def moods(self) -> list[float]:
        return [a.mood for a in self.agents]


@dataclass
class Environment:
    """What every agent can see: recognized state, cue, sequence values, observer report."""

    recognized_state: str | None = None
    cue_sequence: str = ""
    cue_position: int = 0
    sequence_values: dict[str, float] = field(default_factory=dict)
    observer_report: QualityVector | None = None


def _clamp(value: float, bound: float) -> float:
    return min(bound, max(-bound, value))


def apply_stimulus(troupe: Troupe, env: Environment) -> Troupe:
    """Fold the recognized state into every agent's mood.

    mood <- clamp(decay * mood + sensitivity[(sequence, state)], -M, +M);
    agents without an entry for the pair only decay.
    """
    state = env.recognized_state
    if state is None:
        raise TroupeError("no recognized state in environment")
    if state not in troupe.states:
        raise TroupeError(f"unknown emotional state {state!r}")
    key = (env.cue_sequence, state)
    agents = tuple(
        replace(a, mood=_clamp(troupe.decay * a.mood + a.sensitivity.get(key, 0.0), troupe.mood_bound))
        for a in troupe.agents
    )
    return replace(troupe, agents=agents)


def pairing(agent_count: int, tick: int, seed: int) -> list[tuple[int, int]]:
    """Seeded random pairing for one compensation round; an odd agent idles."""
    rng = random.Random(derive_seed(seed, f"compensation:{tick}"))
    ids = list(range(agent_count))
    rng.shuffle(ids)
    return [(ids[i], ids[i + 1]) for i in range(0, agent_count - 1, 2)]


def compensation_round(troupe: Troupe, tick: int, seed: int) -> Troupe:
    """One fixed-period round of pairwise mood compensation.

    In each pair the higher mood concedes delta = kappa * (gap / 2) to the
    lower one, but only when the donor is above theta_plus and the receiver
    below theta_minus (unless gates are disabled).  The troupe's total mood is
    conserved and no transfer widens a pair's gap.
    """
    moods = troupe.moods()
    params = troupe.compensation
    for i, j in pairing(len(moods), tick, seed):
        hi, lo = (i, j) if moods[i] >= moods[j] else (j, i)
        if params.gates_enabled and not (
            moods[hi] > params.theta_plus and moods[lo] < params.theta_minus
        ):
            continue
        delta = params.kappa * (moods[hi] - moods[lo]) / 2.0
        moods[hi] -= delta
        moods[lo] += delta
    agents = tuple(replace(a, mood=m) for a, m in zip(troupe.agents, moods))
    return replace(troupe, agents=agents)


def willingness(agent: Agent, base_budget: int, mood_bound: float = DEFAULT_MOOD_BOUND) -> int:
    """Action budget for one tick: floor(base * logistic(3 * mood / bound))."""
    if base_budget < 1:
        raise TroupeError("base budget must be >= 1")
    x = 3.0 * agent.mood / mood_bound
    return int(math.floor(base_budget / (1.0 + math.exp(-x))))


def draw_perturbation(rng: random.Random) -> Perturbation:
    """One candidate move from the agent's stream: translate, rescale, or fade."""
    kind = rng.randrange(3)
    if kind == 0:
        dx = rng.choice((-1, 1)) * rng.randint(1, TRANSLATE_MAX)
        dy = rng.choice((-1, 1)) * rng.randint(1, TRANSLATE_MAX)
        return Perturbation.translate(dx, dy)
    if kind == 1:
        return Perturbation.rescale(rng.choice(SCALE_FACTORS))
    return Perturbation.fade(rng.choice((-OPACITY_STEP, OPACITY_STEP)))


def agent_step(
    agent: Agent,
    scene: Scene,
    seq_cfg: SequenceConfig,
    rng: random.Random,
    base_budget: int = DEFAULT_BASE_BUDGET,
    mood_bound: float = DEFAULT_MOOD_BOUND,
) -> tuple[Agent, Scene, bool]:
    """Greedy hill-climbing step: accept the first utility-improving candidate.

    Draws up to ``willingness`` perturbations of the agent's own placement from
    its dedicated stream; the shared utility never decreases.
    """
    current = scene.placement_of(agent.id)  # raises on unknown agent
    budget = willingness(agent, base_budget, mood_bound)
    if budget == 0:
        return agent, scene, False
    base_utility = utility(scene, seq_cfg)
    for _ in range(budget):
        candidate = apply_action(scene, agent.id, draw_perturbation(rng))
        if utility(candidate, seq_cfg) > base_utility:
            return replace(agent, placement=candidate.placement_of(agent.id)), candidate, True
    return replace(agent, placement=current), scene, False


def observer_report(scene: Scene, seq_cfg: SequenceConfig) -> QualityVector:
    """The observer agent's read of the composed image, published to the environment."""
    return metrics(render(scene), seq_cfg)
