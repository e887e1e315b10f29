"""Exogenous mechanisms layered on the engine.

Two interventions exist: probabilistic self-interest (an actor attracts to its
preserved initial position instead of interacting) and a one-time shock that
shifts the whole population, applied one actor per step. The engine inlines
both in its compiled step; the functions here are the standalone single-actor
operations, and the test suite pins exact agreement between the two paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Population


@dataclass
class ShockState:
    """Progress of a shock being spread over N consecutive steps."""

    strength: np.ndarray  # (D,) shift per coordinate, in [0, 1]
    start_step: int
    next_actor: int = 0  # cursor: actors [0, next_actor) already shifted

    def complete(self, n_actors: int) -> bool:
        return self.next_actor >= n_actors


def self_interest_move(active, preferred, responsiveness: float) -> np.ndarray:
    """Move a fraction R of the way from the current to the preferred position.

    The interaction and attraction-repulsion rules are skipped on such a step.
    """
    active = np.asarray(active, dtype=np.float64).ravel()
    preferred = np.asarray(preferred, dtype=np.float64).ravel()
    moved = active + responsiveness * (preferred - active)
    return np.minimum(1.0, np.maximum(0.0, moved))


def shock_step(pop: Population, shock: ShockState) -> Population:
    """Shift the actor at the shock cursor by the shock strength, clamped.

    Exactly one actor changes; the cursor advances. Interaction, AR, and
    self-interest are all skipped during shock steps, which still consume the
    global step budget.
    """
    if shock.complete(pop.n_actors):
        raise ValueError("shock already applied to every actor")
    i = shock.next_actor
    shifted = pop.positions[i] + shock.strength
    pop.positions[i] = np.minimum(1.0, np.maximum(0.0, shifted))
    shock.next_actor += 1
    return pop
