"""
Tabular Q-learning on one layout, with or without shaped rewards, plus the
learning-curve outputs used to compare training arms.
"""

import concurrent.futures
import csv
import io
import logging
import statistics
import threading
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from django.db import connection

from keyroom.domain import Action, GridLayout
from keyroom.services.engine import transition
from keyroom.services.layout import generate_layout, initial_state
from shaper.domain import (
    LAST_EPISODES_WINDOW,
    EpisodeRecord,
    LearningCurve,
    QLearningParams,
    QTable,
    ShapingConfig,
)
from shaper.services.shaping import Shaper

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("episode", "return", "steps", "success", "arm", "seed")
DEFAULT_EPISODES = 500


def epsilon_at(episode: int, episodes: int, params: QLearningParams) -> float:
    """Linear decay from ``epsilon_start`` to ``epsilon_end`` over the first ``decay_fraction`` of episodes."""
    decay_episodes = max(1.0, params.decay_fraction * episodes)
    fraction = min(1.0, episode / decay_episodes)
    return params.epsilon_start + (params.epsilon_end - params.epsilon_start) * fraction


def q_learn(
    layout: Union[GridLayout, int],
    config: Optional[ShapingConfig] = None,
    params: QLearningParams = QLearningParams(),
    episodes: int = DEFAULT_EPISODES,
    run_seed: int = 0,
    *,
    arm: Optional[str] = None,
) -> LearningCurve:
    """
    One-step Q-learning with epsilon-greedy exploration. Rewards are shaped by
    ``config`` or, when it is ``None``, the sparse task reward. Greedy ties are
    broken at random. Identical seeds give identical curves.
    """
    if episodes < 1:
        raise ValueError("episodes must be at least 1")
    if isinstance(layout, int):
        layout = generate_layout(layout)
    arm = arm or ("sparse" if config is None else (config.source.name if config.source else "oracle"))
    rng = np.random.default_rng(run_seed)
    table = QTable(alpha=params.alpha)
    shaper = Shaper(config) if config is not None else None
    n_actions = len(Action)

    records = []
    for episode in range(episodes):
        epsilon = epsilon_at(episode, episodes, params)
        if shaper is not None:
            shaper.reset()
        state = initial_state(layout)
        total = 0.0
        steps = 0
        while not state.terminated and steps < params.step_cap:
            signature = state.signature
            if rng.random() < epsilon:
                action = int(rng.integers(n_actions))
            else:
                action = table.greedy(signature, rng)
            t = transition(state, action)
            reward = shaper(t) if shaper is not None else float(t.task_reward)
            future = 0.0 if t.after.terminated else params.gamma * table.best_value(t.after.signature)
            table.update(signature, action, reward + future)
            total += reward
            steps += 1
            state = t.after
        records.append(EpisodeRecord(episode=episode + 1, episode_return=total, steps=steps,
                                     success=state.terminated))

    curve = LearningCurve(arm=arm, seed=run_seed, records=tuple(records), q_table=table)
    logger.info(
        f"[QLearning] {arm} seed {run_seed}: first success at episode {curve.episodes_to_first_success}, "
        f"last-{LAST_EPISODES_WINDOW} success rate {curve.success_rate():.2f}"
    )
    return curve


@dataclass(frozen=True)
class TrainingJob:
    arm: str
    layout: GridLayout
    config: Optional[ShapingConfig]
    seed: int
    episodes: int = DEFAULT_EPISODES
    params: QLearningParams = QLearningParams()


def run_jobs(jobs, *, parallel: int = 1) -> list:
    """Runs independent training jobs, up to ``parallel`` at a time. Curves come back ordered by arm and seed."""
    jobs = list(jobs)

    def work(job: TrainingJob) -> LearningCurve:
        try:
            return q_learn(job.layout, job.config, job.params, job.episodes, job.seed, arm=job.arm)
        finally:
            if threading.current_thread() is not threading.main_thread():
                connection.close()

    if parallel <= 1:
        curves = [work(job) for job in jobs]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=parallel) as executor:
            curves = list(executor.map(work, jobs))
    return sorted(curves, key=lambda c: (c.arm, c.seed))


def curves_to_csv(curves) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for curve in curves:
        for record in curve.records:
            writer.writerow([record.episode, repr(record.episode_return), record.steps,
                             int(record.success), curve.arm, curve.seed])
    return buffer.getvalue()


def summarize_curves(curves, window: int = LAST_EPISODES_WINDOW) -> dict:
    """
    Per arm: median episodes-to-first-success (a run that never succeeds
    counts as one episode past its end) and median success rate over the
    last ``window`` episodes.
    """
    by_arm = {}
    for curve in curves:
        by_arm.setdefault(curve.arm, []).append(curve)
    summary = {}
    for arm, group in sorted(by_arm.items()):
        firsts = [
            c.episodes_to_first_success if c.episodes_to_first_success is not None else len(c.records) + 1
            for c in group
        ]
        rates = [c.success_rate(window) for c in group]
        summary[arm] = {
            "runs": len(group),
            "seeds": sorted(c.seed for c in group),
            "median_episodes_to_first_success": statistics.median(firsts),
            "median_success_rate_last": statistics.median(rates),
            "window": window,
        }
    return summary
