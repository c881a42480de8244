"""Estimator-style solver classes: construct with hyperparameters, call
``fit(instance)``, read ``best_schedule_`` / ``best_makespan_``.

`get_params` / `set_params` follow the scikit-learn convention so solvers
compose with grid-search-style tooling; parameters are exactly the
constructor keyword arguments.
"""

from __future__ import annotations

import dataclasses
import inspect

from . import baselines
from .division import SplitStrategy, solve_divided
from .instance import Instance
from .qlearning import LearnerConfig, greedy_rollout, train
from .schedule import Schedule, validate_schedule


class NotFittedError(RuntimeError, AttributeError):
    pass


class BaseSolver:
    """Shared parameter handling and fit bookkeeping."""

    def get_params(self) -> dict:
        names = [
            p.name
            for p in inspect.signature(type(self).__init__).parameters.values()
            if p.name != "self" and p.kind is not p.VAR_KEYWORD
        ]
        return {name: getattr(self, name) for name in names}

    def set_params(self, **params) -> "BaseSolver":
        valid = self.get_params()
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"unknown parameter {name!r} for {type(self).__name__}"
                )
            setattr(self, name, value)
        return self

    def __getattr__(self, name: str):
        # Estimated attributes use a trailing underscore and only exist
        # after fit(); surface a clearer error before then.
        if name.endswith("_") and not name.endswith("__"):
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        raise AttributeError(name)

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    @staticmethod
    def _check_instance(inst) -> Instance:
        if not isinstance(inst, Instance):
            raise TypeError(f"expected Instance, got {type(inst).__name__}")
        return inst

    def _finish(self, schedule: Schedule, inst: Instance) -> "BaseSolver":
        violations = validate_schedule(inst, schedule)
        if violations:  # solver bug guard; never expected to trigger
            raise RuntimeError(f"solver produced invalid schedule: {violations}")
        self.best_schedule_ = schedule
        self.best_makespan_ = schedule.makespan
        return self

    @property
    def is_fitted(self) -> bool:
        return hasattr(self, "best_schedule_")

    def fit(self, inst: Instance) -> "BaseSolver":
        raise NotImplementedError

    def predict(self, inst: Instance) -> Schedule:
        """Schedule for `inst`: the fitted result for the training instance."""
        if not self.is_fitted:
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        return self.best_schedule_


class QLearningSolver(BaseSolver):
    """Tabular Q-learning, by default heuristic-guided (backward-pass
    prepopulation after every episode)."""

    def __init__(self, alpha: float = 0.1, gamma: float = 1.0,
                 epsilon_start: float = 1.0, epsilon_min: float = 0.05,
                 epsilon_decay: float = 0.999, episodes: int = 10_000,
                 test_interval: int = 100, seed: int = 0,
                 prepopulate: bool = True,
                 include_immediate_reward: bool = False,
                 convergence_patience: int = 20,
                 stop_on_convergence: bool = False,
                 time_budget: float | None = None):
        self.alpha = alpha
        self.gamma = gamma
        self.epsilon_start = epsilon_start
        self.epsilon_min = epsilon_min
        self.epsilon_decay = epsilon_decay
        self.episodes = episodes
        self.test_interval = test_interval
        self.seed = seed
        self.prepopulate = prepopulate
        self.include_immediate_reward = include_immediate_reward
        self.convergence_patience = convergence_patience
        self.stop_on_convergence = stop_on_convergence
        self.time_budget = time_budget

    def _config(self) -> LearnerConfig:
        accepted = {f.name for f in dataclasses.fields(LearnerConfig)}
        params = {k: v for k, v in self.get_params().items() if k in accepted}
        return LearnerConfig(**params)

    def fit(self, inst: Instance) -> "QLearningSolver":
        inst = self._check_instance(inst)
        self.report_ = train(inst, self._config())
        self.q_table_ = self.report_.q
        return self._finish(self.report_.best_schedule, inst)

    def predict(self, inst: Instance) -> Schedule:
        """Greedy rollout of the learned Q-table on `inst`."""
        if not self.is_fitted:
            raise NotFittedError("QLearningSolver is not fitted")
        return greedy_rollout(inst, self.q_table_)


class DividedQLearningSolver(QLearningSolver):
    """Instance-division solver on top of the Q-learning stage learner."""

    def __init__(self, parts: int = 2, strategy: str = "duration",
                 duration_mode: str = "mean", **learner_params):
        super().__init__(**learner_params)
        self.parts = parts
        self.strategy = strategy
        self.duration_mode = duration_mode

    def get_params(self) -> dict:
        names = [
            p.name
            for p in inspect.signature(QLearningSolver.__init__).parameters.values()
            if p.name != "self"
        ]
        params = {name: getattr(self, name) for name in names}
        params.update(parts=self.parts, strategy=self.strategy,
                      duration_mode=self.duration_mode)
        return params

    def fit(self, inst: Instance) -> "DividedQLearningSolver":
        inst = self._check_instance(inst)
        schedule, self.stage_reports_ = solve_divided(
            inst, SplitStrategy(self.strategy), self.parts, self._config(),
            self.duration_mode,
        )
        return self._finish(schedule, inst)


class RandomSamplingSolver(BaseSolver):
    def __init__(self, episodes: int = 1000, seed: int = 0):
        self.episodes = episodes
        self.seed = seed

    def fit(self, inst: Instance) -> "RandomSamplingSolver":
        inst = self._check_instance(inst)
        cfg = baselines.BaselineConfig(episodes=self.episodes, seed=self.seed)
        return self._finish(baselines.random_sampling(inst, cfg), inst)


class FifoSolver(BaseSolver):
    def __init__(self):
        pass

    def fit(self, inst: Instance) -> "FifoSolver":
        inst = self._check_instance(inst)
        return self._finish(baselines.fifo(inst), inst)


class MwkrSolver(BaseSolver):
    def __init__(self, duration_mode: str = "mean"):
        self.duration_mode = duration_mode

    def fit(self, inst: Instance) -> "MwkrSolver":
        inst = self._check_instance(inst)
        return self._finish(baselines.mwkr(inst, self.duration_mode), inst)


class GeneticSolver(BaseSolver):
    def __init__(self, population: int = 50, generations: int = 200,
                 crossover_rate: float = 0.8, mutation_rate: float = 0.2,
                 stagnation: int = 40, seed: int = 0):
        self.population = population
        self.generations = generations
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.stagnation = stagnation
        self.seed = seed

    def fit(self, inst: Instance) -> "GeneticSolver":
        inst = self._check_instance(inst)
        cfg = baselines.BaselineConfig(
            population=self.population, generations=self.generations,
            crossover_rate=self.crossover_rate,
            mutation_rate=self.mutation_rate, stagnation=self.stagnation,
            seed=self.seed,
        )
        return self._finish(baselines.genetic(inst, cfg), inst)


class ExhaustiveSolver(BaseSolver):
    def __init__(self, node_budget: int = 2_000_000):
        self.node_budget = node_budget

    def fit(self, inst: Instance) -> "ExhaustiveSolver":
        inst = self._check_instance(inst)
        cfg = baselines.BaselineConfig(node_budget=self.node_budget)
        return self._finish(baselines.exhaustive_oracle(inst, cfg), inst)


SOLVERS: dict[str, type[BaseSolver]] = {
    "rl": QLearningSolver,
    "rl-plain": QLearningSolver,  # prepopulate forced off by make_solver
    "rl-divided": DividedQLearningSolver,
    "rs": RandomSamplingSolver,
    "fifo": FifoSolver,
    "mwkr": MwkrSolver,
    "ga": GeneticSolver,
    "oracle": ExhaustiveSolver,
}


def make_solver(name: str, **overrides) -> BaseSolver:
    """Build a solver by registry name, applying only the overrides the
    solver's constructor understands."""
    if name not in SOLVERS:
        raise ValueError(f"unknown solver {name!r}; have {sorted(SOLVERS)}")
    cls = SOLVERS[name]
    accepted = {
        p.name
        for p in inspect.signature(cls.__init__).parameters.values()
        if p.name not in ("self", "learner_params")
    }
    if issubclass(cls, QLearningSolver):
        accepted |= {
            p.name
            for p in inspect.signature(QLearningSolver.__init__).parameters.values()
            if p.name != "self"
        }
    kwargs = {k: v for k, v in overrides.items() if k in accepted and v is not None}
    if name == "rl-plain":
        kwargs["prepopulate"] = False
    solver = cls(**kwargs)
    return solver
