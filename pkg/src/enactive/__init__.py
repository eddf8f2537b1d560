"""Tasks, policies and layered abstractions over finite universes."""

from .errors import EnactiveError
from .experiments import ExperimentConfig, compare_proxies, random_task_pair, random_universe, validate_all
from .mca import (
    Collective,
    McaStack,
    UninstantiatedTask,
    build_state,
    collective_policies,
    derived_vocabulary,
    instantiate,
    lift,
    splinter,
)
from .report import emit_report
from .tasks import (
    SIMPLICITY,
    WEAKNESS,
    Proxy,
    Task,
    correct_policies,
    generalization_probability_closed,
    generalization_probability_oracle,
    generalizes,
    infer,
    is_correct,
    is_parent,
    learn,
    make_task,
    merge,
    policy_task,
    proxy_efficiency,
    task_level,
    utility,
)
from .universe import Language, Statement, Universe, Vocabulary, enumerate_language, extension, weakness

__all__ = [
    "Collective", "EnactiveError", "ExperimentConfig", "Language", "McaStack", "Proxy", "SIMPLICITY",
    "Statement", "Task", "UninstantiatedTask", "Universe", "Vocabulary", "WEAKNESS", "build_state",
    "collective_policies", "compare_proxies", "correct_policies", "derived_vocabulary", "emit_report",
    "enumerate_language", "extension", "generalization_probability_closed",
    "generalization_probability_oracle", "generalizes", "infer", "instantiate", "is_correct",
    "is_parent", "learn", "lift", "make_task", "merge", "policy_task", "proxy_efficiency",
    "random_task_pair", "random_universe", "splinter", "task_level", "utility", "validate_all",
    "weakness",
]
