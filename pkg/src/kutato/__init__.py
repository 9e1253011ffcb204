"""Entropy-driven belief-network learning from case databases."""

from .entropy import (EntropyReport, brute_force_entropy, empirical_network_entropy, kl_divergence,
                      network_entropy)
from .estimation import Estimator, FamilyCounts, count_family, estimate_cpt, fit_parameters
from .evalcmp import StructuralDiff, cpt_max_abs_error, distribution_kl, structural_diff
from .inference import MarginalTable, ResourceError, brute_force_joint, marginal_over
from .learner import (DIRECTION_LEARNING, CandidateEvaluation, ConfigError, LearnConfig, LearnTrace,
                      chi_squared_survival, degrees_of_freedom, evaluate_candidate, kutato_learn)
from .model import (MISSING, BeliefNetwork, CaseDatabase, CycleError, Cpt, NetworkError, Variable,
                    joint_probability, topological_order, validate_network)
from .sampling import SampleSpec, logic_sample

__all__ = [
    "BeliefNetwork", "CandidateEvaluation", "CaseDatabase", "ConfigError", "Cpt", "CycleError",
    "DIRECTION_LEARNING", "EntropyReport", "Estimator", "FamilyCounts", "LearnConfig", "LearnTrace",
    "MISSING", "MarginalTable", "NetworkError", "ResourceError", "SampleSpec", "StructuralDiff",
    "Variable", "brute_force_entropy", "brute_force_joint", "chi_squared_survival", "count_family",
    "cpt_max_abs_error", "degrees_of_freedom", "distribution_kl", "empirical_network_entropy",
    "estimate_cpt", "evaluate_candidate", "fit_parameters", "joint_probability", "kl_divergence",
    "kutato_learn", "logic_sample", "marginal_over", "network_entropy", "structural_diff",
    "topological_order", "validate_network",
]
