"""Doubly stochastic Yule cascades: sampling, explosion probes, and the
numerical constants of the scale-invariant theory."""

from .core import (GreedyPathSample, PopulationTrace, ZetaCurve, greedy_zeta,
                   simulate_to_horizon, zeta_curve, zeta_n)
from .cutsets import (InspectionTrace, PassageCutset, passage_cutsets,
                      reduced_tree_inspection, run_inspection,
                      verify_cutset_cardinality_bound)
from .kernels import (KernelSpec, SelfSimilarKernel, below_threshold,
                      sample_children, verify_E_condition)
from .models import ModelCatalogEntry, build_model, model_names
from .numerics import (QuadratureResult, alpha_d, dilog_density, kappa_d,
                       ratio_density_d, rmax_density)

__version__ = "0.1.0"

__all__ = [
    "GreedyPathSample", "PopulationTrace", "ZetaCurve", "greedy_zeta",
    "simulate_to_horizon", "zeta_curve", "zeta_n",
    "InspectionTrace", "PassageCutset", "passage_cutsets",
    "reduced_tree_inspection", "run_inspection",
    "verify_cutset_cardinality_bound",
    "KernelSpec", "SelfSimilarKernel", "below_threshold", "sample_children",
    "verify_E_condition",
    "ModelCatalogEntry", "build_model", "model_names",
    "QuadratureResult", "alpha_d", "dilog_density", "kappa_d",
    "ratio_density_d", "rmax_density",
    "__version__",
]
