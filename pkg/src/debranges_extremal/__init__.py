"""Optimal one-sided exponential-type approximations in the de Branges space of E_a."""
from .estimator import ExtremalApproximant
from .extremal import (
    ExtremalPair,
    build_extremal,
    cached_extremal,
    closed_form_optimal,
    closed_form_value,
    eval_pair,
    eval_pair_real,
    quadrature_optimal,
)
from .hb import HBParams, eval_A, eval_B, eval_E, kernel, kernel_diag, weight, zeros_of_B
from .interpolation import InterpolantM, build_h_table, build_interpolants, eval_M
from .laplace import GTables, LPDescriptor, bromwich_eval, build_g_tables
from .report import ReportEntry, VerificationReport
from .suites import run_suite

__version__ = "0.1.0"

__all__ = [
    "ExtremalApproximant",
    "ExtremalPair",
    "GTables",
    "HBParams",
    "InterpolantM",
    "LPDescriptor",
    "ReportEntry",
    "VerificationReport",
    "bromwich_eval",
    "build_extremal",
    "build_g_tables",
    "build_h_table",
    "build_interpolants",
    "cached_extremal",
    "closed_form_optimal",
    "closed_form_value",
    "eval_A",
    "eval_B",
    "eval_E",
    "eval_M",
    "eval_pair",
    "eval_pair_real",
    "kernel",
    "kernel_diag",
    "quadrature_optimal",
    "run_suite",
    "weight",
    "zeros_of_B",
]
