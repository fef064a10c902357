"""Consistency tests and confidence regions for partially identified structures."""

__version__ = "0.1.0"

from .empirical import (IngestError, Observation, RectSet, Sample, empirical_measure,
                        generate_class, load_sample)
from .kstest import (TestConfig, TestResult, bootstrap_critical_value, default_bandwidth,
                     filter_class, run_test, statistic)
from .models import (JovanovicModel, StructureModel, TabulatedModel, TinbergenModel,
                     jovanovic_identified_set, nu_gamma_eval, tinbergen_consistency_bounds)
from .oracle import DiscreteStructure, check_duality, feasible_coupling, sup_deficiency
from .region import GridSpec, RegionResult, confidence_region, region_summary

__all__ = [
    "IngestError", "Observation", "RectSet", "Sample", "empirical_measure", "generate_class",
    "load_sample", "TestConfig", "TestResult", "bootstrap_critical_value", "default_bandwidth",
    "filter_class", "run_test", "statistic", "JovanovicModel", "StructureModel",
    "TabulatedModel", "TinbergenModel", "jovanovic_identified_set", "nu_gamma_eval",
    "tinbergen_consistency_bounds", "DiscreteStructure", "check_duality", "feasible_coupling",
    "sup_deficiency", "GridSpec", "RegionResult", "confidence_region", "region_summary",
]
