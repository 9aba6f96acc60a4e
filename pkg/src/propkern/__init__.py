"""Propagation kernels for labeled, partially labeled, attributed and grid graphs."""

from .attributes import P2KConfig, attribute_kernel, p2k
from .evaluate import EvalReport, evaluate, evaluate_selected
from .graph import (Graph, GraphDatabase, absorbing_transition, build_transition, degree_labels,
                    init_label_distributions, stack_database)
from .grid import GridGraph, convolve_step, filter_matrix, grid_kernel, quantize_grayscale
from .kernel import (KernelMatrix, PKConfig, count_features, kernel_bruteforce, normalize_kernel,
                     propagation_kernel)
from .lsh import HashFunction, apply_hash, draw_hash
from .propagation import diffusion_step, label_propagation_step

__version__ = "0.1.0"
