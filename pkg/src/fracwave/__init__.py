"""fracwave: periodic traveling waves of fractional-dispersion KdV/RLW
equations — spectral solvers, linearized spectra, stability classification,
and validating time evolution."""

from .grids import Grid, RealField
from .spectral import (DispersionSymbol, FunctionalValues,
                       apply_fractional_laplacian, dealiased_product,
                       differentiate, functionals_kdv, functionals_rlw,
                       inner_product, integrate, l2_norm, sobolev_norm)
from .waves import (Branch, SolverConfig, TravelingWave, TransformRecord,
                    WaveParams, bifurcation_seed, canonical_normalize,
                    continue_branch, integral_identity_residuals, march_to_speed,
                    newton_solve, residual, rlw_to_kdv_reduction,
                    solve_family_wave, solve_normal_form_wave,
                    solve_pinned_amplitude)
from .operators import (KernelVerdict, LinearOperator, RangeVerdict,
                        SpectrumReport, build_second_variation, eigen_spectrum,
                        kernel_check, nodal_count, project_mean_zero,
                        range_membership)
from .minimize import (CoercivityReport, MinimizerConfig, coercivity_probe,
                       constrained_minimize, nehari_check,
                       symmetric_decreasing_rearrangement)
from .stability import (CriteriaReport, LimitReport, ParameterJacobian,
                        ScanResult, StabilityVerdict, build_solitary_branch,
                        classify, classify_from_indices, growing_mode_scan,
                        gss_solitary_criteria, minimizer_certificate,
                        negative_index_predict, parameter_jacobian,
                        projected_momentum_derivative, solitary_limit_report)
from .evolve import (EvolutionTrace, ExperimentReport, evolve_linearized,
                     evolve_nonlinear, orbital_distance,
                     perturbation_experiment, project_constraints)

__version__ = "0.1.0"
