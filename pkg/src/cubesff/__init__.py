"""Exact-arithmetic toolkit for sums of three cubes over F_q[t]."""

from .archdens import (Histogram, LaurentWindow, RSetElem, WeightParams,
                       cube_histograms, group_convolve, nu_indicator,
                       prop32_sweep, r_set_enumerate, sigma_infty,
                       sigma_infty_A, w_indicator)
from .charsums import (Certificate12, GaussSumValue, c_varpi,
                       diagonal_cubic_count, gauss_sum, hasse_davenport_check,
                       jacobi_sum, lemma21_search, theorem12_certificate)
from .gf import (CubicCharacter, EisensteinInt, FieldCtx, cubic_character,
                 embedding, field_build, norm_to_subfield, trace_to_prime)
from .globalcount import (LinearSpace, RAHistogram, VarianceReport,
                          density_scan, lemma41_check, lemma42_check,
                          linear_space_count, manin_report, ra_histogram,
                          sa_member, upsilon_enumerate, variance)
from .localdens import (ModulusN, SingularSeriesPartial, WeylSum, l_A,
                        modulus_N, recip_rho_average, rho, rho6_tilde,
                        rho_prime_power, rho_star, rho_tilde, s_r0,
                        s_r0_character, singular_series, weyl_sum_T)
from .polyring import Poly, ResidueRing, SizeExp, crt, primes_of_degree, psi, psi_arg

__all__ = [name for name in dir() if not name.startswith("_")]
