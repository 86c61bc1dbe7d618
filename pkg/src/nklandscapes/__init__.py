"""NK and generalized NK landscapes as linear interaction models.

Exact rank and coefficient statistics, maximal-rank designs from difference
sets, and expected numbers of local optima via normal orthant probabilities.
"""

from .designs import (DifferenceSet, LatinSquare, MaximalStatus, adjacent_design,
                      builtin_difference_set, is_difference_set, is_packing, make_design,
                      maximal_design, maximal_rank_known, random_classic_design,
                      random_generalized_design, random_latin_square, translate_design)
from .errors import CapacityError, DesignError, ParameterError, SingularCovarianceError
from .landscape import (InteractionDesign, Landscape, WeightVector, fitness, full_fitness_vector,
                        generate_weights, load_design, model_matrix, random_landscape,
                        save_design, subvector_index)
from .optima import (OptimaReport, count_local_optima, expected_local_optima, is_local_optimum,
                     monte_carlo_expected_optima, sigma_from_design)
from .mvn import OrthantEstimate, orthant, orthant_mc_fallback
from .walsh import (TermSet, coefficient_moments, column_spaces_equal, extract_coefficients,
                    h_function, max_rank_bound, rank, term_set, walsh_matrix)

__version__ = "0.1.0"
