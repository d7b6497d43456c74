"""Global explanations for linear models on sparse binary data."""

from .ec import Explanation, explain_complete, explain_greedy, explain_linear
from .errors import (BinaryViolationError, ContractError, DegenerateNormalizationError,
                     ExplainError, FeatureRangeError, FormatError, ResourceError,
                     UndefinedCorrelationError)
from .evaluation import (CorrelationReport, ExplanationCurve, SynthConfig, curve_report,
                         default_k_grid, explanation_curve, generate_synthetic,
                         spearman_topk)
from .model import (LinearModel, Prediction, SparseDataset, SparseInstance, evidence,
                    predict, score)
from .ranking import (FeatureRanking, aggregate_ec, aggregate_shapley, rank_by_beta,
                      rank_by_coverage)
from .shapley import (AttributionVector, Coalition, VotingGame, approx_shapley,
                      build_game, exact_shapley, explain_shapley,
                      marginal_utility)

__version__ = "0.1.0"
