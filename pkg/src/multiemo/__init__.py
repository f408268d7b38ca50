"""multiemo: evaluation and synthetic-corpus tooling for multilingual
multi-label emotion classification."""

from .errors import (AlignmentError, BudgetError, DegenerateInputError,
                     MultiemoError, SchemaError)
from .taxonomy import (EmotionTaxonomy, LabelMapping, LabelProjector,
                       LabelSpaceView, apply_view, intersect_taxonomies,
                       intersection_view, load_mapping, load_taxonomy,
                       project_gold, projected_view)
from .data import (Corpus, GoldMatrix, Sample, ScoreMatrix, adapt_goemotions,
                   adapt_semeval, align_scores, binarize, builtin_mapping,
                   builtin_taxonomy, language_registry, read_corpus,
                   read_scores, write_corpus)
from .metrics import (EvaluationReport, ap_micro, auroc_micro, evaluate_all,
                      f1_macro, f1_micro, hamming_accuracy, jaccard_samples,
                      lrap, per_label_prf, pr_curve_area, pr_curve_micro,
                      subset_accuracy)
from .decision import (ARGMAX, THRESHOLD_DEFAULT, ArgmaxClassifier,
                       CalibrationResult, DecisionRule, RuleComparison,
                       ThresholdCalibrator, calibrate_threshold, compare_rules,
                       decide)
from .reporting import (ModelRunRecord, ParetoPoint, emit_curves,
                        pareto_frontier, per_language_matrix, render_table)

__version__ = "0.1.0"
