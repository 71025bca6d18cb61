"""Sound-change detection in time-binned corpora.

Trains per-bin directional PPMI character embeddings and tests, via linear
regression against a control corpus, whether one character's distribution
converges toward another's over time. Includes a phonotactic toy-language
generator and a sound-change simulator for validation under known ground
truth.
"""

from .analysis import (DimensionReport, DistanceSeries, ExperimentResult,
                       PerDimensionResult, distance_series, per_dimension_analysis,
                       run_experiment, run_generated_experiment)
from .change import ChangeRule, Schedule, apply_change, match_sites, parse_rule
from .corpus import (Alphabet, Attestation, Condition, TimeBin, TimeBinnedCorpus,
                     TokenizationPolicy, bin_attestations, load_attestation_table,
                     load_plain_corpus, make_shuffle_control, save_plain_corpus,
                     tokenize)
from .embedding import (CooccurrenceCounts, EmbeddingMatrix, align_bins, count_bin,
                        extract_contexts, ppmi)
from .parupa import PhonotacticSpec, generate_corpus, generate_word
from .stats import RegressionFit, ols_interaction, pearson, t_sf

__version__ = "0.1.0"
