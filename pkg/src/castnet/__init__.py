"""Character interaction networks from prose and from reader surveys.

The package builds weighted character networks two ways (automatically,
from alias co-occurrence within sentences or paragraphs, and from human
survey annotations), then cleans, compares, and profiles them.
"""

from .climax import (
    ClimaxCurve,
    ClimaxShape,
    classify_shape,
    computer_climax,
    human_climax,
    partition_units,
)
from .corpus import (
    Character,
    CharacterRegistry,
    MentionCounts,
    TextUnit,
    count_mentions,
    segment_paragraphs,
    segment_sentences,
)
from .errors import CastnetError, FormatError, RegistryError, ValidationError
from .extraction import (
    InteractionEvent,
    WeightedNetwork,
    extract_network,
    pair_key,
    read_edgelist,
    read_events,
    read_matrix,
    unit_interactions,
    write_edgelist,
    write_events,
    write_matrix,
)
from .netops import (
    BinaryNetwork,
    ConstantNetworkError,
    NetworkMetrics,
    graph_metrics,
    pearson_correlation,
    permutation_significance,
    sigma_correct,
    threshold_binarize,
    undirected_density,
)
from .stats import (
    CollinearityError,
    FitResult,
    RegressionDesign,
    agreement_design,
    log_likelihood,
    logistic_fit,
    score,
)
from .survey import (
    RespondentProfile,
    SurveyResponse,
    Task1Entry,
    Task1Response,
    Task2Response,
    average_network,
    democracy_normalize,
    read_responses,
    respondent_network,
    scale_to_pattern,
    write_responses,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
