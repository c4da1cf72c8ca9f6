"""Chromatika: joint color-word topic mining for design corpora.

Core pieces: corpus ingestion over a 512-color basis, a dual-vocabulary
topic model trained by collapsed Gibbs sampling, CIELAB palette matching,
a survey click model, and semantic image applications, served over CLI and
HTTP.
"""

from .basis import ColorBasis, bin_representative, quantize_color
from .clickmodel import (
    RelevanceMatrix,
    SurveyTrial,
    diagonal_dominance,
    diagonal_separation,
    display_prob,
    position_bias,
    q_factor,
    relevance,
    simulate_survey,
    subgroup_relevance,
)
from .colorspace import LabColor, delta_e, lab_to_srgb, srgb_to_lab
from .corpus import Corpus, CorpusEntry, Document, Vocabulary, build_corpus, load_manifest
from .errors import (
    CheckpointError,
    ChromatikaError,
    DegenerateHistogramError,
    IngestError,
    QueryError,
)
from .assignment import hungarian
from .apps import (
    TopicQuery,
    query_to_topic_weights,
    recolor_pattern,
    recommend_palettes,
    rerank_images,
    select_pixels,
)
from .checkpoint import load_model, save_model
from .imaging import image_to_color_tokens
from .palette import (
    Palette5,
    WeightedColorHistogram,
    extract_palette,
    load_pool,
    nearest_palettes,
    save_pool,
    wed_distance,
)
from .synthetic import generate_synthetic_corpus
from .text import normalize_word, tokenize_text
from .topicmodel import (
    HyperParams,
    SamplerState,
    TrainedModel,
    conditional_color,
    conditional_word,
    generate,
    gibbs_sweep,
    log_joint,
    topic_proportions_by_group,
    train,
)

__version__ = "0.1.0"
