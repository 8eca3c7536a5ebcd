"""Workbench for computing and evaluating left-right scale scores over
category-annotated manifesto corpora."""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    Corpus,
    CorpusStats,
    Manifesto,
    Statement,
    build_corpus,
    corpus_stats,
    load_corpus,
    parse_corpus,
    validate_record,
    write_corpus,
)
from .errors import DataError, NumericError, ScaleBenchError, SchemaError  # noqa: F401
from .scales import (  # noqa: F401
    REGISTRY,
    RILE,
    RileClass,
    RileTally,
    Scale,
    StanceBin,
    load_scale,
    major_code,
    manifesto_rile,
    rile_class,
    rile_score,
    stance_bin,
    tally_classes,
)
