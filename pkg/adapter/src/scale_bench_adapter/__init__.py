"""Neural predictors for the scale-bench workbench, attached through its
prediction-exchange file formats."""

__version__ = "0.1.0"

from .config import AdapterConfig  # noqa: F401
from .data import LabelMap, read_chunks, read_corpus_rows, read_split  # noqa: F401
