from .semeval import parse_semeval_xml
from .ersa import parse_ersa
from .sentihood import parse_sentihood
from .filters import filter_conflict, filter_top_aspect_categories, top_categories
from .instances import derive_instances
from .splits import holdout_validation
from . import records

__all__ = [
    "parse_semeval_xml",
    "parse_ersa",
    "parse_sentihood",
    "filter_conflict",
    "filter_top_aspect_categories",
    "top_categories",
    "derive_instances",
    "holdout_validation",
    "records",
]
