"""Python access to the datadesc core library."""

import json as _json

from ._core import (
    Bm25Index,
    DatadescError,
    content_summary,
    count_tokens,
    meteor,
    ndcg_at_k,
    normalize_topic,
    porter_stem,
    rouge,
    serialize_column_profile,
    tokenize,
)
from ._core import profile_json as _profile_json


def profile(path, workers=1):
    """Content profile of a CSV file as a dict."""
    return _json.loads(_profile_json(str(path), workers))


__all__ = [
    "Bm25Index",
    "DatadescError",
    "content_summary",
    "count_tokens",
    "meteor",
    "ndcg_at_k",
    "normalize_topic",
    "porter_stem",
    "profile",
    "rouge",
    "serialize_column_profile",
    "tokenize",
]
