"""Python surface of the salc evaluation harness.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from salc._core import (  # noqa: F401
    SalcError,
    aggregate_absolute,
    aggregate_relative,
    bleu,
    cache_key,
    induce_preference,
    kendall_tau_b,
    parse_absolute_result,
    parse_criteria,
    parse_relative_verdict,
    pearson,
    preference_agreement,
    render_absolute_criteria,
    render_absolute_eval,
    render_reference_free_eval,
    render_relative_criteria,
    render_relative_eval,
    rouge_l,
    rouge_n,
    serialize_criteria,
    spearman,
    tokenize,
)

__all__ = [
    "SalcError",
    "aggregate_absolute",
    "aggregate_relative",
    "bleu",
    "cache_key",
    "induce_preference",
    "kendall_tau_b",
    "parse_absolute_result",
    "parse_criteria",
    "parse_relative_verdict",
    "pearson",
    "preference_agreement",
    "render_absolute_criteria",
    "render_absolute_eval",
    "render_reference_free_eval",
    "render_relative_criteria",
    "render_relative_eval",
    "rouge_l",
    "rouge_n",
    "serialize_criteria",
    "spearman",
    "tokenize",
]
