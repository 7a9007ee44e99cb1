"""Choice-tree generators that double as parsers, with derivatives and search."""

from .core import (
    DEFAULT_LANGUAGE_BOUND,
    Choice,
    ChoiceSeq,
    FreeGen,
    Language,
    LanguageSizeError,
    Map,
    Pair,
    Pure,
    Select,
    SelectError,
    Value,
    Void,
    VoidGeneratorError,
    alphabet_of,
    ap,
    contains_void,
    fmap,
    is_simplified,
    lang,
    lift,
    pair,
    pure,
    render,
    select,
    void,
)
from .derivative import derivative, derivative_with_dist, gradient, nullable_set
from .interp import (
    ExternalDist,
    ParseResult,
    choice_sampler,
    exact_choice_pmf,
    exact_value_pmf,
    external_dist_sampler,
    parse,
    pmf_to_json,
    pushforward,
    sample_with_external_dist,
    sample_with_external_dist_traced,
    traced_sampler,
    value_sampler,
)
from .search import (
    SearchConfig,
    SearchOutcome,
    SearchStats,
    ValidityPredicate,
    cgs_collect,
    cgs_episode,
    cgs_episode_with_dist,
    rejection_collect,
    score_gradient,
    weighted_choice,
)

__version__ = "0.1.0"
