"""Three-stage ad filter pipeline.

The stages run in a fixed order and each removes whole impressions,
leaving survivors untouched (same objects, same ntimes):

1. retargeting filter: drop impressions whose landing page matches any
   visited training or control page;
2. static & contextual filter: drop impressions whose landing page also
   appeared in the clean profile's impressions, matched globally across
   control pages;
3. demographic & geo filter: drop impressions whose audience contains a
   persona whose interest category sits below the similarity threshold,
   strictly; sharing with taxonomy-near personas (or with nobody) is fine.

Landing pages always compare by the corpus equality rule (host + path,
query stripped). Categories missing from the taxonomy use the exact-match
fallback: an equal category never counts as dissimilar, a different one
counts as dissimilar at any positive threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .corpus import AdImpression, landing_key
from .errors import ConfigurationError, MissingCleanProfile
from .taxonomy import KeywordTaxonomy, normalize_keyword

# filter-set codes, ordered; "sc" and "dg" never run without "r"
FILTER_SETS = {
    "r": ("r",),
    "rsc": ("r", "sc"),
    "rscdg": ("r", "sc", "dg"),
}


@dataclass
class FilterConfig:
    """Which stages run, and the demographic similarity threshold."""

    filters: str = "rscdg"
    t_prime: float = 2.5

    def __post_init__(self) -> None:
        if self.filters not in FILTER_SETS:
            raise ConfigurationError(
                f"unknown filter set {self.filters!r}, expected one of "
                f"{sorted(FILTER_SETS)}"
            )
        if self.t_prime < 0:
            raise ConfigurationError(f"t_prime must be >= 0, got {self.t_prime}")

    @property
    def stages(self) -> tuple[str, ...]:
        return FILTER_SETS[self.filters]


def filter_retargeting(
    impressions: Iterable[AdImpression], visited_urls: Iterable[str]
) -> list[AdImpression]:
    """Drop impressions that land on a page the persona already visited."""
    visited = {landing_key(u) for u in visited_urls}
    return [
        imp for imp in impressions
        if landing_key(imp.landing_page) not in visited
    ]


def filter_static_contextual(
    impressions: Iterable[AdImpression],
    clean_impressions: Iterable[AdImpression] | None,
) -> list[AdImpression]:
    """Drop impressions whose landing page the clean profile also saw.

    Matching is global: the control page that showed the ad does not
    matter. An empty clean corpus is legitimate and removes nothing;
    a missing one (None) raises MissingCleanProfile.
    """
    if clean_impressions is None:
        raise MissingCleanProfile(
            "static & contextual filter needs a clean-profile impression corpus"
        )
    clean_keys = {landing_key(c.landing_page) for c in clean_impressions}
    return [
        imp for imp in impressions
        if landing_key(imp.landing_page) not in clean_keys
    ]


def build_audience(
    impressions_by_persona: Mapping[str, Iterable[AdImpression]],
) -> dict[str, set[str]]:
    """Landing-page key to the set of personas that received the ad.

    Build this over the full multi-persona corpus of one experiment
    condition before filtering per persona.
    """
    audience: dict[str, set[str]] = {}
    for pid, imps in impressions_by_persona.items():
        for imp in imps:
            audience.setdefault(landing_key(imp.landing_page), set()).add(pid)
    return audience


def _category_below(
    taxonomy: KeywordTaxonomy, a: str, b: str, threshold: float
) -> bool:
    """Strictly-below-threshold test with the exact-match fallback."""
    if a in taxonomy and b in taxonomy:
        return taxonomy.lc_similarity(a, b) < threshold
    return normalize_keyword(a) != normalize_keyword(b) and threshold > 0


def filter_demo_geo(
    impressions: Iterable[AdImpression],
    persona_id: str,
    persona_categories: Mapping[str, str],
    audience: Mapping[str, set[str]],
    taxonomy: KeywordTaxonomy,
    t_prime: float,
) -> list[AdImpression]:
    """Drop impressions shared with any taxonomy-distant persona.

    An impression seen by this persona alone survives. Similarity exactly
    equal to t_prime keeps the impression; only strictly lower removes.
    """
    try:
        own_cat = persona_categories[persona_id]
    except KeyError:
        raise ConfigurationError(
            f"no category known for persona {persona_id!r}"
        ) from None
    out: list[AdImpression] = []
    for imp in impressions:
        others = audience.get(landing_key(imp.landing_page), set()) - {persona_id}
        distant = False
        for other in sorted(others):
            try:
                other_cat = persona_categories[other]
            except KeyError:
                raise ConfigurationError(
                    f"no category known for persona {other!r}"
                ) from None
            if _category_below(taxonomy, own_cat, other_cat, t_prime):
                distant = True
                break
        if not distant:
            out.append(imp)
    return out


@dataclass
class PipelineResult:
    """Survivors after each enabled stage, plus attrition counts."""

    survivors: list[AdImpression]
    by_stage: dict[str, list[AdImpression]]
    attrition: dict[str, int]


def apply_filters(
    impressions: Iterable[AdImpression],
    config: FilterConfig,
    visited_urls: Iterable[str],
    clean_impressions: Iterable[AdImpression] | None,
    persona_id: str,
    persona_categories: Mapping[str, str],
    audience: Mapping[str, set[str]],
    taxonomy: KeywordTaxonomy,
) -> PipelineResult:
    """Run the enabled stages in the fixed order r, sc, dg."""
    current = list(impressions)
    attrition: dict[str, int] = {"input": len(current)}
    by_stage: dict[str, list[AdImpression]] = {}
    for stage in config.stages:
        if stage == "r":
            current = filter_retargeting(current, visited_urls)
            attrition["after_retargeting"] = len(current)
        elif stage == "sc":
            current = filter_static_contextual(current, clean_impressions)
            attrition["after_static_contextual"] = len(current)
        elif stage == "dg":
            current = filter_demo_geo(
                current, persona_id, persona_categories, audience,
                taxonomy, config.t_prime,
            )
            attrition["after_demo_geo"] = len(current)
        by_stage[stage] = current
    return PipelineResult(survivors=current, by_stage=by_stage, attrition=attrition)
