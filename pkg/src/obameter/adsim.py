"""Synthetic ad ecosystem with ground-truth ad kinds.

The world holds themed training pages per persona, five weather-themed
control pages, a tracker (aggregator) placement map, and an ad inventory
in which every ad unit carries exactly one kind label:

    oba          targeted at a taxonomy category; served on a control page
                 only when an aggregator present there has accumulated
                 enough profile weight for that category
    contextual   matches the control page's theme, profile-independent
    static       always eligible
    retargeting  points back at a page already in the browser's history
    geo_demo     keyed on the session's geo label, profile-independent

Serving draws a fixed number of ad slots per control visit, weighted by
the units' base weights, without replacement within the visit. Aggregator
profiles build up from tracked page visits; a browser whose state is reset
after every visit (the clean profile) can therefore never receive oba or
retargeting ads.

Tag noise is a post-processing of the world's true page categories and
never influences serving. Keyword dropout and spurious injection decide
each (source, page, keyword) with a deterministic hash compared against
the rate, so realized tag sets grow monotonically with the spurious rate.
The world doubles as a set of tagging sources for the analysis side.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field, asdict
from typing import Sequence

from . import demo
from .corpus import WebPage, landing_key
from .errors import InvalidConfig
from .persona import CandidatePage, Persona, select_training_pages
from .seeding import derive_seed, hash_uniform
from .session import ServedAd, SessionConfig, VisitEvent
from .taxonomy import KeywordTaxonomy, normalize_keyword

AD_KINDS = ("oba", "contextual", "static", "retargeting", "geo_demo")

DEFAULT_MIX = {
    "oba": 0.4,
    "contextual": 0.3,
    "static": 0.1,
    "retargeting": 0.1,
    "geo_demo": 0.1,
}

# Targeted inventory bids higher per displayed ad.
DEFAULT_KIND_WEIGHTS = {
    "oba": 5.0,
    "contextual": 1.0,
    "static": 1.0,
    "retargeting": 1.0,
    "geo_demo": 1.0,
}

DEFAULT_SOURCES = ("sim-a", "sim-b", "sim-c")


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")


@dataclass
class TagNoise:
    """Per-source tag corruption rates."""

    dropout: float = 0.0
    spurious: float = 0.0

    def __post_init__(self) -> None:
        for name in ("dropout", "spurious"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidConfig(f"{name} rate must be in [0, 1], got {v}")


@dataclass
class SimConfig:
    """World-building and serving knobs."""

    n_ads: int = 100
    mix: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_MIX))
    ads_per_visit: int = 3
    activation_threshold: float = 3.0
    honor_dnt: bool = False
    share_profiles: bool = False
    trackers_total: int = 60
    trackers_min: int = 15
    trackers_max: int = 40
    training_pages_per_persona: int = 12
    n_control_pages: int = 5
    geo_labels: list[str] = field(default_factory=lambda: ["ES", "US"])
    kind_weights: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_KIND_WEIGHTS)
    )
    profile_decay_halflife: float | None = None
    tag_noise: TagNoise = field(default_factory=TagNoise)
    sources: list[str] = field(default_factory=lambda: list(DEFAULT_SOURCES))

    def __post_init__(self) -> None:
        if self.n_ads < 1:
            raise InvalidConfig(f"n_ads must be >= 1, got {self.n_ads}")
        if self.ads_per_visit < 1:
            raise InvalidConfig(f"ads_per_visit must be >= 1, got {self.ads_per_visit}")
        if self.activation_threshold < 0:
            raise InvalidConfig("activation_threshold must be >= 0")
        unknown = set(self.mix) - set(AD_KINDS)
        if unknown:
            raise InvalidConfig(f"unknown ad kinds in mix: {sorted(unknown)}")
        if any(v < 0 for v in self.mix.values()):
            raise InvalidConfig("mix proportions must be >= 0")
        if abs(sum(self.mix.values()) - 1.0) > 1e-9:
            raise InvalidConfig(
                f"mix proportions must sum to 1, got {sum(self.mix.values())}"
            )
        if not (1 <= self.trackers_min <= self.trackers_max <= self.trackers_total):
            raise InvalidConfig(
                "tracker bounds must satisfy 1 <= min <= max <= total, got "
                f"{self.trackers_min}/{self.trackers_max}/{self.trackers_total}"
            )
        if self.training_pages_per_persona < 10:
            raise InvalidConfig("training_pages_per_persona must be >= 10")
        if self.n_control_pages < 1:
            raise InvalidConfig("n_control_pages must be >= 1")
        if not self.geo_labels:
            raise InvalidConfig("geo_labels must be non-empty")
        if len(self.sources) < 2:
            raise InvalidConfig("need at least 2 tag sources")
        if self.profile_decay_halflife is not None and self.profile_decay_halflife <= 0:
            raise InvalidConfig("profile_decay_halflife must be positive")
        missing = [k for k in AD_KINDS if self.kind_weights.get(k, 0) <= 0]
        if missing:
            raise InvalidConfig(f"kind_weights must be positive for {missing}")


@dataclass
class AdUnit:
    """One inventory entry; `kind` is the ground-truth label."""

    ad_id: str
    kind: str
    landing_url: str
    base_weight: float = 1.0
    target_category: str | None = None  # oba
    theme: str | None = None            # contextual
    geo: str | None = None              # geo_demo


def kind_counts(n_ads: int, mix: dict[str, float]) -> dict[str, int]:
    """Largest-remainder rounding of mix proportions to exact counts."""
    quotas = {k: n_ads * mix.get(k, 0.0) for k in AD_KINDS}
    counts = {k: math.floor(q) for k, q in quotas.items()}
    short = n_ads - sum(counts.values())
    leftovers = sorted(
        AD_KINDS, key=lambda k: (quotas[k] - counts[k], k), reverse=True
    )
    for k in leftovers[:short]:
        counts[k] += 1
    return counts


class _Browser:
    """Per-session browser state inside the simulator."""

    __slots__ = ("history", "profiles", "clock")

    def __init__(self) -> None:
        self.history: set[str] = set()
        # aggregator id -> category -> accumulated weight
        self.profiles: dict[str, dict[str, float]] = {}
        self.clock = 0.0


@dataclass
class PersonaRecord:
    """A built persona plus its selection attrition (for personas.json)."""

    persona: Persona
    attrition: dict[str, int]


class World:
    """Built ad ecosystem; implements the session AdHarvester protocol."""

    def __init__(
        self,
        config: SimConfig,
        taxonomy: KeywordTaxonomy,
        seed: int,
        personas: list[PersonaRecord],
        control_pages: list[WebPage],
        ads: list[AdUnit],
        page_categories: dict[str, list[str]],
        page_themes: dict[str, str],
        trackers: dict[str, list[str]],
        aggregators: list[str],
    ):
        self.config = config
        self.taxonomy = taxonomy
        self.seed = seed
        self.personas = personas
        self.control_pages = control_pages
        self.ads = ads
        self.page_categories = page_categories
        self.page_themes = page_themes
        self.trackers = trackers
        self.aggregators = aggregators
        self.spurious_pool = sorted(
            {c for cats in page_categories.values() for c in cats}
        )
        self._browsers: dict[str, _Browser] = {}
        self._serve_rng: dict[str, random.Random] = {}

    # -- harvester protocol -------------------------------------------------

    def begin(self, config: SessionConfig) -> None:
        self._browsers[config.session_id] = _Browser()
        self._serve_rng[config.session_id] = random.Random(
            derive_seed(self.seed, "serve", config.session_id)
        )

    def reset(self, config: SessionConfig) -> None:
        self._browsers[config.session_id] = _Browser()

    def visit(self, config: SessionConfig, event: VisitEvent) -> list[ServedAd]:
        browser = self._browsers[config.session_id]
        url = event.page.url
        served: list[ServedAd] = []
        if event.kind == "control":
            chosen = self._serve(config, browser, url)
            served = [ServedAd(landing_url=ad.landing_url, label=ad.kind) for ad in chosen]
        self._observe(browser, url, event.t)
        return served

    # -- serving ------------------------------------------------------------

    def _decay_factor(self, browser: _Browser, now: float) -> float:
        half = self.config.profile_decay_halflife
        if half is None or now <= browser.clock:
            return 1.0
        return 2.0 ** (-(now - browser.clock) / half)

    def _observe(self, browser: _Browser, url: str, now: float) -> None:
        factor = self._decay_factor(browser, now)
        if factor != 1.0:
            for prof in browser.profiles.values():
                for cat in prof:
                    prof[cat] *= factor
        browser.clock = max(browser.clock, now)
        cats = self.page_categories.get(url, ())
        for agg in self.trackers.get(url, ()):
            prof = browser.profiles.setdefault(agg, {})
            for cat in cats:
                prof[cat] = prof.get(cat, 0.0) + 1.0
        browser.history.add(landing_key(url))

    def _profile_weight(self, browser: _Browser, present: Sequence[str], category: str) -> float:
        if self.config.share_profiles:
            # data brokers pooled their observations
            return sum(
                prof.get(category, 0.0) for prof in browser.profiles.values()
            )
        return max(
            (browser.profiles.get(agg, {}).get(category, 0.0) for agg in present),
            default=0.0,
        )

    def _eligible(self, config: SessionConfig, browser: _Browser, url: str) -> list[AdUnit]:
        suppressed = self.config.honor_dnt and config.dnt
        theme = self.page_themes.get(url)
        present = self.trackers.get(url, ())
        out: list[AdUnit] = []
        for ad in self.ads:
            if ad.kind == "static":
                out.append(ad)
            elif ad.kind == "contextual":
                if ad.theme == theme:
                    out.append(ad)
            elif ad.kind == "geo_demo":
                if ad.geo == config.geo:
                    out.append(ad)
            elif ad.kind == "retargeting":
                if not suppressed and landing_key(ad.landing_url) in browser.history:
                    out.append(ad)
            elif ad.kind == "oba":
                if suppressed or not present:
                    continue
                weight = self._profile_weight(browser, present, ad.target_category)
                if weight >= self.config.activation_threshold:
                    out.append(ad)
        return out

    def _serve(self, config: SessionConfig, browser: _Browser, url: str) -> list[AdUnit]:
        eligible = self._eligible(config, browser, url)
        if not eligible:
            return []
        rng = self._serve_rng[config.session_id]
        slots = min(self.config.ads_per_visit, len(eligible))
        pool = list(eligible)
        weights = [ad.base_weight for ad in pool]
        picked: list[AdUnit] = []
        for _ in range(slots):
            total = sum(weights)
            mark = rng.random() * total
            acc = 0.0
            idx = len(pool) - 1
            for i, w in enumerate(weights):
                acc += w
                if mark < acc:
                    idx = i
                    break
            picked.append(pool.pop(idx))
            weights.pop(idx)
        return picked

    # -- corpus views --------------------------------------------------------

    def all_pages(self) -> list[WebPage]:
        pages: list[WebPage] = []
        for rec in self.personas:
            pages.extend(rec.persona.training_pages)
        pages.extend(self.control_pages)
        publisher = {p.url for p in pages}
        for ad in self.ads:
            if ad.landing_url not in publisher:
                pages.append(WebPage(url=ad.landing_url, role="landing"))
        return pages

    def tag_sources(self, noise: TagNoise | None = None) -> list["WorldTagSource"]:
        noise = noise if noise is not None else self.config.tag_noise
        return [
            WorldTagSource(name=name, world=self, noise=noise)
            for name in self.config.sources
        ]

    # -- (de)serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config": _config_to_dict(self.config),
            "aggregators": self.aggregators,
            "control_pages": [p.url for p in self.control_pages],
            "personas": [
                {
                    "id": rec.persona.id,
                    "category": rec.persona.category,
                    "sensitive": rec.persona.sensitive,
                    "training_pages": [p.url for p in rec.persona.training_pages],
                    "attrition": rec.attrition,
                }
                for rec in self.personas
            ],
            "ads": [asdict(ad) for ad in self.ads],
            "page_categories": self.page_categories,
            "page_themes": self.page_themes,
            "trackers": self.trackers,
        }

    @classmethod
    def from_dict(cls, data: dict, taxonomy: KeywordTaxonomy) -> "World":
        config = _config_from_dict(data["config"])
        personas = [
            PersonaRecord(
                persona=Persona(
                    id=rec["id"],
                    category=rec["category"],
                    sensitive=rec["sensitive"],
                    training_pages=[
                        WebPage(url=u, role="training") for u in rec["training_pages"]
                    ],
                ),
                attrition=rec["attrition"],
            )
            for rec in data["personas"]
        ]
        return cls(
            config=config,
            taxonomy=taxonomy,
            seed=data["seed"],
            personas=personas,
            control_pages=[WebPage(url=u, role="control") for u in data["control_pages"]],
            ads=[AdUnit(**ad) for ad in data["ads"]],
            page_categories=data["page_categories"],
            page_themes=data["page_themes"],
            trackers=data["trackers"],
            aggregators=data["aggregators"],
        )


def _config_to_dict(config: SimConfig) -> dict:
    d = asdict(config)
    d["tag_noise"] = {"dropout": config.tag_noise.dropout,
                      "spurious": config.tag_noise.spurious}
    return d


def _config_from_dict(data: dict) -> SimConfig:
    d = dict(data)
    d["tag_noise"] = TagNoise(**d.get("tag_noise", {}))
    return SimConfig(**d)


class WorldTagSource:
    """The simulator acting as a tagging source.

    Starts from the world's true page categories, drops each true keyword
    with probability `noise.dropout`, and injects each pool keyword with
    probability `noise.spurious`. Decisions hash (source, url, keyword)
    against the rate, so a keyword present at rate r stays present at any
    rate above r.
    """

    def __init__(self, name: str, world: World, noise: TagNoise):
        self.name = name
        self.world = world
        self.noise = noise
        self._salt = derive_seed(world.seed, "tags", name)

    def keywords_for(self, page: WebPage) -> set[str]:
        true = self.world.page_categories.get(page.url, ())
        kept = {
            k for k in true
            if hash_uniform(self._salt, "drop", page.url, k) >= self.noise.dropout
        }
        if self.noise.spurious > 0.0:
            for k in self.world.spurious_pool:
                if hash_uniform(self._salt, "spur", page.url, k) < self.noise.spurious:
                    kept.add(k)
        return kept


@dataclass
class PersonaSpec:
    """What a manifest says about one persona."""

    id: str
    category: str
    sensitive: bool = False


def default_persona_specs(count: int = 10) -> list[PersonaSpec]:
    cats = demo.DEFAULT_PERSONA_CATEGORIES
    if count > len(cats):
        raise InvalidConfig(
            f"only {len(cats)} default persona categories exist, asked for {count}"
        )
    return [PersonaSpec(id=_slug(c), category=c) for c in cats[:count]]


def build_world(
    config: SimConfig,
    specs: Sequence[PersonaSpec],
    taxonomy: KeywordTaxonomy,
    seed: int = 0,
) -> World:
    """Deterministically build the ecosystem for a persona roster.

    Candidate training pages are generated per persona (a few of them
    deliberately fail selection so the attrition counts are exercised),
    the tracker map guarantees 15 to 40 distinct trackers per persona,
    and the ad inventory follows the configured kind mix exactly.
    """
    if not specs:
        raise InvalidConfig("need at least one persona spec")
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise InvalidConfig("persona ids must be unique")
    for spec in specs:
        if spec.category not in taxonomy:
            raise InvalidConfig(
                f"persona {spec.id!r}: category {spec.category!r} not in taxonomy"
            )

    rng = random.Random(derive_seed(seed, "world"))
    aggregators = [f"agg-{i:02d}" for i in range(config.trackers_total)]

    page_categories: dict[str, list[str]] = {}
    page_themes: dict[str, str] = {}
    trackers: dict[str, list[str]] = {}

    # control pages: weather theme, dense tracker placement
    control_pages: list[WebPage] = []
    weather_extra = ["weather forecasts", "severe weather"]
    for i in range(config.n_control_pages):
        url = f"https://weather-{i}.example/forecast"
        page = WebPage(url=url, role="control")
        control_pages.append(page)
        page_categories[page.url] = ["weather", weather_extra[i % 2]]
        page_themes[page.url] = "weather"
        trackers[page.url] = list(aggregators)

    personas: list[PersonaRecord] = []
    selection_source = config.sources[0]
    for spec in specs:
        persona, attrition = _build_persona(
            spec, config, taxonomy, rng, page_categories, selection_source
        )
        _place_trackers(persona, config, rng, aggregators, trackers)
        personas.append(PersonaRecord(persona=persona, attrition=attrition))

    ads = _build_inventory(
        config, personas, control_pages, taxonomy, page_categories, rng
    )
    return World(
        config=config,
        taxonomy=taxonomy,
        seed=seed,
        personas=personas,
        control_pages=control_pages,
        ads=ads,
        page_categories=page_categories,
        page_themes=page_themes,
        trackers=trackers,
        aggregators=aggregators,
    )


def _build_persona(
    spec: PersonaSpec,
    config: SimConfig,
    taxonomy: KeywordTaxonomy,
    rng: random.Random,
    page_categories: dict[str, list[str]],
    selection_source: str,
) -> tuple[Persona, dict[str, int]]:
    cat = normalize_keyword(spec.category)
    bundle = demo.persona_bundle(taxonomy, cat)
    slug = _slug(spec.id)

    candidates: list[CandidatePage] = []
    for i in range(config.training_pages_per_persona):
        url = f"https://{slug}-{i:02d}.example/articles"
        # every good page carries the category; children rotate through
        cats = [cat]
        if len(bundle) > 1:
            cats.append(bundle[1 + i % (len(bundle) - 1)])
        if spec.sensitive:
            profile = set()
        elif i % 3 == 0 or len(cats) == 1:
            profile = {cat}
        else:
            profile = {cat, cats[-1]}
        candidates.append(
            CandidatePage(
                page=WebPage(url=url, role="training"),
                source_keywords={s: set(cats) for s in config.sources},
                profile_categories=profile,
            )
        )
        page_categories[candidates[-1].page.url] = sorted(set(cats))

    # two deliberate rejects: one misses the category keyword, one has a
    # contaminated (or, for sensitive personas, non-empty) profile
    off_topic = CandidatePage(
        page=WebPage(url=f"https://{slug}-offtopic.example", role="training"),
        source_keywords={s: {"antiques"} for s in config.sources},
        profile_categories=set() if spec.sensitive else {cat},
    )
    dirty = CandidatePage(
        page=WebPage(url=f"https://{slug}-dirty.example", role="training"),
        source_keywords={s: {cat} for s in config.sources},
        profile_categories={cat, "antiques", "watches"} if not spec.sensitive else {cat},
    )
    candidates.extend([off_topic, dirty])

    selection = select_training_pages(
        category=cat,
        candidates=candidates,
        sensitive=spec.sensitive,
        selection_source=selection_source,
        min_pages=10,
    )
    persona = Persona(
        id=spec.id,
        category=cat,
        sensitive=spec.sensitive,
        training_pages=selection.pages,
    )
    return persona, selection.attrition


def _place_trackers(
    persona: Persona,
    config: SimConfig,
    rng: random.Random,
    aggregators: list[str],
    trackers: dict[str, list[str]],
) -> None:
    """Give the persona's training pages 15..40 distinct trackers total."""
    k = rng.randint(config.trackers_min, config.trackers_max)
    pool = rng.sample(aggregators, k)
    pages = persona.training_pages
    placed: dict[str, set[str]] = {p.url: set() for p in pages}
    # deal every pool member once so the distinct count is exactly k
    for i, agg in enumerate(pool):
        placed[pages[i % len(pages)].url].add(agg)
    # then thicken pages a little
    for p in pages:
        for agg in rng.sample(pool, min(2, len(pool))):
            placed[p.url].add(agg)
    for p in pages:
        trackers[p.url] = sorted(placed[p.url])


def _build_inventory(
    config: SimConfig,
    personas: list[PersonaRecord],
    control_pages: list[WebPage],
    taxonomy: KeywordTaxonomy,
    page_categories: dict[str, list[str]],
    rng: random.Random,
) -> list[AdUnit]:
    # generated ad URLs are already in canonical form, so they can key
    # page_categories directly
    counts = kind_counts(config.n_ads, config.mix)
    ads: list[AdUnit] = []
    weights = config.kind_weights

    categories = [rec.persona.category for rec in personas]
    for i in range(counts["oba"]):
        target = categories[i % len(categories)]
        url = f"https://ads-oba-{i:03d}.example/offer"
        ads.append(AdUnit(
            ad_id=f"oba-{i:03d}", kind="oba", landing_url=url,
            base_weight=weights["oba"], target_category=target,
        ))
        page_categories[url] = sorted(demo.persona_bundle(taxonomy, target))

    weather_extra = ["weather forecasts", "severe weather"]
    for i in range(counts["contextual"]):
        url = f"https://ads-ctx-{i:03d}.example/deal"
        ads.append(AdUnit(
            ad_id=f"ctx-{i:03d}", kind="contextual", landing_url=url,
            base_weight=weights["contextual"], theme="weather",
        ))
        page_categories[url] = ["weather", weather_extra[i % 2]]

    for i in range(counts["static"]):
        url = f"https://ads-static-{i:03d}.example/brand"
        cat = demo.STATIC_AD_CATEGORIES[i % len(demo.STATIC_AD_CATEGORIES)]
        ads.append(AdUnit(
            ad_id=f"static-{i:03d}", kind="static", landing_url=url,
            base_weight=weights["static"],
        ))
        page_categories[url] = [cat]

    # retargeting units point back at real publisher pages, one page each
    targets: list[str] = []
    for rec in personas:
        targets.extend(p.url for p in rec.persona.training_pages)
    targets.extend(p.url for p in control_pages)
    rng.shuffle(targets)
    if counts["retargeting"] > len(targets):
        raise InvalidConfig(
            f"{counts['retargeting']} retargeting units need as many distinct "
            f"publisher pages, only {len(targets)} exist"
        )
    for i in range(counts["retargeting"]):
        ads.append(AdUnit(
            ad_id=f"ret-{i:03d}", kind="retargeting", landing_url=targets[i],
            base_weight=weights["retargeting"],
        ))

    for i in range(counts["geo_demo"]):
        url = f"https://ads-geo-{i:03d}.example/local"
        cat = demo.LOCAL_AD_CATEGORIES[i % len(demo.LOCAL_AD_CATEGORIES)]
        geo = config.geo_labels[i % len(config.geo_labels)]
        ads.append(AdUnit(
            ad_id=f"geo-{i:03d}", kind="geo_demo", landing_url=url,
            base_weight=weights["geo_demo"], geo=geo,
        ))
        page_categories[url] = [cat]

    all_landings = [ad.landing_url for ad in ads]
    if len(set(all_landings)) != len(all_landings):
        raise InvalidConfig("internal: duplicate ad landing pages")
    return ads
