"""Visit scheduling and session execution.

A session draws `visit_budget` pages uniformly from the persona's pool
(training plus control pages) with i.i.d. exponential inter-visit gaps,
then walks the schedule against an ad harvester. Ads are only harvested
on control-page visits. Clean-profile sessions reset the harvester state
after every visit, so nothing accumulates across pages.

Repeated sightings of the same ad merge: impressions aggregate by
(persona, session, control page, landing page) with ntimes summed, and
the sum of ntimes equals the raw number of served ads.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .corpus import AdImpression, WebPage, landing_key
from .errors import ConfigurationError, CorpusDataError, EmptyPool, HarvesterFailure
from .persona import Persona


@dataclass
class SessionConfig:
    """One session's parameters. Equal configs and seeds replay exactly."""

    persona_id: str
    session_id: str = ""
    geo: str = "ES"
    dnt: bool = False
    clean_profile: bool = False
    visit_budget: int = 310
    mean_interval: float = 180.0  # simulated seconds between visits
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.session_id:
            self.session_id = self.persona_id
        if self.visit_budget < 1:
            raise ConfigurationError(
                f"visit_budget must be >= 1, got {self.visit_budget}"
            )
        if self.mean_interval <= 0:
            raise ConfigurationError(
                f"mean_interval must be positive, got {self.mean_interval}"
            )


@dataclass
class VisitEvent:
    """One scheduled page visit on the simulated clock."""

    t: float
    page: WebPage
    kind: str  # "training" | "control", taken from the page role


@dataclass
class ServedAd:
    """What a harvester returns for one displayed ad."""

    landing_url: str
    label: str | None = None  # ground-truth ad kind when simulated


class AdHarvester(Protocol):
    """Ad-serving backend driven by run_session.

    begin() opens per-session browser state, visit() observes one page and
    returns the ads displayed there (empty on training pages), reset()
    wipes the session's browser state (used by clean profiles).
    """

    def begin(self, config: SessionConfig) -> None: ...

    def visit(self, config: SessionConfig, event: VisitEvent) -> list[ServedAd]: ...

    def reset(self, config: SessionConfig) -> None: ...


@dataclass
class SessionResult:
    """A finished (or aborted) session."""

    session_id: str
    visits: list[VisitEvent]
    impressions: list[AdImpression]
    complete: bool = True
    visit_mix: dict[str, int] = field(default_factory=dict)
    raw_served: int = 0


def schedule_visits(pool: Sequence[WebPage], config: SessionConfig) -> list[VisitEvent]:
    """Draw the visit schedule: uniform pages, exponential gaps.

    Deterministic in config.seed. Timestamps are strictly increasing and
    exactly config.visit_budget events are produced. Raises EmptyPool for
    an empty pool.
    """
    if not pool:
        raise EmptyPool("cannot schedule visits over an empty page pool")
    rng = random.Random(config.seed)
    rate = 1.0 / config.mean_interval
    events: list[VisitEvent] = []
    t = 0.0
    for _ in range(config.visit_budget):
        gap = rng.expovariate(rate)
        while gap <= 0.0:  # keeps timestamps strictly increasing
            gap = rng.expovariate(rate)
        t += gap
        page = pool[rng.randrange(len(pool))]
        events.append(VisitEvent(t=t, page=page, kind=page.role))
    return events


def run_session(
    persona: Persona,
    control_pages: Sequence[WebPage],
    config: SessionConfig,
    harvester: AdHarvester,
) -> SessionResult:
    """Execute one session against a harvester.

    On HarvesterFailure the partial result (visits walked so far, the
    impressions already merged, complete=False) is attached to the raised
    exception as .partial so the caller can flush it.
    """
    pool = list(persona.training_pages) + list(control_pages)
    events = schedule_visits(pool, config)

    merged: dict[tuple[str, str], AdImpression] = {}
    mix = {"training": 0, "control": 0}
    raw = 0
    walked: list[VisitEvent] = []

    harvester.begin(config)
    for event in events:
        try:
            served = harvester.visit(config, event)
        except HarvesterFailure as failure:
            failure.partial = SessionResult(
                session_id=config.session_id,
                visits=walked,
                impressions=list(merged.values()),
                complete=False,
                visit_mix=dict(mix),
                raw_served=raw,
            )
            raise
        walked.append(event)
        mix[event.kind] = mix.get(event.kind, 0) + 1
        if event.kind == "control":
            for ad in served:
                raw += 1
                key = (event.page.url, landing_key(ad.landing_url))
                hit = merged.get(key)
                if hit is None:
                    merged[key] = AdImpression(
                        persona_id=config.persona_id,
                        session_id=config.session_id,
                        control_page=event.page.url,
                        landing_page=ad.landing_url,
                        ntimes=1,
                        ground_truth=ad.label,
                    )
                else:
                    if hit.ground_truth != ad.label:
                        raise CorpusDataError(
                            f"conflicting ground truth for {key}: "
                            f"{hit.ground_truth!r} vs {ad.label!r}"
                        )
                    hit.ntimes += 1
        if config.clean_profile:
            harvester.reset(config)

    return SessionResult(
        session_id=config.session_id,
        visits=events,
        impressions=list(merged.values()),
        complete=True,
        visit_mix=mix,
        raw_served=raw,
    )
