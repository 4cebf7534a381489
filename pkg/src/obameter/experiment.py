"""End-to-end experiment orchestration.

simulate builds a synthetic ad world from a manifest and replays every
persona session against it, writing a corpus directory:

    manifest.json      the manifest with defaults resolved
    world.json         full simulator state (ground truth; simulated runs only)
    personas.json      persona roster, training pages, selection attrition
    pages.jsonl        every page: training, control, ad landing
    tags.<src>.jsonl   per-source keyword assignments over all pages
    visits.jsonl       the visit log of every session
    impressions.jsonl  ads observed on control pages, repeat-aggregated
    sessions.json      per-session metadata (condition, rep, mix, counts)

analyze consumes such a directory (world.json not required, so corpora
collected outside the simulator work too) and writes report.json and
report.csv: TTK and BAiLP per persona, source, filter set, condition and
repetition, repetition averages, condition comparisons, and optionally a
correlation against ad prices. validate does need world.json: it re-tags
all pages at increasing spurious-noise levels, reruns consensus and the
full filter pipeline, and scores OBA detection against the ground-truth
ad kinds into performance.json.

Every random draw is seeded by hashing the manifest seed with stable
string labels, so rerunning a manifest reproduces each output file byte
for byte.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import statistics
from dataclasses import dataclass, field, fields as dataclass_fields
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import demo
from .adsim import (
    PersonaSpec,
    SimConfig,
    TagNoise,
    World,
    build_world,
    default_persona_specs,
    _config_from_dict,
    _config_to_dict,
)
from .corpus import AdImpression, ExperimentStore, TagAssignment, WebPage, tag_pages
from .errors import (
    DegenerateSeries,
    EmptyTrainingSet,
    HarvesterFailure,
    InvalidConfig,
    KeyMismatch,
    NoImpressions,
)
from .metrics import (
    PerformanceReport,
    bailp,
    comparison_stats,
    detection_performance,
    ttk,
    value_correlation,
)
from .persona import ConsensusConfig, Persona, consensus_training_keywords
from .pipeline import FilterConfig, apply_filters, build_audience
from .seeding import derive_seed
from .session import SessionConfig, run_session
from .taxonomy import KeywordTaxonomy

# the clean reference profile; not a real persona, excluded from analysis
CLEAN_ID = "__clean__"

# pipeline stage key -> the cumulative filter set it completes
_STAGE_TO_FILTERS = {"r": "r", "sc": "rsc", "dg": "rscdg"}


@dataclass
class Condition:
    """One experiment condition: the session-level context variables."""

    geo: str = "ES"
    dnt: bool = False

    @property
    def cond_id(self) -> str:
        return self.geo + ("+dnt" if self.dnt else "")


def session_label(persona_id: str, cond_id: str, rep: int) -> str:
    return f"{persona_id}|{cond_id}|r{rep}"


@dataclass
class ExperimentManifest:
    """Everything a run needs; serializes to/from manifest.json."""

    experiment_id: str = "experiment"
    seed: int = 0
    n_personas: int = 10
    personas: list[PersonaSpec] = field(default_factory=list)
    conditions: list[Condition] = field(default_factory=lambda: [Condition()])
    repetitions: int = 4
    visit_budget: int = 310
    mean_interval: float = 180.0
    sim: SimConfig = field(default_factory=SimConfig)
    consensus: ConsensusConfig = field(default_factory=ConsensusConfig)
    filters: FilterConfig = field(default_factory=FilterConfig)
    taxonomy: str = "demo"

    def __post_init__(self) -> None:
        if not self.experiment_id:
            raise InvalidConfig("experiment_id must be non-empty")
        if self.repetitions < 1:
            raise InvalidConfig(f"repetitions must be >= 1, got {self.repetitions}")
        if not self.conditions:
            raise InvalidConfig("need at least one condition")
        ids = [c.cond_id for c in self.conditions]
        if len(set(ids)) != len(ids):
            raise InvalidConfig(f"duplicate condition ids: {ids}")
        if self.visit_budget < 1:
            raise InvalidConfig(f"visit_budget must be >= 1, got {self.visit_budget}")
        if self.mean_interval <= 0:
            raise InvalidConfig("mean_interval must be positive")
        if not self.personas and self.n_personas < 1:
            raise InvalidConfig("n_personas must be >= 1")
        for spec in self.personas:
            if spec.id == CLEAN_ID:
                raise InvalidConfig(f"persona id {CLEAN_ID!r} is reserved")

    def persona_specs(self) -> list[PersonaSpec]:
        return list(self.personas) or default_persona_specs(self.n_personas)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentManifest":
        known = {
            "experiment_id", "seed", "n_personas", "personas", "conditions",
            "repetitions", "session", "sim", "consensus", "filters", "taxonomy",
        }
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown manifest keys: {sorted(unknown)}")
        session = dict(data.get("session", {}))
        bad = set(session) - {"visit_budget", "mean_interval"}
        if bad:
            raise InvalidConfig(f"unknown session keys: {sorted(bad)}")
        try:
            personas = [PersonaSpec(**p) for p in data.get("personas", [])]
            conditions = [Condition(**c) for c in data.get("conditions", [])]
        except TypeError as exc:
            raise InvalidConfig(f"bad persona or condition entry: {exc}") from exc
        consensus = dict(data.get("consensus", {}))
        bad = set(consensus) - {"n", "threshold"}
        if bad:
            raise InvalidConfig(f"unknown consensus keys: {sorted(bad)}")
        filt = dict(data.get("filters", {}))
        bad = set(filt) - {"enabled", "t_prime"}
        if bad:
            raise InvalidConfig(f"unknown filter keys: {sorted(bad)}")
        kwargs = {}
        if filt.get("enabled") is not None:
            kwargs["filters"] = filt["enabled"]
        if filt.get("t_prime") is not None:
            kwargs["t_prime"] = filt["t_prime"]
        return cls(
            experiment_id=data.get("experiment_id", "experiment"),
            seed=data.get("seed", 0),
            n_personas=data.get("n_personas", 10),
            personas=personas,
            conditions=conditions or [Condition()],
            repetitions=data.get("repetitions", 4),
            visit_budget=session.get("visit_budget", 310),
            mean_interval=session.get("mean_interval", 180.0),
            sim=_sim_from_dict(data.get("sim", {})),
            consensus=ConsensusConfig(**consensus),
            filters=FilterConfig(**kwargs),
            taxonomy=data.get("taxonomy", "demo"),
        )

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "seed": self.seed,
            "n_personas": self.n_personas,
            "personas": [
                {"id": p.id, "category": p.category, "sensitive": p.sensitive}
                for p in self.personas
            ],
            "conditions": [
                {"geo": c.geo, "dnt": c.dnt} for c in self.conditions
            ],
            "repetitions": self.repetitions,
            "session": {
                "visit_budget": self.visit_budget,
                "mean_interval": self.mean_interval,
            },
            "sim": _config_to_dict(self.sim),
            "consensus": {"n": self.consensus.n, "threshold": self.consensus.threshold},
            "filters": {"enabled": self.filters.filters, "t_prime": self.filters.t_prime},
            "taxonomy": self.taxonomy,
        }


def _sim_from_dict(data: Mapping) -> SimConfig:
    known = {f.name for f in dataclass_fields(SimConfig)}
    unknown = set(data) - known
    if unknown:
        raise InvalidConfig(f"unknown sim keys: {sorted(unknown)}")
    try:
        return _config_from_dict(dict(data))
    except TypeError as exc:
        raise InvalidConfig(f"bad sim section: {exc}") from exc


def load_manifest(path: str | Path) -> ExperimentManifest:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read manifest {path}: {exc}") from exc
    return ExperimentManifest.from_dict(data)


def resolve_taxonomy(spec: str) -> KeywordTaxonomy:
    """'demo' gives the bundled tree; anything else is a file path."""
    if spec == "demo":
        return demo.demo_taxonomy()
    return KeywordTaxonomy.load(spec)


# ---------------------------------------------------------------------------
# simulate


def simulate(manifest: ExperimentManifest, out_dir: str | Path) -> dict:
    """Build the world, run every session, write the corpus directory."""
    taxonomy = resolve_taxonomy(manifest.taxonomy)
    specs = manifest.persona_specs()
    world = build_world(manifest.sim, specs, taxonomy, seed=manifest.seed)

    store = ExperimentStore(out_dir).create()
    # visits/impressions are append-only; a rerun must not double them
    for name in ("visits.jsonl", "impressions.jsonl"):
        p = store.path(name)
        if p.exists():
            p.unlink()

    pages = world.all_pages()
    store.write_pages(pages)
    for source in world.tag_sources():
        store.write_tags(source.name, tag_pages(pages, source))

    persona_by_id = {rec.persona.id: rec.persona for rec in world.personas}
    clean_persona = Persona(
        id=CLEAN_ID, category="weather", sensitive=False, training_pages=[]
    )

    session_rows: list[dict] = []
    n_impressions = 0
    for cond in manifest.conditions:
        for rep in range(manifest.repetitions):
            for spec in specs:
                row = _run_one(
                    store, world, persona_by_id[spec.id], cond, rep,
                    manifest, clean=False,
                )
                session_rows.append(row)
                n_impressions += row["n_impressions"]
        # one clean reference session per condition
        row = _run_one(store, world, clean_persona, cond, 0, manifest, clean=True)
        session_rows.append(row)
        n_impressions += row["n_impressions"]

    store.write_doc("manifest.json", manifest.to_dict())
    store.write_doc("world.json", world.to_dict())
    store.write_doc("personas.json", {
        "personas": [
            {
                "id": rec.persona.id,
                "category": rec.persona.category,
                "sensitive": rec.persona.sensitive,
                "training_pages": [p.url for p in rec.persona.training_pages],
                "attrition": rec.attrition,
            }
            for rec in world.personas
        ],
    })
    store.write_doc("sessions.json", {"sessions": session_rows})
    return {
        "experiment_id": manifest.experiment_id,
        "out": str(store.root),
        "personas": len(specs),
        "conditions": [c.cond_id for c in manifest.conditions],
        "sessions": len(session_rows),
        "pages": len(pages),
        "impressions": n_impressions,
    }


def _run_one(
    store: ExperimentStore,
    world: World,
    persona: Persona,
    cond: Condition,
    rep: int,
    manifest: ExperimentManifest,
    clean: bool,
) -> dict:
    sid = session_label(persona.id, cond.cond_id, rep)
    config = SessionConfig(
        persona_id=persona.id,
        session_id=sid,
        geo=cond.geo,
        dnt=cond.dnt,
        clean_profile=clean,
        visit_budget=manifest.visit_budget,
        mean_interval=manifest.mean_interval,
        seed=derive_seed(manifest.seed, "session", sid),
    )
    try:
        result = run_session(persona, world.control_pages, config, world)
    except HarvesterFailure as exc:
        # keep whatever the session managed to collect, marked incomplete
        if exc.partial is not None:
            store.append_visits(sid, exc.partial.visits)
            store.append_impressions(exc.partial.impressions)
        raise
    store.append_visits(sid, result.visits)
    store.append_impressions(result.impressions)
    return {
        "session": sid,
        "persona": persona.id,
        "condition": cond.cond_id,
        "geo": cond.geo,
        "dnt": cond.dnt,
        "rep": rep,
        "clean": clean,
        "complete": result.complete,
        "visit_mix": result.visit_mix,
        "raw_served": result.raw_served,
        "n_impressions": len(result.impressions),
    }


# ---------------------------------------------------------------------------
# shared corpus loading


@dataclass
class _Corpus:
    """Everything the analysis side needs, loaded once."""

    manifest: ExperimentManifest
    taxonomy: KeywordTaxonomy
    categories: dict[str, str]              # persona id -> category
    training_pages: dict[str, list[WebPage]]
    sessions: list[dict]                    # rows from sessions.json
    imps_by_session: dict[str, list[AdImpression]]
    visited_by_session: dict[str, list[str]]
    tags: dict[str, dict[str, set[str]]]    # source -> url -> keywords

    def persona_ids(self) -> list[str]:
        return sorted(self.categories)

    def sources(self) -> list[str]:
        return sorted(self.tags)

    def condition_ids(self) -> list[str]:
        return [c.cond_id for c in self.manifest.conditions]

    def persona_sessions(self, cond_id: str) -> list[dict]:
        return [
            row for row in self.sessions
            if row["condition"] == cond_id and not row["clean"] and row["complete"]
        ]

    def clean_impressions(self, cond_id: str) -> list[AdImpression] | None:
        rows = [
            row for row in self.sessions
            if row["condition"] == cond_id and row["clean"] and row["complete"]
        ]
        if not rows:
            return None
        out: list[AdImpression] = []
        for row in rows:
            out.extend(self.imps_by_session.get(row["session"], []))
        return out

    def pooled_impressions(self, cond_id: str) -> dict[str, list[AdImpression]]:
        """Persona id -> impressions pooled across repetitions."""
        pooled: dict[str, list[AdImpression]] = {}
        for row in self.persona_sessions(cond_id):
            pooled.setdefault(row["persona"], []).extend(
                self.imps_by_session.get(row["session"], [])
            )
        return pooled


def _load_corpus(root: str | Path) -> _Corpus:
    store = ExperimentStore(root)
    manifest = ExperimentManifest.from_dict(store.load_doc("manifest.json"))
    taxonomy = resolve_taxonomy(manifest.taxonomy)

    personas_doc = store.load_doc("personas.json")
    categories: dict[str, str] = {}
    training_pages: dict[str, list[WebPage]] = {}
    for rec in personas_doc["personas"]:
        categories[rec["id"]] = rec["category"]
        training_pages[rec["id"]] = [
            WebPage(url=u, role="training") for u in rec["training_pages"]
        ]

    sessions = store.load_doc("sessions.json")["sessions"]

    imps_by_session: dict[str, list[AdImpression]] = {}
    for imp in store.load_impressions():
        imps_by_session.setdefault(imp.session_id, []).append(imp)

    visited_by_session: dict[str, list[str]] = {}
    for rec in store.load_visits():
        visited_by_session.setdefault(rec["session"], []).append(rec["url"])

    tags = {src: store.load_tags(src) for src in store.tag_sources()}
    return _Corpus(
        manifest=manifest,
        taxonomy=taxonomy,
        categories=categories,
        training_pages=training_pages,
        sessions=sessions,
        imps_by_session=imps_by_session,
        visited_by_session=visited_by_session,
        tags=tags,
    )


def _consensus_keywords(
    corpus: _Corpus,
    config: ConsensusConfig,
    tags: Mapping[str, Mapping[str, set[str]]] | None = None,
) -> dict[str, dict[str, set[str]]]:
    """Persona id -> source -> retained training keywords."""
    tags = tags if tags is not None else corpus.tags
    out: dict[str, dict[str, set[str]]] = {}
    for pid in corpus.persona_ids():
        persona = Persona(
            id=pid,
            category=corpus.categories[pid],
            training_pages=corpus.training_pages[pid],
        )
        assignments = [
            TagAssignment(url=page.url, source=src, keywords=tags[src].get(page.url, set()))
            for src in sorted(tags)
            for page in persona.training_pages
        ]
        out[pid] = consensus_training_keywords(
            persona, assignments, config, corpus.taxonomy
        )
    return out


def _stage_cells(
    corpus: _Corpus,
    filter_config: FilterConfig,
    audience: Mapping[str, set[str]],
    clean_imps: list[AdImpression] | None,
    row: dict,
) -> tuple[dict[str, list[AdImpression]], dict[str, int]]:
    """Run the pipeline for one session.

    Returns (filter-set name -> survivors, stage attrition counts).
    """
    sid = row["session"]
    result = apply_filters(
        impressions=corpus.imps_by_session.get(sid, []),
        config=filter_config,
        visited_urls=corpus.visited_by_session.get(sid, []),
        clean_impressions=clean_imps,
        persona_id=row["persona"],
        persona_categories=corpus.categories,
        audience=audience,
        taxonomy=corpus.taxonomy,
    )
    staged = {
        _STAGE_TO_FILTERS[stage]: survivors
        for stage, survivors in result.by_stage.items()
    }
    return staged, dict(result.attrition)


# ---------------------------------------------------------------------------
# analyze


def analyze(
    root: str | Path,
    consensus: ConsensusConfig | None = None,
    filters: FilterConfig | None = None,
    cpc_path: str | Path | None = None,
) -> dict:
    """Score the corpus; write report.json and report.csv, return the report."""
    corpus = _load_corpus(root)
    consensus = consensus if consensus is not None else corpus.manifest.consensus
    filters = filters if filters is not None else corpus.manifest.filters

    keywords = _consensus_keywords(corpus, consensus)
    cells: list[dict] = []
    attritions: list[dict] = []
    for cond_id in corpus.condition_ids():
        clean_imps = corpus.clean_impressions(cond_id)
        audience = build_audience(corpus.pooled_impressions(cond_id))
        for row in corpus.persona_sessions(cond_id):
            staged, attrition = _stage_cells(corpus, filters, audience, clean_imps, row)
            attritions.append({
                "session": row["session"],
                "condition": cond_id,
                "attrition": attrition,
            })
            for filter_set in sorted(staged):
                survivors = staged[filter_set]
                for src in corpus.sources():
                    cells.append(_score_cell(
                        corpus, keywords, row, cond_id, filter_set, src, survivors,
                    ))

    summary = _summarize_cells(cells)
    comparisons = _compare_conditions(corpus, cells, filters.filters)
    correlation = _correlate_prices(corpus, cells, filters.filters, cpc_path)

    report = {
        "experiment_id": corpus.manifest.experiment_id,
        "consensus": {"n": consensus.n, "threshold": consensus.threshold},
        "filters": {"enabled": filters.filters, "t_prime": filters.t_prime},
        "conditions": corpus.condition_ids(),
        "sources": corpus.sources(),
        "personas": corpus.persona_ids(),
        "cells": cells,
        "attrition": attritions,
        "summary": summary,
        "comparisons": comparisons,
        "correlation": correlation,
    }
    store = ExperimentStore(root)
    store.write_doc("report.json", report)
    store.path("report.csv").write_text(_summary_csv(summary), encoding="utf-8")
    return report


def _score_cell(
    corpus: _Corpus,
    keywords: Mapping[str, Mapping[str, set[str]]],
    row: dict,
    cond_id: str,
    filter_set: str,
    src: str,
    survivors: list[AdImpression],
) -> dict:
    k_t = keywords[row["persona"]].get(src, set())
    url_tags = corpus.tags[src]
    k_l: set[str] = set()
    records: list[tuple[set[str], int]] = []
    for imp in survivors:
        kws = url_tags.get(imp.landing_page, set())
        k_l |= kws
        records.append((kws, imp.ntimes))

    note = None
    try:
        ttk_value = ttk(k_t, k_l)
    except EmptyTrainingSet:
        ttk_value = None
        note = "empty training keyword set"
    try:
        bailp_value = bailp(k_t, records)
    except NoImpressions:
        bailp_value = None
        note = "no surviving impressions"
    return {
        "persona": row["persona"],
        "source": src,
        "filters": filter_set,
        "condition": cond_id,
        "rep": row["rep"],
        "ttk": ttk_value,
        "bailp": bailp_value,
        "n_impressions": len(survivors),
        "ntimes": sum(imp.ntimes for imp in survivors),
        "note": note,
    }


def _mean_sd(values: Iterable[float | None]) -> tuple[float | None, float | None, int]:
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None, 0
    mean = statistics.fmean(vals)
    sd = statistics.pstdev(vals) if len(vals) > 1 else 0.0
    return mean, sd, len(vals)


def _summarize_cells(cells: list[dict]) -> list[dict]:
    """Average each (condition, persona, source, filter set) over reps."""
    grouped: dict[tuple, list[dict]] = {}
    for cell in cells:
        key = (cell["condition"], cell["persona"], cell["source"], cell["filters"])
        grouped.setdefault(key, []).append(cell)
    rows = []
    for key in sorted(grouped):
        group = grouped[key]
        ttk_mean, ttk_sd, _ = _mean_sd(c["ttk"] for c in group)
        bailp_mean, bailp_sd, n = _mean_sd(c["bailp"] for c in group)
        rows.append({
            "condition": key[0],
            "persona": key[1],
            "source": key[2],
            "filters": key[3],
            "ttk_mean": ttk_mean,
            "ttk_sd": ttk_sd,
            "bailp_mean": bailp_mean,
            "bailp_sd": bailp_sd,
            "reps_used": n,
        })
    return rows


def _summary_csv(summary: list[dict]) -> str:
    columns = [
        "condition", "persona", "source", "filters",
        "ttk_mean", "ttk_sd", "bailp_mean", "bailp_sd", "reps_used",
    ]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in summary:
        writer.writerow({k: ("" if row[k] is None else row[k]) for k in columns})
    return buf.getvalue()


def _persona_bailp(cells: list[dict], filter_set: str, cond_id: str) -> dict[str, float]:
    """Persona id -> mean BAiLP over sources and reps at one filter set."""
    by_pid: dict[str, list[float]] = {}
    for cell in cells:
        if cell["filters"] != filter_set or cell["condition"] != cond_id:
            continue
        if cell["bailp"] is None:
            continue
        by_pid.setdefault(cell["persona"], []).append(cell["bailp"])
    return {pid: statistics.fmean(vals) for pid, vals in sorted(by_pid.items())}


def _compare_conditions(corpus: _Corpus, cells: list[dict], filter_set: str) -> list[dict]:
    """Paired per-persona BAiLP differences for every condition pair."""
    out = []
    for a, b in itertools.combinations(corpus.condition_ids(), 2):
        series_a = _persona_bailp(cells, filter_set, a)
        series_b = _persona_bailp(cells, filter_set, b)
        shared = sorted(set(series_a) & set(series_b))
        entry: dict = {"a": a, "b": b, "filters": filter_set, "n_personas": len(shared)}
        try:
            stats = comparison_stats(
                {k: series_a[k] for k in shared},
                {k: series_b[k] for k in shared},
            )
            entry["diff"] = stats.to_dict()
        except (KeyMismatch, DegenerateSeries) as exc:
            entry["error"] = str(exc)
        out.append(entry)
    return out


def _correlate_prices(
    corpus: _Corpus,
    cells: list[dict],
    filter_set: str,
    cpc_path: str | Path | None,
) -> list[dict] | None:
    """BAiLP against a persona -> price mapping, one entry per condition."""
    if cpc_path is None:
        return None
    try:
        prices = json.loads(Path(cpc_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read price file {cpc_path}: {exc}") from exc
    out = []
    for cond_id in corpus.condition_ids():
        series = _persona_bailp(cells, filter_set, cond_id)
        entry: dict = {"condition": cond_id, "filters": filter_set}
        try:
            rep = value_correlation(series, {k: prices[k] for k in series})
            entry["correlation"] = rep.to_dict()
        except KeyError as exc:
            entry["error"] = f"price file misses persona {exc}"
        except (KeyMismatch, DegenerateSeries) as exc:
            entry["error"] = str(exc)
        out.append(entry)
    return out


def filter_attrition(root: str | Path, filters: FilterConfig | None = None) -> list[dict]:
    """Per-session stage attrition for the chosen filter set, no scoring."""
    corpus = _load_corpus(root)
    filters = filters if filters is not None else corpus.manifest.filters
    out = []
    for cond_id in corpus.condition_ids():
        clean_imps = corpus.clean_impressions(cond_id)
        audience = build_audience(corpus.pooled_impressions(cond_id))
        for row in corpus.persona_sessions(cond_id):
            _, attrition = _stage_cells(corpus, filters, audience, clean_imps, row)
            out.append({
                "session": row["session"],
                "condition": cond_id,
                "attrition": attrition,
            })
    return out


# ---------------------------------------------------------------------------
# validate


def validate(
    root: str | Path,
    spurious_levels: Sequence[float] = (0.0, 0.02, 0.05, 0.1, 0.2, 0.4),
    dropout: float | None = None,
) -> dict:
    """Score ground-truth OBA detection across tag-noise levels.

    Serving, sessions and filter survivorship are fixed by the stored
    corpus; only the tagging is redone per spurious level (dropout held
    constant), then consensus and the keyword match are recomputed. The
    result lands in performance.json.
    """
    corpus = _load_corpus(root)
    store = ExperimentStore(root)
    world = World.from_dict(store.load_doc("world.json"), corpus.taxonomy)
    if dropout is None:
        dropout = corpus.manifest.sim.tag_noise.dropout
    if not spurious_levels:
        raise InvalidConfig("need at least one spurious level")

    pages = world.all_pages()
    filter_config = FilterConfig(filters="rscdg", t_prime=corpus.manifest.filters.t_prime)

    # survivors never depend on tags, so filter once
    survivors_by_session: dict[str, list[AdImpression]] = {}
    pooled: dict[tuple[str, str], list[AdImpression]] = {}
    for cond_id in corpus.condition_ids():
        clean_imps = corpus.clean_impressions(cond_id)
        audience = build_audience(corpus.pooled_impressions(cond_id))
        for row in corpus.persona_sessions(cond_id):
            staged, _ = _stage_cells(corpus, filter_config, audience, clean_imps, row)
            survivors_by_session[row["session"]] = staged["rscdg"]
            pooled.setdefault((cond_id, row["persona"]), []).extend(
                corpus.imps_by_session.get(row["session"], [])
            )

    levels = []
    for spurious in spurious_levels:
        noise = TagNoise(dropout=dropout, spurious=spurious)
        tags = {
            src.name: {p.url: src.keywords_for(p) for p in pages}
            for src in world.tag_sources(noise)
        }
        keywords = _consensus_keywords(corpus, corpus.manifest.consensus, tags)

        detail = []
        total = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
        for cond_id in corpus.condition_ids():
            for pid in sorted({p for c, p in pooled if c == cond_id}):
                imps = pooled[(cond_id, pid)]
                for src in sorted(tags):
                    k_t = keywords[pid].get(src, set())
                    predicted = set()
                    for row in corpus.persona_sessions(cond_id):
                        if row["persona"] != pid:
                            continue
                        for imp in survivors_by_session[row["session"]]:
                            if k_t & tags[src].get(imp.landing_page, set()):
                                predicted.add(imp.key)
                    perf = detection_performance(imps, predicted)
                    for k in total:
                        total[k] += getattr(perf, k)
                    detail.append({
                        "condition": cond_id,
                        "persona": pid,
                        "source": src,
                        **perf.to_dict(),
                    })
        aggregate = PerformanceReport(**total)
        levels.append({
            "spurious": spurious,
            "dropout": dropout,
            "aggregate": aggregate.to_dict(),
            "detail": detail,
        })

    result = {
        "experiment_id": corpus.manifest.experiment_id,
        "dropout": dropout,
        "spurious_levels": list(spurious_levels),
        "clean_profile_pure": _clean_profile_pure(corpus),
        "levels": levels,
    }
    store.write_doc("performance.json", result)
    return result


def _clean_profile_pure(corpus: _Corpus) -> bool:
    """True when no clean session ever received an oba or retargeting ad."""
    for row in corpus.sessions:
        if not row["clean"]:
            continue
        for imp in corpus.imps_by_session.get(row["session"], []):
            if imp.ground_truth in ("oba", "retargeting"):
                return False
    return True


# ---------------------------------------------------------------------------
# report


def digest(root: str | Path) -> str:
    """Human-readable run summary from the stored report files."""
    store = ExperimentStore(root)
    report = store.load_doc("report.json")
    lines = [
        f"experiment {report['experiment_id']}",
        f"personas {len(report['personas'])}  sources {len(report['sources'])}  "
        f"conditions {', '.join(report['conditions'])}",
        f"filters {report['filters']['enabled']}  "
        f"consensus n={report['consensus']['n']} t={report['consensus']['threshold']}",
        "",
    ]
    for cond_id in report["conditions"]:
        lines.append(f"condition {cond_id}")
        for filter_set in sorted({r["filters"] for r in report["summary"]}):
            rows = [
                r for r in report["summary"]
                if r["condition"] == cond_id and r["filters"] == filter_set
            ]
            ttk_mean, _, _ = _mean_sd(r["ttk_mean"] for r in rows)
            bailp_mean, _, _ = _mean_sd(r["bailp_mean"] for r in rows)
            lines.append(
                f"  filters {filter_set:<5}  "
                f"TTK {_fmt(ttk_mean)}  BAiLP {_fmt(bailp_mean)}"
            )
        lines.append("")
    for comp in report.get("comparisons") or []:
        if "diff" in comp:
            d = comp["diff"]
            lines.append(
                f"{comp['a']} vs {comp['b']}: median BAiLP diff {_fmt(d['median'])} "
                f"(IQR {_fmt(d['iqr'])}, n={d['n']})"
            )
        else:
            lines.append(f"{comp['a']} vs {comp['b']}: {comp.get('error')}")
    for corr in report.get("correlation") or []:
        if "correlation" in corr:
            c = corr["correlation"]
            lines.append(
                f"price correlation [{corr['condition']}]: "
                f"spearman {_fmt(c['spearman'])} (p={_fmt(c['spearman_p'])}), "
                f"pearson {_fmt(c['pearson'])} (p={_fmt(c['pearson_p'])})"
            )
        else:
            lines.append(
                f"price correlation [{corr['condition']}]: {corr.get('error')}"
            )

    perf_path = store.path("performance.json")
    if perf_path.exists():
        perf = store.load_doc("performance.json")
        lines.append("")
        lines.append(f"validation (dropout {perf['dropout']}):")
        for level in perf["levels"]:
            agg = level["aggregate"]
            lines.append(
                f"  spurious {level['spurious']:<5}  "
                f"recall {_fmt(agg['recall'])}  accuracy {_fmt(agg['accuracy'])}  "
                f"fpr {_fmt(agg['fpr'])}"
            )
        lines.append(
            "  clean profile pure: " + ("yes" if perf["clean_profile_pure"] else "NO")
        )
    return "\n".join(lines).rstrip() + "\n"


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.3f}"
