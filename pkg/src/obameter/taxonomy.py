"""Keyword taxonomy with Leacock-Chodorow similarity.

A taxonomy is a single-rooted tree of keyword senses. Similarity between
two keywords k and l is

    S(k, l) = -ln(pathlen(k, l) / (2 * D))

where pathlen counts the NODES on the shortest undirected path between the
senses (an identical keyword has pathlen 1, a parent-child pair 2) and D is
the maximum depth of the tree, the root sitting at depth 1. The maximum
score ln(2 * D) therefore depends on the tree; the bundled demo tree has
D = 19 and a maximum of ln 38, about 3.6376.

Keywords may carry several senses. The file format marks senses with a
`#<n>` suffix on the node token (`bass#1`, `bass#2`); the suffix is not
part of the keyword text. Similarity over multi-sense keywords is the
maximum over sense pairs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import TaxonomyError, UnknownKeyword

_WS = re.compile(r"[\s_]+")
_SENSE = re.compile(r"^(?P<text>.+)#(?P<n>\d+)$")

ROOT_MARKER = "-"


def normalize_keyword(text: str) -> str:
    """Canonical keyword form: lowercase, separators unified.

    Runs of whitespace and underscores collapse to a single space and the
    result is stripped. Idempotent by construction.
    """
    return _WS.sub(" ", text.lower()).strip()


def _split_sense(token: str) -> tuple[str, str]:
    """Return (node_id, keyword_text) for a file token."""
    m = _SENSE.match(token)
    text = m.group("text") if m else token
    return token.strip(), normalize_keyword(text)


@dataclass
class KeywordTaxonomy:
    """Single-rooted sense tree with similarity queries."""

    parent: dict[str, str | None]          # node id -> parent id (root -> None)
    depth: dict[str, int]                  # node id -> depth, root at 1
    senses: dict[str, list[str]]           # keyword text -> node ids
    root: str
    max_depth: int = field(init=False)

    def __post_init__(self) -> None:
        self.max_depth = max(self.depth.values())

    # size of the sense tree, not of the keyword vocabulary
    def __len__(self) -> int:
        return len(self.parent)

    @property
    def max_score(self) -> float:
        """Largest attainable similarity, ln(2 * D)."""
        return math.log(2 * self.max_depth)

    def __contains__(self, keyword: str) -> bool:
        return normalize_keyword(keyword) in self.senses

    def _require(self, keyword: str) -> list[str]:
        norm = normalize_keyword(keyword)
        try:
            return self.senses[norm]
        except KeyError:
            raise UnknownKeyword(f"keyword not in taxonomy: {keyword!r}") from None

    def pathlen(self, k: str, l: str) -> int:
        """Shortest node count over all sense pairs of k and l."""
        best: int | None = None
        for a in self._require(k):
            for b in self._require(l):
                n = self._pair_pathlen(a, b)
                if best is None or n < best:
                    best = n
        assert best is not None
        return best

    def _pair_pathlen(self, a: str, b: str) -> int:
        da, db = self.depth[a], self.depth[b]
        ra, rb = a, b
        while da > db:
            ra = self.parent[ra]
            da -= 1
        while db > da:
            rb = self.parent[rb]
            db -= 1
        while ra != rb:
            ra = self.parent[ra]
            rb = self.parent[rb]
            da -= 1
        return self.depth[a] + self.depth[b] - 2 * da + 1

    def lc_similarity(self, k: str, l: str) -> float:
        """Leacock-Chodorow score, the maximum over sense pairs.

        Raises UnknownKeyword when either keyword has no sense node.
        """
        return -math.log(self.pathlen(k, l) / (2 * self.max_depth))

    def similar(self, k: str, l: str, threshold: float) -> bool:
        """True iff lc_similarity(k, l) is strictly above the threshold."""
        return self.lc_similarity(k, l) > threshold

    def similar_or_exact(self, k: str, l: str, threshold: float) -> bool:
        """Similarity test with the exact-match fallback.

        When both keywords are in the taxonomy this is `similar`. When
        either is absent it degrades to equality of the normalized texts,
        independent of the threshold.
        """
        if k in self and l in self:
            return self.similar(k, l, threshold)
        return normalize_keyword(k) == normalize_keyword(l)

    def keywords(self) -> list[str]:
        """All keyword texts, sorted."""
        return sorted(self.senses)

    @classmethod
    def from_edges(cls, pairs: list[tuple[str, str]]) -> "KeywordTaxonomy":
        """Build from (child_token, parent_token) pairs, one per node.

        The root declares itself with the parent token "-". Rejects
        duplicate nodes, multiple roots, unknown parents, and cycles, each
        with a diagnostic naming the offending node.
        """
        parent: dict[str, str | None] = {}
        root: str | None = None
        texts: dict[str, str] = {}
        for child_tok, parent_tok in pairs:
            node, text = _split_sense(child_tok)
            if not text:
                raise TaxonomyError(f"empty keyword text in node {child_tok!r}")
            if node in parent:
                raise TaxonomyError(f"duplicate node declaration: {node!r}")
            if parent_tok == ROOT_MARKER:
                if root is not None:
                    raise TaxonomyError(
                        f"multiple roots: {root!r} and {node!r}"
                    )
                root = node
                parent[node] = None
            else:
                parent[node] = parent_tok
            texts[node] = text
        if root is None:
            raise TaxonomyError("no root declared (expected a '<node>\\t-' line)")
        for node, par in parent.items():
            if par is not None and par not in parent:
                raise TaxonomyError(
                    f"node {node!r} names unknown parent {par!r} "
                    "(second root or typo)"
                )

        # depth assignment doubles as the cycle check
        depth: dict[str, int] = {root: 1}
        for node in parent:
            chain = []
            cur = node
            while cur not in depth:
                if cur in chain:
                    raise TaxonomyError(f"cycle through node {cur!r}")
                chain.append(cur)
                cur = parent[cur]
            d = depth[cur]
            for back in reversed(chain):
                d += 1
                depth[back] = d

        senses: dict[str, list[str]] = {}
        for node in parent:
            senses.setdefault(texts[node], []).append(node)
        for nodes in senses.values():
            nodes.sort()
        return cls(parent=parent, depth=depth, senses=senses, root=root)

    @classmethod
    def loads(cls, text: str) -> "KeywordTaxonomy":
        """Parse the tab-separated edge format.

        One `child<TAB>parent` line per node, `<root><TAB>-` for the root.
        Blank lines and lines starting with '#' are skipped.
        """
        pairs: list[tuple[str, str]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise TaxonomyError(
                    f"line {lineno}: expected 'child<TAB>parent', got {raw!r}"
                )
            pairs.append((parts[0].strip(), parts[1].strip()))
        return cls.from_edges(pairs)

    @classmethod
    def load(cls, path: str | Path) -> "KeywordTaxonomy":
        return cls.loads(Path(path).read_text(encoding="utf-8"))
