"""Test-suite profiling and grammar-version comparison.

Suites are one item per line (`id TAB expected TAB sentence`); a leading
`*` on the sentence marks it ungrammatical by convention.  Profiles are
stored as versioned JSON so different grammar versions can be compared
offline, in the store-then-compare style of treebank profiling tools.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from . import chart, coaching, morph
from .errors import InputError

PROFILE_SCHEMA = "gramcoach-profile/1"

EXPECTATIONS = ("grammatical", "ungrammatical", "learner")


@dataclass(frozen=True)
class TestItem:
    identifier: str
    sentence: str  # star stripped
    expected: str
    starred: bool = False


def load_suite(text):
    items = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InputError(f"suite line {lineno}: expected id\\texpected\\tsentence")
        identifier, expected, sentence = (p.strip() for p in parts)
        starred = sentence.startswith("*")
        if starred:
            sentence = sentence[1:].strip()
        if expected == "-":
            expected = "ungrammatical" if starred else "grammatical"
        if expected not in EXPECTATIONS:
            raise InputError(f"suite line {lineno}: unknown expectation {expected!r}")
        if starred and expected == "grammatical":
            raise InputError(f"suite line {lineno}: starred sentence marked grammatical")
        if not sentence:
            raise InputError(f"suite line {lineno}: empty sentence")
        if identifier in seen:
            raise InputError(f"suite line {lineno}: duplicate id {identifier}")
        seen.add(identifier)
        items.append(TestItem(identifier, sentence, expected, starred))
    if not items:
        raise InputError("suite is empty")
    return items


def render_suite(items):
    lines = []
    for item in items:
        sentence = ("*" if item.starred else "") + item.sentence
        lines.append(f"{item.identifier}\t{item.expected}\t{sentence}")
    return "\n".join(lines) + "\n"


@dataclass
class Profile:
    version_label: str
    records: dict  # id -> per-item record
    aggregates: dict

    def to_json(self):
        return json.dumps(
            {
                "schema": PROFILE_SCHEMA,
                "version_label": self.version_label,
                "records": self.records,
                "aggregates": self.aggregates,
            },
            sort_keys=True,
            indent=2,
        ) + "\n"

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if data.get("schema") != PROFILE_SCHEMA:
            raise InputError(f"not a {PROFILE_SCHEMA} file")
        return cls(data["version_label"], data["records"], data["aggregates"])


def _verdict_for(result):
    if not result.readings:
        return coaching.NO_PARSE
    best = coaching.select_reading(result)
    return coaching.LEARNER if best.learner_uses else coaching.GRAMMATICAL


def run_profile(suite, grammar, opts=None):
    """One record per item; deterministic apart from wall_time.  A crash
    while parsing an item is recorded as an error verdict and the run
    continues."""
    if not suite:
        raise InputError("empty suite")
    records = {}
    for item in suite:
        tokens = [t.text for t in morph.tokenize(item.sentence)]
        started = time.perf_counter()
        try:
            result = chart.parse(tokens, grammar, opts)
            record = {
                "sentence": item.sentence,
                "expected": item.expected,
                "readings": len(result.readings),
                "edges_built": result.stats.edges_built,
                "unification_attempts": result.stats.unification_attempts,
                "verdict": _verdict_for(result),
                "wall_time": time.perf_counter() - started,
            }
        except Exception as exc:  # keep profiling the rest of the suite
            record = {
                "sentence": item.sentence,
                "expected": item.expected,
                "readings": 0,
                "edges_built": 0,
                "unification_attempts": 0,
                "verdict": "error",
                "error": str(exc),
                "wall_time": time.perf_counter() - started,
            }
        records[item.identifier] = record
    return Profile(grammar.version_label, records, compute_aggregates(records))


def compute_aggregates(records):
    total = len(records)
    covered = [r for r in records.values() if r["readings"] > 0]
    ungrammatical = [r for r in records.values() if r["expected"] == "ungrammatical"]
    over = [r for r in ungrammatical if r["readings"] > 0]
    coverage = 100.0 * len(covered) / total if total else 0.0
    overgeneration = (
        100.0 * len(over) / len(ungrammatical) if ungrammatical else 0.0
    )
    mean_readings = (
        sum(r["readings"] for r in covered) / len(covered) if covered else 0.0
    )
    return {
        "items": total,
        "coverage_pct": coverage,
        "overgeneration_pct": overgeneration,
        "mean_readings_covered": mean_readings,
    }


@dataclass
class Comparison:
    left_version: str
    right_version: str
    item_deltas: dict  # id -> {readings, edges_built, unification_attempts}
    verdict_changes: list  # (id, left verdict, right verdict)
    regressions: list  # ids that matched expectation on the left only
    aggregate_deltas: dict

    def render(self):
        lines = [
            f"profiles: {self.left_version} -> {self.right_version}",
            f"{'item':<12} {'d-readings':>10} {'d-edges':>10} {'d-attempts':>11}  verdict",
        ]
        for item_id in sorted(self.item_deltas):
            d = self.item_deltas[item_id]
            change = next(
                (f"{a} -> {b}" for i, a, b in self.verdict_changes if i == item_id),
                "",
            )
            lines.append(
                f"{item_id:<12} {d['readings']:>10} {d['edges_built']:>10} "
                f"{d['unification_attempts']:>11}  {change}"
            )
        for key in sorted(self.aggregate_deltas):
            lines.append(f"{key:>45}: {self.aggregate_deltas[key]:+.3f}")
        if self.regressions:
            lines.append(f"regressions: {', '.join(sorted(self.regressions))}")
        return "\n".join(lines)


def compare_profiles(left, right):
    """Per-item and aggregate deltas (right minus left); items whose
    verdict changed are listed, and regressions are items that matched
    their expectation on the left but not on the right."""
    missing = sorted(set(left.records) ^ set(right.records))
    if missing:
        raise InputError(f"profiles cover different suites; mismatched ids: {missing}")
    item_deltas = {}
    verdict_changes = []
    regressions = []
    for item_id in left.records:
        a, b = left.records[item_id], right.records[item_id]
        item_deltas[item_id] = {
            "readings": b["readings"] - a["readings"],
            "edges_built": b["edges_built"] - a["edges_built"],
            "unification_attempts": b["unification_attempts"] - a["unification_attempts"],
        }
        if a["verdict"] != b["verdict"]:
            verdict_changes.append((item_id, a["verdict"], b["verdict"]))
        expected = a["expected"]
        if _matches(a, expected) and not _matches(b, expected):
            regressions.append(item_id)
    aggregate_deltas = {
        key: right.aggregates[key] - left.aggregates[key]
        for key in left.aggregates
        if isinstance(left.aggregates[key], (int, float))
    }
    return Comparison(
        left.version_label,
        right.version_label,
        item_deltas,
        verdict_changes,
        regressions,
        aggregate_deltas,
    )


def _matches(record, expected):
    verdict = record["verdict"]
    if expected == "grammatical":
        return verdict == coaching.GRAMMATICAL
    if expected == "ungrammatical":
        return verdict == coaching.NO_PARSE
    return verdict == coaching.LEARNER


def strip_wall_time(profile_json):
    """Profiles compare byte-identically once wall_time fields are
    dropped; this utility does the dropping."""
    data = json.loads(profile_json)
    for record in data.get("records", {}).values():
        record.pop("wall_time", None)
    return json.dumps(data, sort_keys=True, indent=2) + "\n"
