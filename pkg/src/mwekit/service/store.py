"""State and persistence behind the annotation service.

All mutations append one JSON event to an append-only log; in-memory state
is a fold over that log, so restarting the service replays the log and
reproduces the state exactly. A CUPT snapshot of the current gold corpus is
rewritten after every gold-changing event.

Data directory layout:

    config.json     annotators/reviewers with bearer tokens, assignments
    tasks.cupt      the sentences to annotate (tokens and parses only)
    events.jsonl    append-only event log (created on first write)
    gold.cupt       snapshot of the finalized corpus (rewritten, derived)
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path

from ..consistency import (
    CandidateStatus,
    ConsistencyCandidate,
    apply_decisions,
    find_candidates,
    mine_labeled_set,
)
from ..cupt import dumps_cupt, read_cupt
from ..errors import MissingLemma, StaleCandidate
from ..identify import MatchConfig
from ..model import Corpus, GOLD_SOURCE, MweInstance, Sentence

SCHEMA_VERSION = 1
DEFAULT_ROWS = 9


class ServiceError(Exception):
    """An error with an HTTP status code attached."""

    def __init__(self, status_code: int, detail: str):
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail


class AnnotationStore:
    """Tasks, submissions, reviews, and the consistency queue."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self._lock = threading.Lock()

        config_path = self.data_dir / "config.json"
        tasks_path = self.data_dir / "tasks.cupt"
        if not config_path.exists() or not tasks_path.exists():
            raise FileNotFoundError(
                f"{self.data_dir} needs config.json and tasks.cupt"
            )
        self.config = json.loads(config_path.read_text(encoding="utf-8"))
        self.annotators: dict[str, dict] = self.config.get("annotators", {})
        self.reviewers: dict[str, dict] = self.config.get("reviewers", {})
        self.rows_per_sentence = int(self.config.get("rows_per_sentence", DEFAULT_ROWS))
        match = self.config.get("match", {})
        self.match_config = MatchConfig(max_gap=int(match.get("max_gap", 3)))

        with tasks_path.open(encoding="utf-8") as f:
            self.tasks = read_cupt(f)
        self._assignments = self._build_assignments()

        # State folded from the event log.
        self.submissions: dict[tuple[str, str], dict] = {}
        self.finalized: dict[str, dict] = {}
        self.consistency_decisions: dict[str, dict] = {}
        self.consistency_added: dict[str, list[tuple[int, ...]]] = {}
        self.corpus_revision = 0

        self._events_path = self.data_dir / "events.jsonl"
        if self._events_path.exists():
            with self._events_path.open(encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        self._apply(json.loads(line))

    # ------------------------------------------------------------------
    # configuration

    def _build_assignments(self) -> dict[str, tuple[str, str]]:
        raw = self.config.get("assignments", {})
        default = raw.get("default")
        if default is None:
            default = sorted(self.annotators)[:2]
        assignments = {}
        for s in self.tasks.sentences:
            pair = raw.get(s.id, default)
            if len(pair) != 2 or len(set(pair)) != 2:
                raise ValueError(f"task {s.id!r} needs exactly two annotators, got {pair}")
            for name in pair:
                if name not in self.annotators:
                    raise ValueError(f"task {s.id!r} assigned to unknown annotator {name!r}")
            assignments[s.id] = tuple(pair)
        return assignments

    def principal_for_token(self, token: str) -> tuple[str, str] | None:
        """(name, role) for a bearer token; role is annotator or reviewer."""
        for name, entry in self.annotators.items():
            if entry.get("token") == token:
                return name, "annotator"
        for name, entry in self.reviewers.items():
            if entry.get("token") == token:
                return name, "reviewer"
        return None

    def assignment(self, task_id: str) -> tuple[str, str]:
        if task_id not in self._assignments:
            raise ServiceError(404, f"no task {task_id!r}")
        return self._assignments[task_id]

    def task_sentence(self, task_id: str) -> Sentence:
        try:
            return self.tasks.sentence(task_id)
        except KeyError:
            raise ServiceError(404, f"no task {task_id!r}") from None

    # ------------------------------------------------------------------
    # event handling

    def _append_event(self, event: dict) -> None:
        event = {"v": SCHEMA_VERSION, "ts": time.time(), **event}
        with self._events_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(event, sort_keys=True) + "\n")
        self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "submit":
            key = (event["task"], event["annotator"])
            self.submissions[key] = {
                "rows": [list(r) for r in event["rows"]],
                "unclear": bool(event.get("unclear", False)),
                "revision": int(event["revision"]),
            }
        elif kind == "finalize":
            self.finalized[event["task"]] = {
                "gold": [tuple(ix) for ix in event["gold"]],
                "flags": list(event.get("flags", [])),
            }
            self.corpus_revision += 1
        elif kind == "consistency":
            self.consistency_decisions[event["id"]] = {
                "decision": event["decision"],
                "reviewer": event.get("reviewer"),
                "ts": event.get("ts"),
            }
            if event["decision"] == "accept":
                self.consistency_added.setdefault(event["sentence"], []).append(
                    tuple(event["indices"])
                )
                self.corpus_revision += 1
        else:  # unknown events are ignored so old logs stay readable
            pass

    # ------------------------------------------------------------------
    # annotation workflow

    @staticmethod
    def rows_to_instances(rows: list[list[int]]) -> list[tuple[int, ...]]:
        """Checked rows to index tuples; rows with < 2 checks are invalid."""
        instances = []
        for row in rows:
            checked = tuple(sorted(set(row)))
            if not checked:
                continue
            if len(checked) == 1:
                raise ServiceError(422, f"a row with a single check is not an MWE: {row}")
            instances.append(checked)
        return instances

    @staticmethod
    def instances_to_rows(instances: list[tuple[int, ...]]) -> list[list[int]]:
        return [list(ix) for ix in instances]

    def submit_annotation(
        self,
        task_id: str,
        annotator: str,
        rows: list[list[int]],
        *,
        unclear: bool = False,
        base_revision: int = 0,
    ) -> int:
        with self._lock:
            sentence = self.task_sentence(task_id)
            if annotator not in self.assignment(task_id):
                raise ServiceError(403, f"{annotator!r} is not assigned to {task_id!r}")
            if len(rows) > self.rows_per_sentence:
                raise ServiceError(
                    422, f"at most {self.rows_per_sentence} rows per sentence"
                )
            n = len(sentence.tokens)
            for row in rows:
                for position in row:
                    if not 1 <= position <= n:
                        raise ServiceError(422, f"token position {position} out of range")
            self.rows_to_instances(rows)  # single-check validation
            current = self.submissions.get((task_id, annotator), {}).get("revision", 0)
            if base_revision != current:
                raise ServiceError(
                    409, f"revision mismatch: have {current}, submission based on {base_revision}"
                )
            revision = current + 1
            self._append_event({
                "type": "submit",
                "task": task_id,
                "annotator": annotator,
                "rows": [sorted(set(r)) for r in rows],
                "unclear": unclear,
                "revision": revision,
            })
            return revision

    def task_overview(self) -> list[dict]:
        out = []
        for s in self.tasks.sentences:
            pair = self._assignments[s.id]
            out.append({
                "id": s.id,
                "n_tokens": len(s.tokens),
                "annotators": list(pair),
                "status": {
                    a: ("submitted" if (s.id, a) in self.submissions else "pending")
                    for a in pair
                },
                "finalized": s.id in self.finalized,
            })
        return out

    def task_detail(self, task_id: str, principal: str | None = None) -> dict:
        s = self.task_sentence(task_id)
        pair = self.assignment(task_id)
        detail = {
            "id": s.id,
            "tokens": [{"index": t.index, "surface": t.surface} for t in s.tokens],
            "rows_per_sentence": self.rows_per_sentence,
            "annotators": list(pair),
            "finalized": task_id in self.finalized,
        }
        if principal in pair:
            sub = self.submissions.get((task_id, principal))
            detail["mine"] = (
                None if sub is None else
                {"rows": sub["rows"], "unclear": sub["unclear"], "revision": sub["revision"]}
            )
        return detail

    # ------------------------------------------------------------------
    # review

    def merge_for_review(self, task_id: str) -> dict:
        s = self.task_sentence(task_id)
        pair = self.assignment(task_id)
        missing = [a for a in pair if (task_id, a) not in self.submissions]
        if missing:
            raise ServiceError(409, f"annotation pending from {missing}")
        per_annotator = {
            a: set(self.rows_to_instances(self.submissions[(task_id, a)]["rows"]))
            for a in pair
        }
        union = sorted(per_annotator[pair[0]] | per_annotator[pair[1]])
        items = []
        for indices in union:
            sources = [a for a in pair if indices in per_annotator[a]]
            items.append({
                "token_indices": list(indices),
                "annotators": sources,
                "agreement": "both" if len(sources) == 2 else "single",
                "highlight": len(sources) == 1,
            })
        unclear = any(self.submissions[(task_id, a)]["unclear"] for a in pair)
        return {
            "id": task_id,
            "tokens": [{"index": t.index, "surface": t.surface} for t in s.tokens],
            "items": items,
            "unclear": unclear,
            "finalized": task_id in self.finalized,
        }

    def finalize_review(
        self,
        task_id: str,
        verdicts: list[dict],
        added: list[list[int]],
        reviewer: str,
    ) -> dict:
        with self._lock:
            review = self.merge_for_review(task_id)
            verdict_map: dict[tuple[int, ...], str] = {}
            for v in verdicts:
                indices = tuple(sorted(set(v["token_indices"])))
                decision = v["verdict"]
                if decision not in ("keep", "delete"):
                    raise ServiceError(422, f"verdict must be keep or delete: {decision!r}")
                verdict_map[indices] = decision

            union_keys = {tuple(item["token_indices"]) for item in review["items"]}
            for indices in verdict_map:
                if indices not in union_keys:
                    raise ServiceError(422, f"verdict on unknown MWE {list(indices)}")
            for item in review["items"]:
                key = tuple(item["token_indices"])
                if item["highlight"] and key not in verdict_map:
                    raise ServiceError(
                        422, f"highlighted MWE {item['token_indices']} lacks a verdict"
                    )

            n = len(self.task_sentence(task_id).tokens)
            gold = []
            for item in review["items"]:
                key = tuple(item["token_indices"])
                if verdict_map.get(key, "keep") == "keep":
                    gold.append(key)
            for extra in added:
                indices = tuple(sorted(set(extra)))
                if len(indices) < 2:
                    raise ServiceError(422, f"added MWE needs at least two tokens: {extra}")
                if indices[0] < 1 or indices[-1] > n:
                    raise ServiceError(422, f"added MWE out of range: {extra}")
                if indices not in gold:
                    gold.append(indices)
            gold.sort()

            flags = ["unclear"] if review["unclear"] else []
            self._append_event({
                "type": "finalize",
                "task": task_id,
                "reviewer": reviewer,
                "verdicts": [
                    {"token_indices": list(k), "verdict": v} for k, v in sorted(verdict_map.items())
                ],
                "added": [sorted(set(a)) for a in added],
                "gold": [list(ix) for ix in gold],
                "flags": flags,
            })
            self.write_snapshot()
            return {
                "id": task_id,
                "gold": [list(ix) for ix in gold],
                "corpus_revision": self.corpus_revision,
            }

    # ------------------------------------------------------------------
    # gold corpus and consistency queue

    def gold_corpus(self) -> Corpus:
        """Finalized sentences with review gold plus consistency additions."""
        sentences = []
        for s in self.tasks.sentences:
            record = self.finalized.get(s.id)
            if record is None:
                continue
            mwes = [MweInstance(ix, source=GOLD_SOURCE) for ix in record["gold"]]
            mwes.extend(
                MweInstance(ix, source="consistency-added")
                for ix in self.consistency_added.get(s.id, [])
            )
            sentences.append(Sentence(
                id=s.id, tokens=s.tokens, mwes=tuple(mwes),
                flags=frozenset(record.get("flags", [])),
            ))
        return Corpus(tuple(sentences), dict(self.tasks.metadata))

    def write_snapshot(self) -> Path:
        path = self.data_dir / "gold.cupt"
        path.write_text(dumps_cupt(self.gold_corpus()), encoding="utf-8")
        return path

    def _current_candidates(self) -> list[ConsistencyCandidate]:
        corpus = self.gold_corpus()
        try:
            mined = mine_labeled_set(corpus)
            return find_candidates(corpus, mined, self.match_config)
        except MissingLemma as exc:
            raise ServiceError(422, f"tasks need lemmas for the consistency audit: {exc}")

    def list_consistency(self) -> dict:
        pending = [
            c for c in self._current_candidates()
            if c.candidate_id not in self.consistency_decisions
        ]
        return {
            "corpus_revision": self.corpus_revision,
            "candidates": [
                {
                    "id": c.candidate_id,
                    "sentence_id": c.sentence_id,
                    "token_indices": list(c.token_indices),
                    "matched_entry": c.matched_entry,
                    "exemplar": {
                        "sentence_id": c.exemplar[0],
                        "token_indices": list(c.exemplar[1]),
                    },
                    "status": "pending",
                }
                for c in pending
            ],
        }

    def decide_consistency(self, candidate_id: str, decision: str, reviewer: str) -> dict:
        if decision not in ("accept", "reject"):
            raise ServiceError(422, f"decision must be accept or reject: {decision!r}")
        with self._lock:
            previous = self.consistency_decisions.get(candidate_id)
            if previous is not None:
                if previous["decision"] == decision:
                    # Idempotent retry of the same decision.
                    return {"id": candidate_id, "decision": decision,
                            "corpus_revision": self.corpus_revision, "applied": False}
                raise ServiceError(
                    409, f"{candidate_id} already decided: {previous['decision']}"
                )
            match = next(
                (c for c in self._current_candidates() if c.candidate_id == candidate_id),
                None,
            )
            if match is None:
                raise ServiceError(410, f"candidate {candidate_id} is stale")
            if decision == "accept":
                try:  # sanity-check against the current corpus before recording
                    apply_decisions(self.gold_corpus(), [(match, CandidateStatus.ACCEPTED)])
                except StaleCandidate as exc:
                    raise ServiceError(410, str(exc)) from None
            self._append_event({
                "type": "consistency",
                "id": candidate_id,
                "decision": decision,
                "reviewer": reviewer,
                "sentence": match.sentence_id,
                "indices": list(match.token_indices),
                "entry": match.matched_entry,
            })
            if decision == "accept":
                self.write_snapshot()
            return {"id": candidate_id, "decision": decision,
                    "corpus_revision": self.corpus_revision, "applied": decision == "accept"}
