from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from mwekit.cupt import dumps_cupt
from mwekit.model import Corpus
from mwekit.service import AnnotationStore, create_app

from .helpers import sent

ALICE = {"Authorization": "Bearer tok-alice"}
BOB = {"Authorization": "Bearer tok-bob"}
REVIEWER = {"Authorization": "Bearer tok-rev"}


def tasks_corpus():
    return Corpus((
        sent("t1", ["thought/think", "I/I", "would/would", "give/give", "it/it",
                    "a/a", "try/try", "and/and", "saved/save"]),
        sent("t2", ["Would/would", "recomend/recomend", "giving/give", "this/this",
                    "a/a", "try/try", "./."]),
    ))


CONFIG = {
    "schema_version": 1,
    "rows_per_sentence": 9,
    "annotators": {
        "alice": {"token": "tok-alice"},
        "bob": {"token": "tok-bob"},
    },
    "reviewers": {"rania": {"token": "tok-rev"}},
    "assignments": {"default": ["alice", "bob"]},
}


@pytest.fixture()
def data_dir(tmp_path):
    (tmp_path / "config.json").write_text(json.dumps(CONFIG), encoding="utf-8")
    (tmp_path / "tasks.cupt").write_text(dumps_cupt(tasks_corpus()), encoding="utf-8")
    return tmp_path


@pytest.fixture()
def client(data_dir):
    return TestClient(create_app(data_dir))


def submit(client, task, annotator, rows, headers, *, unclear=False, base_revision=0):
    return client.put(
        f"/tasks/{task}/annotations/{annotator}",
        json={"schema_version": 1, "rows": rows, "unclear": unclear,
              "base_revision": base_revision},
        headers=headers,
    )


class TestAuth:
    def test_unknown_token_is_401(self, client):
        response = client.get("/tasks", headers={"Authorization": "Bearer nope"})
        assert response.status_code == 401

    def test_missing_token_is_401(self, client):
        assert client.get("/tasks").status_code == 401

    def test_annotator_cannot_submit_for_someone_else(self, client):
        response = submit(client, "t1", "bob", [[1, 2]], ALICE)
        assert response.status_code == 403

    def test_reviewer_endpoints_reject_annotators(self, client):
        assert client.get("/tasks/t1/review", headers=ALICE).status_code == 403
        assert client.get("/consistency", headers=ALICE).status_code == 403


class TestSubmit:
    def test_two_rows_become_two_mwes(self, client):
        response = submit(client, "t1", "alice", [[2, 3], [5, 7]], ALICE)
        assert response.status_code == 200
        assert response.json()["revision"] == 1
        submit(client, "t1", "bob", [[2, 3], [5, 7]], BOB)
        review = client.get("/tasks/t1/review", headers=REVIEWER).json()
        assert [item["token_indices"] for item in review["items"]] == [[2, 3], [5, 7]]

    def test_single_check_row_is_422(self, client):
        assert submit(client, "t1", "alice", [[4]], ALICE).status_code == 422

    def test_out_of_range_position_is_422(self, client):
        assert submit(client, "t1", "alice", [[1, 99]], ALICE).status_code == 422

    def test_too_many_rows_is_422(self, client):
        rows = [[1, 2]] * 10
        assert submit(client, "t1", "alice", rows, ALICE).status_code == 422

    def test_double_submit_gets_exactly_one_409(self, client):
        # Two clients build on revision 0; the slower one must get 409.
        first = submit(client, "t1", "alice", [[2, 3]], ALICE, base_revision=0)
        second = submit(client, "t1", "alice", [[5, 7]], ALICE, base_revision=0)
        assert [first.status_code, second.status_code] == [200, 409]

    def test_resubmission_supersedes(self, client):
        submit(client, "t1", "alice", [[2, 3]], ALICE, base_revision=0)
        response = submit(client, "t1", "alice", [[5, 7]], ALICE, base_revision=1)
        assert response.status_code == 200
        assert response.json()["revision"] == 2
        detail = client.get("/tasks/t1", headers=ALICE).json()
        assert detail["mine"]["rows"] == [[5, 7]]

    def test_unknown_task_is_404(self, client):
        assert submit(client, "nope", "alice", [[1, 2]], ALICE).status_code == 404

    def test_rows_roundtrip_through_store(self, data_dir):
        store = AnnotationStore(data_dir)
        rows = [[2, 3], [5, 7, 9]]
        instances = store.rows_to_instances(rows)
        assert store.instances_to_rows(instances) == rows


class TestReview:
    def test_pending_annotator_blocks_review(self, client):
        submit(client, "t1", "alice", [[2, 3]], ALICE)
        assert client.get("/tasks/t1/review", headers=REVIEWER).status_code == 409

    def test_identical_annotations_all_agree(self, client):
        submit(client, "t1", "alice", [[4, 6, 7]], ALICE)
        submit(client, "t1", "bob", [[4, 6, 7]], BOB)
        review = client.get("/tasks/t1/review", headers=REVIEWER).json()
        assert all(item["agreement"] == "both" for item in review["items"])
        assert all(not item["highlight"] for item in review["items"])

    def test_disjoint_annotations_all_highlighted(self, client):
        submit(client, "t1", "alice", [[2, 3]], ALICE)
        submit(client, "t1", "bob", [[5, 7]], BOB)
        review = client.get("/tasks/t1/review", headers=REVIEWER).json()
        assert all(item["highlight"] for item in review["items"])

    def test_partial_overlap_matches_set_union(self, client):
        alice_rows = [[4, 6, 7], [1, 2]]
        bob_rows = [[4, 6, 7], [8, 9]]
        submit(client, "t1", "alice", alice_rows, ALICE)
        submit(client, "t1", "bob", bob_rows, BOB)
        review = client.get("/tasks/t1/review", headers=REVIEWER).json()
        expected_union = sorted({(4, 6, 7), (1, 2), (8, 9)})
        assert [tuple(i["token_indices"]) for i in review["items"]] == expected_union
        flags = {tuple(i["token_indices"]): i["agreement"] for i in review["items"]}
        assert flags[(4, 6, 7)] == "both"
        assert flags[(1, 2)] == "single" and flags[(8, 9)] == "single"

    def test_unclear_propagates(self, client):
        submit(client, "t1", "alice", [[2, 3]], ALICE, unclear=True)
        submit(client, "t1", "bob", [[2, 3]], BOB)
        review = client.get("/tasks/t1/review", headers=REVIEWER).json()
        assert review["unclear"] is True


class TestFinalize:
    def _submit_both(self, client):
        submit(client, "t1", "alice", [[4, 6, 7], [1, 2]], ALICE)
        submit(client, "t1", "bob", [[4, 6, 7]], BOB)

    def test_keep_all_gold_is_union(self, client):
        self._submit_both(client)
        response = client.post(
            "/tasks/t1/finalize",
            json={"schema_version": 1,
                  "verdicts": [{"token_indices": [1, 2], "verdict": "keep"}]},
            headers=REVIEWER,
        )
        assert response.status_code == 200
        assert response.json()["gold"] == [[1, 2], [4, 6, 7]]

    def test_unverdicted_highlight_is_422(self, client):
        self._submit_both(client)
        response = client.post(
            "/tasks/t1/finalize",
            json={"schema_version": 1, "verdicts": []},
            headers=REVIEWER,
        )
        assert response.status_code == 422

    def test_delete_all_plus_add_one(self, client):
        self._submit_both(client)
        response = client.post(
            "/tasks/t1/finalize",
            json={"schema_version": 1,
                  "verdicts": [
                      {"token_indices": [1, 2], "verdict": "delete"},
                      {"token_indices": [4, 6, 7], "verdict": "delete"},
                  ],
                  "added": [[8, 9]]},
            headers=REVIEWER,
        )
        assert response.json()["gold"] == [[8, 9]]

    def test_refinalize_idempotent(self, client):
        self._submit_both(client)
        body = {"schema_version": 1,
                "verdicts": [{"token_indices": [1, 2], "verdict": "keep"}]}
        first = client.post("/tasks/t1/finalize", json=body, headers=REVIEWER).json()
        second = client.post("/tasks/t1/finalize", json=body, headers=REVIEWER).json()
        assert first["gold"] == second["gold"]

    def test_verdict_on_unknown_mwe_is_422(self, client):
        self._submit_both(client)
        response = client.post(
            "/tasks/t1/finalize",
            json={"schema_version": 1,
                  "verdicts": [{"token_indices": [1, 2], "verdict": "keep"},
                               {"token_indices": [2, 9], "verdict": "keep"}]},
            headers=REVIEWER,
        )
        assert response.status_code == 422


def finalize_gold(client, task, gold_rows, *, annotate=True):
    if annotate:
        submit(client, task, "alice", gold_rows, ALICE)
        submit(client, task, "bob", gold_rows, BOB)
    return client.post(f"/tasks/{task}/finalize",
                       json={"schema_version": 1, "verdicts": []},
                       headers=REVIEWER)


class TestConsistency:
    def _setup_give_try(self, client):
        assert finalize_gold(client, "t1", [[4, 6, 7]]).status_code == 200
        assert finalize_gold(client, "t2", []).status_code == 200

    def test_queue_lists_candidate(self, client):
        self._setup_give_try(client)
        queue = client.get("/consistency", headers=REVIEWER).json()
        assert len(queue["candidates"]) == 1
        cand = queue["candidates"][0]
        assert cand["sentence_id"] == "t2"
        assert cand["token_indices"] == [3, 5, 6]
        assert cand["matched_entry"] == "give_a_try"
        assert cand["exemplar"] == {"sentence_id": "t1", "token_indices": [4, 6, 7]}

    def test_queue_order_stable_across_calls(self, client):
        self._setup_give_try(client)
        first = client.get("/consistency", headers=REVIEWER).json()
        second = client.get("/consistency", headers=REVIEWER).json()
        assert first["candidates"] == second["candidates"]

    def test_accept_increments_corpus_revision(self, client):
        self._setup_give_try(client)
        queue = client.get("/consistency", headers=REVIEWER).json()
        before = queue["corpus_revision"]
        cand_id = queue["candidates"][0]["id"]
        response = client.post(
            "/consistency",
            json={"schema_version": 1, "id": cand_id, "decision": "accept"},
            headers=REVIEWER,
        )
        assert response.status_code == 200
        assert response.json()["corpus_revision"] == before + 1
        after = client.get("/consistency", headers=REVIEWER).json()
        assert after["candidates"] == []

    def test_reject_leaves_corpus_unchanged(self, client, data_dir):
        self._setup_give_try(client)
        queue = client.get("/consistency", headers=REVIEWER).json()
        cand_id = queue["candidates"][0]["id"]
        snapshot_before = (data_dir / "gold.cupt").read_text(encoding="utf-8")
        response = client.post(
            "/consistency",
            json={"schema_version": 1, "id": cand_id, "decision": "reject"},
            headers=REVIEWER,
        )
        assert response.status_code == 200
        assert queue["corpus_revision"] == response.json()["corpus_revision"]
        assert (data_dir / "gold.cupt").read_text(encoding="utf-8") == snapshot_before
        assert client.get("/consistency", headers=REVIEWER).json()["candidates"] == []

    def test_retry_same_decision_is_idempotent(self, client):
        self._setup_give_try(client)
        cand_id = client.get("/consistency", headers=REVIEWER).json()["candidates"][0]["id"]
        body = {"schema_version": 1, "id": cand_id, "decision": "accept"}
        first = client.post("/consistency", json=body, headers=REVIEWER)
        retry = client.post("/consistency", json=body, headers=REVIEWER)
        assert first.status_code == retry.status_code == 200
        assert first.json()["corpus_revision"] == retry.json()["corpus_revision"]

    def test_unknown_candidate_is_410(self, client):
        self._setup_give_try(client)
        response = client.post(
            "/consistency",
            json={"schema_version": 1, "id": "t9:1-2", "decision": "accept"},
            headers=REVIEWER,
        )
        assert response.status_code == 410


class TestConfigValidation:
    def test_default_rows_per_sentence_is_nine(self, tmp_path):
        config = {k: v for k, v in CONFIG.items() if k != "rows_per_sentence"}
        (tmp_path / "config.json").write_text(json.dumps(config), encoding="utf-8")
        (tmp_path / "tasks.cupt").write_text(dumps_cupt(tasks_corpus()), encoding="utf-8")
        assert AnnotationStore(tmp_path).rows_per_sentence == 9

    def test_exactly_two_annotators_enforced(self, tmp_path):
        config = dict(CONFIG, assignments={"default": ["alice"]})
        (tmp_path / "config.json").write_text(json.dumps(config), encoding="utf-8")
        (tmp_path / "tasks.cupt").write_text(dumps_cupt(tasks_corpus()), encoding="utf-8")
        with pytest.raises(ValueError, match="exactly two"):
            AnnotationStore(tmp_path)

    def test_unknown_assignee_rejected(self, tmp_path):
        config = dict(CONFIG, assignments={"default": ["alice", "zebra"]})
        (tmp_path / "config.json").write_text(json.dumps(config), encoding="utf-8")
        (tmp_path / "tasks.cupt").write_text(dumps_cupt(tasks_corpus()), encoding="utf-8")
        with pytest.raises(ValueError, match="unknown annotator"):
            AnnotationStore(tmp_path)


class TestReplay:
    def test_restart_reproduces_snapshot_bytes(self, client, data_dir):
        submit(client, "t1", "alice", [[4, 6, 7], [1, 2]], ALICE)
        submit(client, "t1", "bob", [[4, 6, 7]], BOB, unclear=True)
        client.post("/tasks/t1/finalize",
                    json={"schema_version": 1,
                          "verdicts": [{"token_indices": [1, 2], "verdict": "delete"}]},
                    headers=REVIEWER)
        finalize_gold(client, "t2", [])
        cand = client.get("/consistency", headers=REVIEWER).json()["candidates"][0]
        client.post("/consistency",
                    json={"schema_version": 1, "id": cand["id"], "decision": "accept"},
                    headers=REVIEWER)

        snapshot = (data_dir / "gold.cupt").read_text(encoding="utf-8")
        reloaded = AnnotationStore(data_dir)
        assert dumps_cupt(reloaded.gold_corpus()) == snapshot
        assert reloaded.corpus_revision == 3
        assert reloaded.submissions[("t1", "alice")]["rows"] == [[4, 6, 7], [1, 2]]

    def test_event_log_is_append_only_jsonl(self, client, data_dir):
        submit(client, "t1", "alice", [[2, 3]], ALICE)
        submit(client, "t1", "alice", [[2, 3], [5, 7]], ALICE, base_revision=1)
        lines = (data_dir / "events.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 2
        events = [json.loads(line) for line in lines]
        assert [e["revision"] for e in events] == [1, 2]
