import json
import threading

import pytest
from fastapi.testclient import TestClient

from litmetrics.annotate import Session, create_app, create_session
from litmetrics.errors import DuplicateJudgmentError, SessionError
from litmetrics.evalharness import tally_judgments
from litmetrics.textcore import SegmentRecord, tokenize

SYSTEMS = ("alpha-nmt", "beta-llm")


def make_records(n):
    records = []
    for k in range(n):
        records.append(
            SegmentRecord(
                id=f"seg{k:04d}",
                src_lang="en",
                tgt_lang="de",
                source=tokenize(f"Source sentence number {k}.", "en"),
                translations={
                    SYSTEMS[0]: tokenize(f"Wortgetreue Fassung {k}.", "de"),
                    SYSTEMS[1]: tokenize(f"Freie Fassung {k}.", "de"),
                },
            )
        )
    return records


class TestCreateSession:
    def test_sample_size(self):
        session = create_session(make_records(1000), SYSTEMS, 100, seed=1)
        assert session.total == 100
        assert len({t.segment_id for t in session.tasks}) == 100

    def test_deterministic_for_seed(self):
        records = make_records(300)
        s1 = create_session(records, SYSTEMS, 50, seed=9)
        s2 = create_session(records, SYSTEMS, 50, seed=9)
        assert [t.segment_id for t in s1.tasks] == [t.segment_id for t in s2.tasks]
        assert [t.assignment for t in s1.tasks] == [t.assignment for t in s2.tasks]

    def test_insufficient_records_rejected(self):
        with pytest.raises(SessionError, match="need 100"):
            create_session(make_records(50), SYSTEMS, 100)

    def test_requires_two_distinct_systems(self):
        with pytest.raises(SessionError):
            create_session(make_records(10), ("a", "a"), 5)
        with pytest.raises(SessionError):
            create_session(make_records(10), ("a",), 5)

    def test_side_assignment_balanced_over_seed_sweep(self):
        # 10 sessions x 100 tasks; aggregate left-side count for system A
        # has binomial(1000, 1/2) distribution, checked at ~3.2 sigma.
        records = make_records(150)
        left_a = 0
        for seed in range(10):
            session = create_session(records, SYSTEMS, 100, seed=seed)
            left_a += sum(
                1 for t in session.tasks if t.assignment["left"] == SYSTEMS[0]
            )
        assert 450 <= left_a <= 550

    def test_task_payload_hides_systems(self):
        session = create_session(make_records(20), SYSTEMS, 10, seed=0)
        for task in session.tasks:
            payload = json.dumps(task.client_payload())
            assert SYSTEMS[0] not in payload
            assert SYSTEMS[1] not in payload


class TestJudgmentFlow:
    def test_next_task_order(self):
        session = create_session(make_records(10), SYSTEMS, 5, seed=2)
        task = session.next_task("ann1")
        assert task.index == 0
        session.submit_judgment(task.task_id, "left", "ann1")
        assert session.next_task("ann1").index == 1

    def test_done_marker_when_finished(self):
        session = create_session(make_records(6), SYSTEMS, 3, seed=2)
        for _ in range(3):
            task = session.next_task("ann1")
            session.submit_judgment(task.task_id, "equal", "ann1")
        assert session.next_task("ann1") is None

    def test_resolution_follows_assignment(self):
        session = create_session(make_records(40), SYSTEMS, 20, seed=3)
        for task in session.tasks:
            judgment = session.submit_judgment(task.task_id, "left", "ann1")
            expected = (
                "system_a" if task.assignment["left"] == SYSTEMS[0] else "system_b"
            )
            assert judgment.resolved == expected

    def test_equal_resolves_to_equal(self):
        session = create_session(make_records(5), SYSTEMS, 2, seed=1)
        judgment = session.submit_judgment(session.tasks[0].task_id, "equal", "x")
        assert judgment.resolved == "equal"

    def test_duplicate_rejected(self):
        session = create_session(make_records(5), SYSTEMS, 2, seed=1)
        task_id = session.tasks[0].task_id
        session.submit_judgment(task_id, "left", "ann1")
        with pytest.raises(DuplicateJudgmentError, match="already judged"):
            session.submit_judgment(task_id, "right", "ann1")

    def test_second_annotator_not_blocked(self):
        session = create_session(make_records(5), SYSTEMS, 2, seed=1)
        task_id = session.tasks[0].task_id
        session.submit_judgment(task_id, "left", "ann1")
        judgment = session.submit_judgment(task_id, "right", "ann2")
        assert judgment.annotator == "ann2"

    def test_unknown_task_rejected(self):
        session = create_session(make_records(5), SYSTEMS, 2, seed=1)
        with pytest.raises(SessionError, match="unknown task"):
            session.submit_judgment("main:9999", "left", "ann1")

    def test_invalid_choice_rejected(self):
        session = create_session(make_records(5), SYSTEMS, 2, seed=1)
        with pytest.raises(SessionError, match="invalid choice"):
            session.submit_judgment(session.tasks[0].task_id, "both", "ann1")

    def test_tally_delegates(self):
        session = create_session(make_records(30), SYSTEMS, 10, seed=4)
        for k, task in enumerate(session.tasks):
            choice = ["left", "right", "equal"][k % 3]
            session.submit_judgment(task.task_id, choice, "ann1")
        assert session.tally() == tally_judgments(session.judgments())

    def test_two_annotators_interleaving(self):
        session = create_session(make_records(60), SYSTEMS, 30, seed=5)
        seen = {"a1": [], "a2": []}
        errors = []

        def work(annotator):
            try:
                while True:
                    task = session.next_task(annotator)
                    if task is None:
                        return
                    session.submit_judgment(task.task_id, "left", annotator)
                    seen[annotator].append(task.task_id)
            except Exception as e:  # pragma: no cover
                errors.append(e)

        threads = [threading.Thread(target=work, args=(a,)) for a in seen]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        all_ids = [t.task_id for t in session.tasks]
        assert sorted(seen["a1"]) == sorted(all_ids)
        assert sorted(seen["a2"]) == sorted(all_ids)
        assert len(session.judgments()) == 60


class TestPersistence:
    def test_replay_reconstructs_state(self, tmp_path):
        records = make_records(20)
        session = create_session(records, SYSTEMS, 10, seed=6,
                                 storage_dir=tmp_path / "s")
        for task in session.tasks[:4]:
            session.submit_judgment(task.task_id, "right", "ann1")

        reloaded = Session.load(tmp_path / "s")
        assert reloaded.total == 10
        assert len(reloaded.judgments()) == 4
        assert {j.task_id for j in reloaded.judgments()} == \
            {t.task_id for t in session.tasks[:4]}
        assert reloaded.tally() == session.tally()

    def test_restart_rejects_resubmission(self, tmp_path):
        # Simulates a crash after the append but before the client saw the
        # ack: the replayed log must refuse the duplicate.
        records = make_records(10)
        session = create_session(records, SYSTEMS, 5, seed=7,
                                 storage_dir=tmp_path / "s")
        task_id = session.tasks[0].task_id
        session.submit_judgment(task_id, "left", "ann1")
        del session

        reloaded = Session.load(tmp_path / "s")
        with pytest.raises(DuplicateJudgmentError):
            reloaded.submit_judgment(task_id, "left", "ann1")
        assert reloaded.next_task("ann1").index == 1

    def test_assignment_table_persisted(self, tmp_path):
        session = create_session(make_records(10), SYSTEMS, 5, seed=8,
                                 storage_dir=tmp_path / "s")
        rows = [
            json.loads(line)
            for line in (tmp_path / "s" / "tasks.jsonl").read_text().splitlines()
        ]
        assert len(rows) == 5
        for row, task in zip(rows, session.tasks):
            assert row["assignment"] == task.assignment

    def test_missing_session_rejected(self, tmp_path):
        with pytest.raises(SessionError, match="no session"):
            Session.load(tmp_path / "nothing")


@pytest.fixture
def client(tmp_path):
    records = make_records(40)
    session = create_session(records, SYSTEMS, 12, seed=11,
                             storage_dir=tmp_path / "sess")
    app = create_app({session.session_id: session})
    return TestClient(app), session


class TestHTTPAPI:
    def test_next_task_payload(self, client):
        http, session = client
        resp = http.get("/api/session/main/next", params={"annotator": "ann1"})
        assert resp.status_code == 200
        body = resp.json()
        assert set(body) == {"task_id", "source", "left", "right", "progress"}
        assert body["progress"] == {"done": 0, "total": 12}

    def test_submit_and_advance(self, client):
        http, session = client
        first = http.get("/api/session/main/next",
                         params={"annotator": "a"}).json()
        resp = http.post("/api/judgment", json={
            "task_id": first["task_id"], "annotator": "a", "choice": "left",
        })
        assert resp.status_code == 200
        second = http.get("/api/session/main/next",
                          params={"annotator": "a"}).json()
        assert second["task_id"] != first["task_id"]
        assert second["progress"]["done"] == 1

    def test_duplicate_judgment_409(self, client):
        http, session = client
        task = session.tasks[0]
        body = {"task_id": task.task_id, "annotator": "a", "choice": "left"}
        assert http.post("/api/judgment", json=body).status_code == 200
        resp = http.post("/api/judgment", json=body)
        assert resp.status_code == 409
        assert "already judged" in resp.json()["error"]

    def test_unknown_task_404(self, client):
        http, _ = client
        resp = http.post("/api/judgment", json={
            "task_id": "nosuch:0001", "annotator": "a", "choice": "left",
        })
        assert resp.status_code == 404

    def test_unknown_session_404(self, client):
        http, _ = client
        resp = http.get("/api/session/zzz/next", params={"annotator": "a"})
        assert resp.status_code == 404

    def test_tally_endpoint(self, client):
        http, session = client
        for task in session.tasks:
            http.post("/api/judgment", json={
                "task_id": task.task_id, "annotator": "a", "choice": "equal",
            })
        resp = http.get("/api/session/main/tally")
        assert resp.json()["equal"] == 12
        assert resp.json()["n"] == 12

    def test_no_response_contains_system_names(self, client):
        http, session = client
        bodies = []
        annotator = "scanner"
        while True:
            resp = http.get("/api/session/main/next",
                            params={"annotator": annotator})
            bodies.append(resp.text)
            body = resp.json()
            if body.get("done"):
                break
            post = http.post("/api/judgment", json={
                "task_id": body["task_id"], "annotator": annotator,
                "choice": "left",
            })
            bodies.append(post.text)
        bodies.append(http.get("/api/session/main/tally").text)
        bodies.append(http.get("/config.json").text)
        for text in bodies:
            for name in SYSTEMS:
                assert name not in text

    def test_config_endpoint(self, client):
        http, _ = client
        assert http.get("/config.json").json() == {"apiBase": "", "session": "main"}

    def test_fallback_index(self, client):
        http, _ = client
        resp = http.get("/")
        assert resp.status_code == 200
        assert "Annotation server" in resp.text
