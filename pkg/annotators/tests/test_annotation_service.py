import tempfile
from pathlib import Path

from django.test import SimpleTestCase, override_settings

from annotators.domain import ParseStatus
from annotators.services.annotation_service import (
    VerdictLoadError,
    VerdictWriter,
    annotate,
    annotate_all,
    read_verdicts,
    recorded_keys,
)
from annotators.services.backends import MockBackend, OracleBackend
from keyroom.domain import SubgoalEvent, canonical_flags
from keyroom.services.layout import generate_layout
from keyroom.services.search import enumerate_transitions
from keyroom.tests.scenes import key_pickup_transition, move_north_transition
from promptkit.services.composer import compose, get_config

RESPONSES = Path(__file__).parent / "fixtures" / "responses"
CONFIG = get_config("cropped-discover")


def jobs_for(transitions, config=CONFIG):
    return [(compose(config, t), t) for t in transitions]


class AnnotateTest(SimpleTestCase):
    def test_oracle_on_key_pickup(self):
        t = key_pickup_transition()
        verdict = annotate(OracleBackend(), compose(CONFIG, t), t)
        self.assertEqual(verdict.matched_canonical, {"pick up the key": True, "open the door": False})
        self.assertIs(verdict.parse_status, ParseStatus.OK)
        self.assertEqual(verdict.annotator, "Oracle")
        self.assertEqual(verdict.config_name, "cropped-discover")

    def test_oracle_on_plain_move(self):
        t = move_north_transition()
        verdict = annotate(OracleBackend(), compose(CONFIG, t), t)
        self.assertEqual(verdict.matched_canonical, {"pick up the key": False, "open the door": False})

    def test_oracle_matches_ground_truth_on_every_reachable_transition(self):
        transitions = enumerate_transitions(generate_layout(7))
        events = {t.event for t in transitions}
        self.assertEqual(events, set(SubgoalEvent))
        oracle = OracleBackend()
        for t in transitions:
            verdict = annotate(oracle, compose(CONFIG, t), t)
            self.assertEqual(verdict.matched_canonical, canonical_flags(t.event), t.id)

    def test_mixtral_reply_matches_nothing(self):
        t = move_north_transition()
        backend = MockBackend([(RESPONSES / "Mixtral-8x7B-Instruct-v0.1.txt").read_text(encoding="utf-8")])
        verdict = annotate(backend, compose(CONFIG, t), t)
        self.assertIs(verdict.parse_status, ParseStatus.OK)
        self.assertIs(verdict.subgoal_flags["Movement"], True)
        self.assertEqual(verdict.matched_canonical, {"pick up the key": False, "open the door": False})

    def test_unparseable_reply_is_a_verdict(self):
        t = move_north_transition()
        verdict = annotate(MockBackend(["I cannot tell."]), compose(CONFIG, t), t)
        self.assertIs(verdict.parse_status, ParseStatus.UNPARSEABLE)
        self.assertEqual(verdict.subgoal_flags, {})
        self.assertEqual(verdict.raw.text, "I cannot tell.")

    def test_prompt_must_belong_to_transition(self):
        with self.assertRaises(ValueError):
            annotate(OracleBackend(), compose(CONFIG, move_north_transition()), key_pickup_transition())

    @override_settings(CALM_RAW_RESPONSE_CAP=32)
    def test_stored_text_is_capped_but_parsed_in_full(self):
        t = key_pickup_transition()
        reply = "x" * 100 + "\n{'pick up the key': True}"
        verdict = annotate(MockBackend([reply]), compose(CONFIG, t), t)
        self.assertEqual(verdict.raw.text, "x" * 32)
        self.assertIs(verdict.matched_canonical["pick up the key"], True)


class VerdictFileTest(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / "verdicts.jsonl"

    def test_written_verdicts_read_back(self):
        jobs = jobs_for([move_north_transition(), key_pickup_transition()])
        with VerdictWriter(self.path) as writer:
            verdicts, _ = annotate_all(OracleBackend(), jobs, writer=writer)

        loaded = read_verdicts(self.path)

        self.assertEqual(loaded, verdicts)
        self.assertEqual(recorded_keys(self.path), {("Oracle", prompt.prompt_id) for prompt, _ in jobs})

    def test_writer_appends(self):
        jobs = jobs_for([move_north_transition()])
        for _ in range(2):
            with VerdictWriter(self.path) as writer:
                annotate_all(OracleBackend(), jobs, writer=writer)
        self.assertEqual(len(self.path.read_text(encoding="utf-8").splitlines()), 2)

    def test_invalid_record_names_the_line(self):
        self.path.write_text('{"prompt_id": "p"}\n', encoding="utf-8")
        with self.assertRaises(VerdictLoadError) as ctx:
            read_verdicts(self.path)
        self.assertEqual(ctx.exception.lineno, 1)

    def test_broken_json(self):
        self.path.write_text("\n{not json\n", encoding="utf-8")
        with self.assertRaises(VerdictLoadError) as ctx:
            read_verdicts(self.path)
        self.assertEqual(ctx.exception.lineno, 2)


class AnnotateAllTest(SimpleTestCase):
    def setUp(self):
        self.transitions = enumerate_transitions(generate_layout(3))[:40]
        self.jobs = jobs_for(self.transitions)

    def test_parallel_run_keeps_job_order(self):
        sequential, _ = annotate_all(OracleBackend(), self.jobs, parallel=1)
        parallel, tally = annotate_all(OracleBackend(), self.jobs, parallel=4)
        self.assertEqual(parallel, sequential)
        self.assertEqual([v.transition_id for v in parallel], [t.id for t in self.transitions])
        self.assertEqual(tally.prompts, 40)
        self.assertEqual(tally.summary()["parse_status"], {"ok": 40})

    def test_failures_are_collected(self):
        first = self.transitions[0]
        backend = MockBackend({first.id: "{'pick up the key': False}"})
        verdicts, tally = annotate_all(backend, self.jobs[:3], parallel=2)
        self.assertEqual([v.transition_id for v in verdicts], [first.id])
        self.assertEqual(len(tally.failures), 2)
        self.assertEqual(tally.summary()["failed"], 2)

    def test_already_recorded_prompts_are_skipped(self):
        skip = {("Oracle", self.jobs[0][0].prompt_id)}
        verdicts, tally = annotate_all(OracleBackend(), self.jobs[:5], skip_keys=skip)
        self.assertEqual(len(verdicts), 4)
        self.assertEqual(tally.skipped, 1)

    def test_another_annotator_is_not_skipped(self):
        skip = {("Oracle", prompt.prompt_id) for prompt, _ in self.jobs[:5]}
        verdicts, tally = annotate_all(OracleBackend("Second"), self.jobs[:5], skip_keys=skip)
        self.assertEqual(len(verdicts), 5)
        self.assertEqual(tally.skipped, 0)
        self.assertEqual({v.annotator for v in verdicts}, {"Second"})

    def test_token_estimates(self):
        _, tally = annotate_all(OracleBackend(), self.jobs[:1])
        self.assertEqual(tally.prompt_tokens, len(self.jobs[0][0].text) // 4)
