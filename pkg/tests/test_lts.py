import json
import unittest
from pathlib import Path
from unittest.mock import patch

import jsonschema

from src.labels import parse_label_pattern
from src.lts import (
    ExplorationBounds,
    can_perform,
    explore,
    invisible_in,
    is_invisible,
    is_visible,
    labels_of,
    reachable_states,
    to_dot,
    to_graph,
    to_json_dict,
    visible_in,
    weak_reach,
)
from src.syntax import parse_term
from src.terms import TermError, profile_for

LTS_SCHEMA = Path(__file__).resolve().parents[1] / "schemas" / "lts.schema.json"


def build(src, calculus="ccs", bounds=None):
    profile = profile_for(calculus)
    return explore(parse_term(src, profile), profile, bounds or ExplorationBounds())


class ExploreTests(unittest.TestCase):
    def test_nil(self):
        lts = build("0")
        self.assertEqual(len(lts.states), 1)
        self.assertEqual(lts.edges, [])
        self.assertTrue(lts.complete)

    def test_parallel_with_synchronization(self):
        lts = build("a.0 | 'a.0")
        self.assertEqual(len(lts.states), 4)
        self.assertEqual(len(lts.edges), 5)
        self.assertTrue(lts.complete)
        self.assertEqual(lts.expanded, {0, 1, 2, 3})

    def test_replication_hits_unfold_bound(self):
        lts = build("!a.0", bounds=ExplorationBounds(max_bang_unfold=2))
        self.assertFalse(lts.complete)
        self.assertIn("max_bang_unfold", lts.bounds_hit)

    def test_state_bound(self):
        lts = build("a.0 | b.0 | c.0", bounds=ExplorationBounds(max_states=3))
        self.assertEqual(len(lts.states), 3)
        self.assertEqual(lts.bounds_hit, {"max_states"})

    def test_state_indices_are_deterministic(self):
        first = to_json_dict(build("(a.0 | 'a.0)\\{a} + b.0"))
        second = to_json_dict(build("(a.0 | 'a.0)\\{a} + b.0"))
        self.assertEqual(first, second)

    def test_contexts_are_rejected(self):
        with self.assertRaises(TermError):
            build("a.[_1]")

    def test_bounds_from_env(self):
        with patch.dict("os.environ", {"REPFREE_MAX_STATES": "7", "REPFREE_MAX_DEPTH": "x"}):
            bounds = ExplorationBounds.from_env()
        self.assertEqual(bounds.max_states, 7)
        self.assertEqual(bounds.max_depth, 64)

    def test_bounds_must_be_positive(self):
        with self.assertRaises(ValueError):
            ExplorationBounds(max_states=0)


class WeakReachTests(unittest.TestCase):
    def test_tau_chain(self):
        lts = build("tau.tau.a.0")
        self.assertEqual(len(weak_reach(lts, lts.root)), 3)

    def test_visible_edge_stops(self):
        lts = build("a.tau.0")
        self.assertEqual(weak_reach(lts, lts.root), {lts.root})


class VisibilityTests(unittest.TestCase):
    def test_restricted_input_and_match(self):
        verdict = visible_in(build("(new x)(x?(a).[a=b] 'y<c> | x!<b>)", "pi"))
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.printed_trace(), ["tau", "y!<c>"])

    def test_stuck_after_communication(self):
        lts = build("(new x)(x?(a).0 | x!<b>)", "pi")
        self.assertEqual(len(weak_reach(lts, lts.root)), 2)
        self.assertTrue(visible_in(lts).fails)
        self.assertTrue(invisible_in(lts).holds)

    def test_invisible_processes(self):
        for src, calculus in (
            ("[a=b] 'y<c>", "pi"),
            ("(new z)(z:a!<d> | z:b?(w).y!<c>)", "pimpm"),
            ("(new z)(z!<a> | z?(@b).y!<c>)", "pimpm"),
            ("(a.0 | 'a.0)\\{a}", "ccs"),
        ):
            with self.subTest(src=src):
                profile = profile_for(calculus)
                self.assertTrue(is_invisible(parse_term(src, profile), profile).holds)

    def test_visible_prefix(self):
        profile = profile_for("ccs")
        self.assertTrue(is_visible(parse_term("a.0", profile), profile).holds)

    def test_kill_killed_invoke(self):
        self.assertTrue(visible_in(build("[k](0 | a!<n>)", "cows")).holds)
        self.assertTrue(visible_in(build("[k](kill(k) | a!<n>)", "cows")).fails)

    def test_prioritized_restriction(self):
        verdict = visible_in(build("(_a.0 | 0)\\{_a} + 'b.0", "ccs-sg"))
        self.assertEqual(verdict.printed_trace(), ["'b"])

    def test_depth_bound_gives_unknown(self):
        lts = build("tau.tau.tau.a.0", bounds=ExplorationBounds(max_depth=2))
        verdict = visible_in(lts)
        self.assertTrue(verdict.unknown)
        self.assertEqual(verdict.reason, "max_depth")
        self.assertTrue(invisible_in(lts).unknown)

    def test_unexplored_branch_does_not_matter_once_found(self):
        lts = build("a.0 + tau.tau.tau.0", bounds=ExplorationBounds(max_depth=1))
        self.assertTrue(visible_in(lts).holds)

    def test_can_perform(self):
        profile = profile_for("pi")
        term = parse_term("(new x)(x?(a).[a=b] 'y<c> | x!<b>)", profile)
        self.assertTrue(can_perform(term, profile, None, parse_label_pattern("y!<c>")).holds)
        self.assertTrue(can_perform(term, profile, None, parse_label_pattern("y!<b>")).fails)

    def test_can_perform_polarity(self):
        profile = profile_for("ccs")
        term = parse_term("a.0", profile)
        self.assertTrue(can_perform(term, profile, None, parse_label_pattern("'a")).fails)
        self.assertTrue(can_perform(term, profile, None, parse_label_pattern("a")).holds)


class ExportTests(unittest.TestCase):
    def test_json_shape(self):
        data = to_json_dict(build("[k](kill(k) | a!<n>)", "cows"))
        self.assertEqual(len(data["states"]), 2)
        self.assertEqual(data["edges"], [{"src": 0, "label": "tau", "dst": 1}])
        self.assertTrue(data["complete"])
        self.assertEqual(data["bounds_hit"], [])
        json.dumps(data)

    def test_exports_validate_against_schema(self):
        schema = json.loads(LTS_SCHEMA.read_text(encoding="utf-8"))
        cases = [
            ("[k](kill(k) | a!<n>)", "cows", None),
            ("(a.0 | 'a.0)\\{a} + b.0", "ccs", None),
            ("!a.0", "ccs", ExplorationBounds(max_bang_unfold=2)),
            ("a.0 | b.0 | c.0", "ccs", ExplorationBounds(max_states=3)),
        ]
        for src, calculus, bounds in cases:
            with self.subTest(term=src):
                jsonschema.validate(to_json_dict(build(src, calculus, bounds)), schema)

    def test_dot_marks_root(self):
        text = to_dot(build("a.0"))
        self.assertIn("digraph", text)
        self.assertIn("doublecircle", text)
        self.assertIn("complete=true", text)

    def test_graph_view(self):
        lts = build("a.0 | 'a.0")
        graph = to_graph(lts)
        self.assertEqual(graph.number_of_nodes(), 4)
        self.assertEqual(graph.number_of_edges(), 5)
        self.assertEqual(reachable_states(lts), {0, 1, 2, 3})
        self.assertEqual(len(labels_of(lts)), 3)


if __name__ == "__main__":
    unittest.main()
