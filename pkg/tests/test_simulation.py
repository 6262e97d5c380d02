import unittest

from src.lts import ExplorationBounds
from src.simulation import (
    IncompleteLtsError,
    distinguishing_depth,
    distinguishing_moves,
    explore_pair,
    format_moves,
    sim_k,
    sim_omega,
    weak_simulation_gfp,
)
from src.syntax import parse_term
from src.terms import profile_for


def pair(q, p, calculus="ccs", bounds=None):
    profile = profile_for(calculus)
    return explore_pair(
        parse_term(q, profile),
        parse_term(p, profile),
        profile,
        bounds or ExplorationBounds(),
    )


class StratumTests(unittest.TestCase):
    def test_stratum_zero_is_full_product(self):
        lq, lp = pair("a.0 | 'a.0", "b.0")
        self.assertEqual(len(sim_k(lq, lp, 0).pairs), 4 * 2)

    def test_strata_shrink(self):
        lq, lp = pair("a.a.a.0", "a.a.0")
        previous = sim_k(lq, lp, 0).pairs
        for k in range(1, 5):
            current = sim_k(lq, lp, k).pairs
            self.assertTrue(current <= previous)
            previous = current
        self.assertTrue(sim_k(lq, lp, 2).holds_at_roots(lq, lp))
        self.assertFalse(sim_k(lq, lp, 3).holds_at_roots(lq, lp))

    def test_negative_stratum(self):
        lq, lp = pair("0", "0")
        with self.assertRaises(ValueError):
            sim_k(lq, lp, -1)


class OmegaTests(unittest.TestCase):
    def test_nil_is_simulated_by_anything(self):
        lq, lp = pair("0", "a.0")
        self.assertTrue(sim_omega(lq, lp).holds_at_roots(lq, lp))
        self.assertIsNone(distinguishing_depth(lq, lp))
        self.assertEqual(distinguishing_moves(lq, lp), [])

    def test_different_actions(self):
        lq, lp = pair("a.0", "b.0")
        self.assertFalse(sim_omega(lq, lp).holds_at_roots(lq, lp))
        self.assertEqual(distinguishing_depth(lq, lp), 1)
        self.assertEqual(format_moves(distinguishing_moves(lq, lp)), ["a"])

    def test_difference_after_one_step(self):
        lq, lp = pair("a.a.0", "a.b.0")
        self.assertEqual(distinguishing_depth(lq, lp), 2)
        self.assertEqual(format_moves(distinguishing_moves(lq, lp)), ["a", "a"])

    def test_internal_steps_are_weak(self):
        lq, lp = pair("tau.a.0", "a.0")
        self.assertTrue(sim_omega(lq, lp).holds_at_roots(lq, lp))
        lq, lp = pair("a.0", "tau.a.0")
        self.assertTrue(sim_omega(lq, lp).holds_at_roots(lq, lp))

    def test_choice_is_not_simulated_by_commitment(self):
        lq, lp = pair("a.b.0 + a.c.0", "a.b.0")
        self.assertFalse(sim_omega(lq, lp).holds_at_roots(lq, lp))
        lq, lp = pair("a.b.0", "a.b.0 + a.c.0")
        self.assertTrue(sim_omega(lq, lp).holds_at_roots(lq, lp))

    def test_convergence_index(self):
        lq, lp = pair("0", "0")
        relation = sim_omega(lq, lp)
        self.assertEqual(relation.converged_at, 0)
        self.assertEqual(relation.to_dict()["k"], "omega")

    def test_name_passing_context(self):
        lq, lp = pair(
            "(new x)(x?(a).[a=b] 'y<c> | x!<b>)",
            "(new x)(x?(a).0 | x!<b>)",
            "pi",
        )
        self.assertFalse(sim_omega(lq, lp).holds_at_roots(lq, lp))
        self.assertEqual(distinguishing_depth(lq, lp), 2)
        self.assertEqual(format_moves(distinguishing_moves(lq, lp)), ["tau", "y!<c>"])

    def test_shared_input_universe(self):
        lq, lp = pair("a?(x).0", "a?(x).0 + b?(y).0", "pi")
        self.assertEqual(lq.universe, lp.universe)
        self.assertTrue(sim_omega(lq, lp).holds_at_roots(lq, lp))


class GreatestFixpointTests(unittest.TestCase):
    CASES = [
        ("a.0", "b.0"),
        ("a.a.0", "a.b.0"),
        ("tau.a.0 + b.0", "a.0 + b.0"),
        ("a.0 | 'a.0", "(a.0 | 'a.0)\\{a}"),
        ("(a.0 | 'a.0)\\{a}", "tau.0"),
    ]

    def test_agrees_with_limit(self):
        for q, p in self.CASES:
            with self.subTest(q=q, p=p):
                lq, lp = pair(q, p)
                self.assertEqual(weak_simulation_gfp(lq, lp).pairs, sim_omega(lq, lp).pairs)


class IncompleteTests(unittest.TestCase):
    def test_incomplete_side_is_reported(self):
        lq, lp = pair("!a.0", "0", bounds=ExplorationBounds(max_bang_unfold=1))
        with self.assertRaises(IncompleteLtsError) as caught:
            sim_omega(lq, lp)
        self.assertEqual(caught.exception.side, "Q")
        self.assertEqual(caught.exception.bounds_hit, ["max_bang_unfold"])

    def test_gfp_needs_complete_lts(self):
        lq, lp = pair("0", "!a.0", bounds=ExplorationBounds(max_bang_unfold=1))
        with self.assertRaises(IncompleteLtsError) as caught:
            weak_simulation_gfp(lq, lp)
        self.assertEqual(caught.exception.side, "P")


if __name__ == "__main__":
    unittest.main()
