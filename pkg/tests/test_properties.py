import unittest

import hypothesis.strategies as st
from hypothesis import HealthCheck, given, settings

from src.labels import KillL, TauL
from src.lts import ExplorationBounds, explore
from src.sampling import (
    NAMES,
    SAMPLING_BOUNDS,
    VARIABLES,
    check_triple,
    random_ccs_context,
    random_ccs_process,
    random_pi_context,
    random_pi_process,
    random_triple,
)
from src.simulation import sim_k, sim_omega, weak_simulation_gfp
from src.sos import match_pattern, transitions
from src.syntax import ParseError, parse_raw, parse_term, pretty
from src.terms import (
    LEVELS,
    NIL,
    CcsAct,
    Delimit,
    Kill,
    KillerLabel,
    Level,
    Name,
    Nu,
    Par,
    PiIn,
    PiOut,
    Placeholder,
    Polarity,
    Prefix,
    Protected,
    RestrictSet,
    Sum,
    Tau,
    alpha_canonical,
    alpha_equivalent,
    apply_subst,
    erase_holes,
    free_names,
    independent,
    is_closed,
    make_relabel,
    plug,
    profile_for,
    sorted_names,
)

rngs = st.randoms(use_true_random=False)
slow = settings(deadline=None, suppress_health_check=[HealthCheck.too_slow])
small = SAMPLING_BOUNDS.override(max_states=300)

SG_NAMES = (Name("a"), Name("b"))
KILLERS = (KillerLabel("k"), KillerLabel("j"))
SUBSTITUTES = NAMES + (Name("d"),)


def maybe_relabel(rng, term):
    if rng.random() < 0.3:
        return make_relabel(term, {rng.choice(NAMES): rng.choice(SUBSTITUTES)})
    return term


def random_process(rng, calculus):
    if calculus == "ccs":
        return maybe_relabel(rng, random_ccs_process(rng, 4))
    return random_pi_process(rng, 4, calculus == "pimpm")


def closed_process(rng, calculus):
    term = random_process(rng, calculus)
    names = sorted_names(free_names(term))
    if not names:
        return term
    if calculus == "ccs":
        return RestrictSet(frozenset((n, Level.ORDINARY) for n in names), term)
    for name in names:
        term = Nu(name, term)
    return term


def random_sg_process(rng, depth=3):
    if depth <= 0 or rng.random() < 0.15:
        return NIL
    kind = rng.choice(("prefix", "prefix", "tau", "sum", "par", "restrict"))
    if kind == "prefix":
        action = CcsAct(rng.choice(SG_NAMES), rng.choice(list(Polarity)), rng.choice(LEVELS))
        return Prefix(action, random_sg_process(rng, depth - 1))
    if kind == "tau":
        return Prefix(Tau(), random_sg_process(rng, depth - 1))
    if kind == "sum":
        return Sum((random_sg_process(rng, depth - 1), random_sg_process(rng, depth - 1)))
    if kind == "par":
        return Par(random_sg_process(rng, depth - 1), random_sg_process(rng, depth - 1))
    label = (rng.choice(SG_NAMES), rng.choice(LEVELS))
    return RestrictSet(frozenset({label}), random_sg_process(rng, depth - 1))


def random_cows_process(rng, depth=3):
    if depth <= 0 or rng.random() < 0.15:
        return NIL
    kind = rng.choice(("out", "in", "kill", "par", "par", "delimit"))
    if kind == "out":
        return Prefix(PiOut((rng.choice(NAMES),), (rng.choice(NAMES),)), NIL)
    if kind == "in":
        cont = random_cows_process(rng, depth - 1)
        return Prefix(PiIn((rng.choice(NAMES),), (Placeholder(Name("u")),)), cont)
    if kind == "kill":
        return Kill(rng.choice(KILLERS))
    if kind == "par":
        return Par(random_cows_process(rng, depth - 1), random_cows_process(rng, depth - 1))
    return Delimit(KillerLabel("j"), random_cows_process(rng, depth - 1))


def level_of(label):
    return getattr(label, "level", Level.ORDINARY)


class RoundTripProperties(unittest.TestCase):
    @settings(max_examples=400, deadline=None)
    @given(rng=rngs)
    def test_ccs_processes(self, rng):
        term = random_ccs_process(rng, 4)
        self.assertEqual(parse_raw(pretty(term))[0], term)

    @settings(max_examples=300, deadline=None)
    @given(rng=rngs)
    def test_ccs_contexts(self, rng):
        term = random_ccs_context(rng, 4)
        self.assertEqual(parse_raw(pretty(term))[0], term)

    @settings(max_examples=400, deadline=None)
    @given(rng=rngs, mpm=st.booleans())
    def test_pi_processes(self, rng, mpm):
        term = random_pi_process(rng, 4, mpm)
        self.assertEqual(parse_raw(pretty(term))[0], term)

    @settings(max_examples=200, deadline=None)
    @given(rng=rngs)
    def test_pi_contexts(self, rng):
        term = random_pi_context(rng, 3, True)
        self.assertEqual(parse_raw(pretty(term))[0], term)

    @settings(max_examples=200, deadline=None)
    @given(rng=rngs)
    def test_canonical_form_is_idempotent(self, rng):
        once = alpha_canonical(random_pi_process(rng, 4, True))
        self.assertEqual(alpha_canonical(once), once)


class FreenessProperties(unittest.TestCase):
    def _assert_free(self, calculus, rng, closed=False):
        triple = random_triple(rng, calculus, closed)
        if closed and not is_closed(triple.invisible):
            return
        result = check_triple(triple, profile_for(calculus), small)
        self.assertFalse(result.counterexample, triple.to_dict())

    @settings(slow, max_examples=1000)
    @given(rng=rngs)
    def test_ccs(self, rng):
        self._assert_free("ccs", rng)

    @settings(slow, max_examples=500)
    @given(rng=rngs)
    def test_pi_without_match(self, rng):
        self._assert_free("pi", rng)

    @settings(slow, max_examples=500)
    @given(rng=rngs)
    def test_pimpm_with_closed_invisible(self, rng):
        self._assert_free("pimpm", rng, closed=True)


class SimulationProperties(unittest.TestCase):
    @settings(slow, max_examples=200)
    @given(rng=rngs)
    def test_strata_and_fixpoint(self, rng):
        profile = profile_for("ccs")
        bounds = ExplorationBounds(max_states=500)
        lq = explore(random_ccs_process(rng, 3), profile, bounds)
        lp = explore(random_ccs_process(rng, 3), profile, bounds)
        if not (lq.complete and lp.complete):
            return
        limit = sim_omega(lq, lp)
        previous = sim_k(lq, lp, 0).pairs
        for k in range(1, limit.converged_at + 2):
            current = sim_k(lq, lp, k).pairs
            self.assertTrue(current <= previous)
            previous = current
        self.assertEqual(previous, limit.pairs)
        self.assertEqual(weak_simulation_gfp(lq, lp).pairs, limit.pairs)


class NameProperties(unittest.TestCase):
    @settings(max_examples=300, deadline=None)
    @given(rng=rngs, calculus=st.sampled_from(("ccs", "pi", "pimpm")))
    def test_plugging_never_adds_names(self, rng, calculus):
        if calculus == "ccs":
            context = random_ccs_context(rng, 4)
        else:
            context = random_pi_context(rng, 4, calculus == "pimpm")
        filler = random_process(rng, calculus)
        plugged = plug(context, [filler])
        self.assertLessEqual(free_names(plugged), free_names(erase_holes(context)) | free_names(filler))

    @settings(max_examples=300, deadline=None)
    @given(rng=rngs, calculus=st.sampled_from(("ccs", "pi", "pimpm")))
    def test_identity_substitution(self, rng, calculus):
        term = random_process(rng, calculus)
        identity = {name: name for name in free_names(term)}
        identity[Name("zz")] = Name("a")
        self.assertTrue(alpha_equivalent(apply_subst(term, identity), term))

    @settings(max_examples=300, deadline=None)
    @given(rng=rngs, calculus=st.sampled_from(("ccs", "pi", "pimpm")))
    def test_closed_terms_ignore_substitutions(self, rng, calculus):
        term = closed_process(rng, calculus)
        self.assertTrue(is_closed(term))
        mapping = {name: rng.choice(SUBSTITUTES) for name in NAMES}
        self.assertEqual(apply_subst(term, mapping), term)

    @settings(max_examples=300, deadline=None)
    @given(rng=rngs, calculus=st.sampled_from(("ccs", "pi", "pimpm")))
    def test_canonical_form_keeps_free_names(self, rng, calculus):
        term = random_process(rng, calculus)
        canonical = alpha_canonical(term)
        self.assertEqual(free_names(canonical), free_names(term))
        self.assertEqual(alpha_canonical(canonical), canonical)
        self.assertEqual(parse_raw(pretty(canonical))[0], canonical)

    @settings(max_examples=300, deadline=None)
    @given(rng=rngs, calculus=st.sampled_from(("ccs", "pi", "pimpm")))
    def test_independence(self, rng, calculus):
        first = random_process(rng, calculus)
        second = random_process(rng, calculus)
        self.assertEqual(independent(first, second), independent(second, first))
        self.assertEqual(independent(first, first), is_closed(first))


class SemanticsProperties(unittest.TestCase):
    @settings(slow, max_examples=300)
    @given(rng=rngs)
    def test_prioritized_tau_preempts_ordinary_steps(self, rng):
        profile = profile_for("ccs-sg")
        lts = explore(random_sg_process(rng, 4), profile, ExplorationBounds(max_states=300))
        outgoing = {}
        for source, label, _ in lts.edges:
            outgoing.setdefault(source, []).append(label)
        for labels in outgoing.values():
            if any(isinstance(label, TauL) and label.level is Level.PRIORITIZED for label in labels):
                self.assertTrue(all(level_of(label) is Level.PRIORITIZED for label in labels), labels)

    @settings(slow, max_examples=300)
    @given(rng=rngs)
    def test_kills_are_eager(self, rng):
        profile = profile_for("cows")
        killer = KillerLabel("k")
        body = random_cows_process(rng, 4)
        inner = transitions(body, profile)
        outer = transitions(Delimit(killer, body), profile)
        if any(step.label == KillL(killer) for step in inner):
            self.assertTrue(outer)
            for step in outer:
                self.assertEqual(step.label, TauL())
                self.assertEqual(transitions(step.target, profile), frozenset())
        else:
            self.assertEqual({s.label for s in outer}, {s.label for s in inner})

    @settings(max_examples=300, deadline=None)
    @given(rng=rngs, width=st.integers(min_value=1, max_value=2))
    def test_synchronization_follows_pattern_matching(self, rng, width):
        profile = profile_for("pimpm")
        subject = tuple(rng.choice(NAMES) for _ in range(rng.choice((1, 2))))
        payload = tuple(rng.choice(NAMES) for _ in range(rng.choice((1, 2))))
        pattern = tuple(
            Protected(rng.choice(NAMES)) if rng.random() < 0.5 else Placeholder(VARIABLES[i])
            for i in range(width)
        )
        placeholders = tuple(item.name for item in pattern if isinstance(item, Placeholder))
        cont = Prefix(PiOut((Name("c"),), placeholders or (Name("a"),)), NIL)
        term = Par(Prefix(PiOut(subject, payload), NIL), Prefix(PiIn(subject, pattern), cont))
        taus = [step for step in transitions(term, profile) if step.label == TauL()]
        sigma = match_pattern(pattern, payload)
        if sigma is None:
            self.assertEqual(taus, [])
        else:
            self.assertEqual(len(taus), 1)
            self.assertTrue(alpha_equivalent(taus[0].target, Par(NIL, apply_subst(cont, sigma))))


class DiagnosticProperties(unittest.TestCase):
    @settings(max_examples=400, deadline=None)
    @given(
        rng=rngs,
        calculus=st.sampled_from(("ccs", "pi", "pimpm")),
        edit=st.sampled_from(("insert", "delete")),
        char=st.sampled_from(tuple("().|+!?<>[]{}',:=_\\/0#@ xé")),
    )
    def test_spans_stay_inside_the_input(self, rng, calculus, edit, char):
        src = pretty(random_process(rng, calculus))
        at = rng.randrange(len(src) + 1)
        if edit == "insert":
            src = src[:at] + char + src[at:]
        else:
            src = src[:at] + src[at + 1:]
        try:
            parse_term(src, profile_for(calculus))
        except ParseError as exc:
            size = len(src.encode("utf-8"))
            self.assertTrue(exc.diagnostics)
            for diagnostic in exc.diagnostics:
                self.assertLessEqual(0, diagnostic.span.start)
                self.assertLessEqual(diagnostic.span.start, diagnostic.span.end)
                self.assertLessEqual(diagnostic.span.end, size)


if __name__ == "__main__":
    unittest.main()
