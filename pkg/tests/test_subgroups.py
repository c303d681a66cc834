import itertools
import random

import pytest

from braidpke.braid import BraidWord, compose, equals, random_word
from braidpke.subgroups import (
    ConjugacyInstance,
    DcsTuple,
    PreconditionError,
    SampleLengths,
    SearchBudgetExceeded,
    SplitParams,
    Verdict,
    _enumerate_reduced,
    brute_force_conjugacy_search,
    commute_check,
    conjugacy_decision_bounded,
    conjugate,
    dcs_sample,
    sample_left,
    sample_right,
)
from oracles import same_element


def W(n, *letters):
    return BraidWord(n, letters)


def test_split_params_index_sets():
    for l, r in itertools.product(range(2, 7), repeat=2):
        p = SplitParams(l, r)
        left, right = set(p.left_generators), set(p.right_generators)
        assert not left & right
        assert l not in left | right
        assert left | right | {l} == set(range(1, p.n))
        assert min(abs(i - j) for i in left for j in right) >= 2
    with pytest.raises(PreconditionError):
        SplitParams(1, 3)


def test_sample_left_and_right():
    rng = random.Random(0)
    assert set(sample_left(SplitParams(2, 2), 3, rng).letters) <= {1, -1}
    assert sample_left(SplitParams(5, 5), 0, rng).letters == ()
    assert set(sample_right(SplitParams(2, 2), 3, rng).letters) <= {3, -3}
    assert {abs(e) for e in sample_right(SplitParams(3, 3), 5, rng).letters} <= {4, 5}
    p = SplitParams(4, 4)
    for _ in range(1000):
        assert all(abs(e) <= 3 for e in sample_left(p, 10, rng).letters)
        assert all(5 <= abs(e) <= 7 for e in sample_right(p, 10, rng).letters)


def test_conjugate_examples():
    g = W(3, 2, -1)
    assert conjugate(BraidWord.identity(3), g) == g
    assert equals(conjugate(W(3, 1), W(3, 1)), W(3, 1))
    c = conjugate(W(3, 1), W(3, 2))
    assert equals(c, W(3, 1, 2, -1))
    found = brute_force_conjugacy_search(ConjugacyInstance.full(W(3, 2), c, 1))
    assert found is not None and len(found) == 1


def test_conjugation_is_an_action():
    rng = random.Random(1)
    for _ in range(100):
        a, b, g = (random_word(6, 8, rng) for _ in range(3))
        lhs = conjugate(a, conjugate(b, g))
        assert equals(lhs, conjugate(compose(a, b), g))
        assert same_element(lhs, conjugate(compose(a, b), g))


def test_commute_check():
    assert commute_check(SplitParams(2, 2), W(4, 1), W(4, 3))
    with pytest.raises(PreconditionError):
        commute_check(SplitParams(2, 2), W(4, 1), W(4, 2))
    p = SplitParams(5, 5)
    rng = random.Random(2)
    for _ in range(500):
        x = sample_left(p, rng.randrange(21), rng)
        y = sample_right(p, rng.randrange(21), rng)
        assert commute_check(p, x, y)


def test_dcs_tuples():
    p = SplitParams(5, 5)
    rng = random.Random(3)
    lengths = SampleLengths(12, 12, 12, 12)
    for real in (True, False):
        for _ in range(100):
            t = dcs_sample(p, real, lengths, rng)
            assert t.label is real
            assert equals(t.g2, conjugate(t.x, t.g1))
            assert equals(t.g3, conjugate(t.y, t.g1))
            if real:
                assert equals(t.g4, conjugate(compose(t.x, t.y), t.g1))
                # g4 = y g2 y⁻¹ as used by the DCS distinguisher simulation
                assert equals(t.g4, conjugate(t.y, t.g2))
            else:
                assert equals(t.g4, conjugate(t.z, t.g1))
    t = dcs_sample(p, True, lengths, rng, x=BraidWord.identity(10))
    assert equals(t.g4, t.g3)


def test_dcs_tuple_text_dump():
    t = dcs_sample(SplitParams(3, 3), True, SampleLengths(4, 4, 4, 4), random.Random(4))
    text = t.dumps()
    assert text.splitlines()[0].startswith("g1:B6:")
    assert text.splitlines()[-1] == "label:D"
    back = DcsTuple.loads(text)
    assert back.public == t.public and back.label


def test_brute_force_examples():
    g = W(4, 1, -2, 3)
    assert brute_force_conjugacy_search(ConjugacyInstance.full(g, g, 0)) == BraidWord.identity(4)
    assert brute_force_conjugacy_search(ConjugacyInstance.full(W(3, 2), W(3, 1, 2, -1), 1)) == W(3, 1)
    # σ1 and σ2 are conjugate: (σ1σ2) σ1 (σ1σ2)⁻¹ = σ2
    found = brute_force_conjugacy_search(ConjugacyInstance.full(W(4, 1), W(4, 2), 2))
    assert found == W(4, 1, 2)
    assert brute_force_conjugacy_search(ConjugacyInstance.full(W(4, 1), W(4, 2), 1)) is None
    assert brute_force_conjugacy_search(ConjugacyInstance.full(W(4, 1), W(4, 1, 1), 3)) is None


def test_brute_force_respects_generator_set():
    # conjugate σ3 by σ1σ2... only left generators {1}: cannot reach
    inst = ConjugacyInstance(W(4, 2), W(4, 1, 2, -1), (3,), 3)
    assert brute_force_conjugacy_search(inst) is None
    inst = ConjugacyInstance(W(4, 2), W(4, 1, 2, -1), (1,), 1)
    assert brute_force_conjugacy_search(inst) == W(4, 1)


def test_enumeration_order_is_length_then_lex():
    words = list(_enumerate_reduced((1, -1, 2, -2), 2))
    assert words[:5] == [(), (1,), (-1,), (2,), (-2,)]
    assert words[5:8] == [(1, 1), (1, 2), (1, -2)]
    assert (1, -1) not in words
    assert len(words) == 1 + 4 + 4 * 3


def test_first_match_in_order():
    g = W(3, 1)
    y = conjugate(W(3, -2), g)
    # +1 and -1 fix σ1; +2 gives σ2σ1σ2⁻¹, a different element
    assert not same_element(conjugate(W(3, 2), g), y)
    assert brute_force_conjugacy_search(ConjugacyInstance.full(g, y, 2)) == W(3, -2)


def test_budget_guard():
    big = ConjugacyInstance.full(W(10, 1), W(10, 2), 8)
    assert big.candidate_count() > 10**7
    with pytest.raises(SearchBudgetExceeded):
        brute_force_conjugacy_search(big)


def test_decision_bounded():
    g = W(3, 1, -2)
    assert conjugacy_decision_bounded(g, g, 0) is Verdict.YES
    assert conjugacy_decision_bounded(W(3, 2), W(3, 1, 2, -1), 1) is Verdict.YES
    for bound in range(3):
        assert conjugacy_decision_bounded(BraidWord.identity(3), W(3, 1), bound) is Verdict.NO_WITHIN_BOUND
