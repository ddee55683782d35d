import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pairwise_auc, recount_ap, recount_va
from xmec.exceptions import EmptyInput, InsufficientRelevant
from xmec.metrics import (
    RankedCollection,
    RankEntry,
    ap_at_recall,
    roc_auc,
    verification_accuracy,
)

scores = st.lists(
    st.floats(min_value=-1, max_value=1, allow_nan=False), min_size=1, max_size=40
)


def ranking_from_flags(flags, direction="descending"):
    """Build a ranking whose rank order realizes the given relevance
    flags (True = tampered is relevant here only by convention of the
    caller; flags mark the 'tampered' variant)."""
    n = len(flags)
    entries = []
    for i, flag in enumerate(flags):
        span = n - i if direction == "descending" else i + 1
        entries.append(
            RankEntry(
                doc_id=f"d{i:02d}",
                variant="tampered" if flag else "clean",
                score=float(span),
            )
        )
    return RankedCollection.build(entries, direction)


class TestVerificationAccuracy:
    def test_counts_strict_wins(self):
        assert verification_accuracy([(0.9, 0.7), (0.5, 0.6)]) == 0.5
        assert verification_accuracy([(0.9, 0.1)]) == 1.0
        assert verification_accuracy([(0.1, 0.9)]) == 0.0

    def test_ties_fail(self):
        assert verification_accuracy([(0.5, 0.5)]) == 0.0
        assert verification_accuracy([(0.5, 0.5), (0.8, 0.2)]) == 0.5

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            verification_accuracy([])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            verification_accuracy([(float("nan"), 0.0)])

    @settings(max_examples=80)
    @given(st.lists(st.tuples(
        st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False)
    ), min_size=1, max_size=30))
    def test_matches_oracle_and_is_order_invariant(self, pairs):
        value = verification_accuracy(pairs)
        assert value == recount_va(pairs)
        assert value == verification_accuracy(list(reversed(pairs)))


class TestRocAuc:
    def test_spec_example(self):
        assert roc_auc([0.9, 0.5], [0.7, 0.6]) == 0.5

    def test_perfect_separation(self):
        assert roc_auc([0.9, 0.8, 0.7], [0.3, 0.2]) == 1.0
        assert roc_auc([0.1], [0.5, 0.9]) == 0.0

    def test_all_tied_scores_give_half(self):
        assert roc_auc([0.4, 0.4], [0.4, 0.4, 0.4]) == 0.5

    def test_single_tie_counts_half(self):
        # pairs: (0.7, 0.2)=1 and (0.7, 0.7)=0.5
        assert roc_auc([0.7], [0.2, 0.7]) == 0.75

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            roc_auc([], [0.5])
        with pytest.raises(EmptyInput):
            roc_auc([0.5], [])

    @settings(max_examples=120)
    @given(scores, scores)
    def test_matches_pairwise_oracle_exactly(self, clean, tampered):
        assert roc_auc(clean, tampered) == pairwise_auc(clean, tampered)

    @settings(max_examples=60)
    @given(scores, scores)
    def test_swapping_classes_complements(self, clean, tampered):
        assert roc_auc(clean, tampered) == pytest.approx(
            1.0 - roc_auc(tampered, clean), abs=1e-12
        )

    @settings(max_examples=60)
    @given(scores, scores)
    def test_scaling_scores_never_changes_auc(self, clean, tampered):
        # doubling is exact for every float, so the tie structure and
        # ordering survive and the rank statistic must be bit-identical
        base = roc_auc(clean, tampered)
        assert roc_auc([2 * x for x in clean], [2 * x for x in tampered]) == base

    @settings(max_examples=60)
    @given(
        st.lists(st.integers(-16, 16), min_size=1, max_size=30),
        st.lists(st.integers(-16, 16), min_size=1, max_size=30),
    )
    def test_affine_transform_invariance_on_lattice_scores(self, clean, tampered):
        c = [k / 16 for k in clean]
        t = [k / 16 for k in tampered]
        base = roc_auc(c, t)
        assert roc_auc([2 * x + 1 for x in c], [2 * x + 1 for x in t]) == base

    def test_duplicate_heavy_input_matches_oracle(self):
        rng = np.random.default_rng(4)
        clean = rng.integers(0, 4, size=60) / 4.0
        tampered = rng.integers(0, 4, size=45) / 4.0
        assert roc_auc(clean, tampered) == pairwise_auc(clean, tampered)


class TestRankedCollection:
    def test_build_sorts_descending_with_tie_break(self):
        entries = [
            RankEntry("b", "clean", 0.5),
            RankEntry("a", "tampered", 0.5),
            RankEntry("c", "clean", 0.9),
        ]
        ranking = RankedCollection.build(entries, "descending")
        assert [e.doc_id for e in ranking.entries] == ["c", "a", "b"]

    def test_tied_doc_id_breaks_by_variant(self):
        entries = [
            RankEntry("a", "tampered", 0.5),
            RankEntry("a", "clean", 0.5),
        ]
        ranking = RankedCollection.build(entries, "descending")
        assert [e.variant for e in ranking.entries] == ["clean", "tampered"]

    def test_ascending_order(self):
        entries = [
            RankEntry("a", "clean", 0.9),
            RankEntry("b", "tampered", 0.1),
        ]
        ranking = RankedCollection.build(entries, "ascending")
        assert [e.doc_id for e in ranking.entries] == ["b", "a"]

    def test_constructor_rejects_unsorted_entries(self):
        with pytest.raises(ValueError):
            RankedCollection(
                entries=(
                    RankEntry("a", "clean", 0.1),
                    RankEntry("b", "clean", 0.9),
                ),
                order_direction="descending",
            )

    def test_variant_and_direction_validation(self):
        with pytest.raises(ValueError):
            RankEntry("a", "original", 0.5)
        with pytest.raises(ValueError):
            RankedCollection.build([RankEntry("a", "clean", 0.5)], "sideways")

    def test_count(self):
        ranking = ranking_from_flags([True, False, True])
        assert ranking.count("tampered") == 2
        assert ranking.count("clean") == 1


class TestApAtRecall:
    def test_known_value(self):
        # relevant at ranks 1, 3, 4 of four entries
        ranking = ranking_from_flags([True, False, True, True])
        value = ap_at_recall(ranking, "tampered", 1.0)
        assert value == pytest.approx(0.8055555555555555, abs=1e-9)

    def test_literal_variant_sums_every_rank(self):
        ranking = ranking_from_flags([True, False, True, True])
        value = ap_at_recall(ranking, "tampered", 1.0, literal=True)
        # adds the precision at the non-relevant rank 2 as well
        assert value == pytest.approx((1.0 + 0.5 + 2 / 3 + 0.75) / 3, abs=1e-9)

    def test_single_relevant_at_rank_two(self):
        ranking = ranking_from_flags([False, True])
        assert ap_at_recall(ranking, "tampered", 1.0) == 0.5

    def test_perfect_prefix_is_exactly_one(self):
        ranking = ranking_from_flags([True] * 5 + [False] * 5)
        assert ap_at_recall(ranking, "tampered", 1.0) == 1.0
        assert ap_at_recall(ranking, "tampered", 0.25) == 1.0

    def test_partial_recall_stops_at_ceiling(self):
        # 3 relevant, R=0.5 -> target ceil(1.5) = 2, reached at rank 3
        ranking = ranking_from_flags([True, False, True, True])
        value = ap_at_recall(ranking, "tampered", 0.5)
        assert value == pytest.approx((1.0 + 2 / 3) / 2, abs=1e-12)

    def test_clean_can_be_the_relevant_class(self):
        ranking = ranking_from_flags([False, True, False])
        # clean entries sit at ranks 1 and 3
        value = ap_at_recall(ranking, "clean", 1.0)
        assert value == pytest.approx((1.0 + 2 / 3) / 2, abs=1e-12)

    def test_no_relevant_documents_rejected(self):
        ranking = ranking_from_flags([False, False])
        with pytest.raises(InsufficientRelevant):
            ap_at_recall(ranking, "tampered", 1.0)

    def test_recall_level_validation(self):
        ranking = ranking_from_flags([True])
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(ValueError):
                ap_at_recall(ranking, "tampered", bad)

    @settings(max_examples=120)
    @given(
        st.lists(st.booleans(), min_size=1, max_size=16).filter(any),
        st.sampled_from([0.25, 0.5, 1.0]),
        st.booleans(),
    )
    def test_matches_recount_oracle(self, flags, level, literal):
        ranking = ranking_from_flags(flags)
        got = ap_at_recall(ranking, "tampered", level, literal=literal)
        assert got == pytest.approx(
            recount_ap(flags, level, literal=literal), abs=1e-12
        )

    def test_ascending_ranking_works_the_same(self):
        flags = [True, False, True, True]
        descending = ap_at_recall(
            ranking_from_flags(flags, "descending"), "tampered", 1.0
        )
        ascending = ap_at_recall(
            ranking_from_flags(flags, "ascending"), "tampered", 1.0
        )
        assert descending == ascending
