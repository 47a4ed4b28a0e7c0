import random

import pytest
from hypothesis import given, settings, strategies as st

from skope.decoder import (
    ChainBreak,
    DecoderConfig,
    DiphoneRun,
    SpottingFrame,
    decode,
    group_runs,
    load_frames,
    merge_to_phonemes,
    prune_insertions,
)
from skope.errors import DecodeError
from skope.phonology import classify_diphone


@pytest.fixture(scope="module")
def D(inventory):
    def make(a, b):
        return classify_diphone(inventory[a], inventory[b])

    return make


def frames_for(labels):
    return [SpottingFrame(i, d) for i, d in enumerate(labels)]


class TestGroupRuns:
    def test_two_maximal_runs(self, D):
        ka, al = D("k", "a"), D("a", "l")
        runs = group_runs(frames_for([ka, ka, ka, al, al]))
        assert [(r.diphone, r.count) for r in runs] == [(ka, 3), (al, 2)]

    def test_singleton(self, D):
        ka = D("k", "a")
        assert [(r.diphone, r.count) for r in group_runs(frames_for([ka]))] == [(ka, 1)]

    def test_non_adjacent_equal_labels_do_not_merge(self, D):
        ka, al = D("k", "a"), D("a", "l")
        runs = group_runs(frames_for([ka, al, ka]))
        assert [r.count for r in runs] == [1, 1, 1]
        assert [r.diphone for r in runs] == [ka, al, ka]

    def test_empty(self):
        assert group_runs([]) == []

    def test_nonmonotonic_indices_rejected(self, D):
        ka = D("k", "a")
        with pytest.raises(DecodeError):
            group_runs([SpottingFrame(1, ka), SpottingFrame(1, ka)])

    def test_gap_splits_runs(self, D):
        ka = D("k", "a")
        runs = group_runs([SpottingFrame(0, ka), SpottingFrame(5, ka)])
        assert [r.count for r in runs] == [1, 1]


class TestPruneInsertions:
    def test_threshold_drops_short_runs(self, D):
        runs = [
            DiphoneRun(D("k", "a"), 0, 2),
            DiphoneRun(D("l", "m"), 3, 3),
            DiphoneRun(D("a", "l"), 4, 7),
        ]
        kept = prune_insertions(runs, DecoderConfig(min_count=2))
        assert [r.count for r in kept] == [3, 4]

    def test_threshold_one_keeps_everything(self, D):
        runs = [DiphoneRun(D("k", "a"), 0, 0), DiphoneRun(D("a", "l"), 1, 1)]
        assert prune_insertions(runs, DecoderConfig(min_count=1)) == runs

    def test_empty(self):
        assert prune_insertions([], DecoderConfig()) == []

    def test_min_count_validated(self):
        with pytest.raises(DecodeError):
            DecoderConfig(min_count=0)

    @given(counts=st.lists(st.integers(1, 6), max_size=10),
           lo=st.integers(1, 4), hi=st.integers(1, 4))
    def test_raising_threshold_never_adds_runs(self, counts, lo, hi, request):
        D = make_diphone_factory()
        lo, hi = min(lo, hi), max(lo, hi)
        start = 0
        runs = []
        for c in counts:
            runs.append(DiphoneRun(D("k", "a"), start, start + c - 1))
            start += c
        loose = prune_insertions(runs, DecoderConfig(min_count=lo))
        strict = prune_insertions(runs, DecoderConfig(min_count=hi))
        assert set(strict) <= set(loose)


_FACTORY = None


def make_diphone_factory():
    global _FACTORY
    if _FACTORY is None:
        from skope import data
        from skope.phonology import load_inventory

        inv = load_inventory(data.path(data.INVENTORY))

        def make(a, b):
            return classify_diphone(inv[a], inv[b])

        _FACTORY = make
    return _FACTORY


class TestMergeToPhonemes:
    def test_shared_phoneme_merges(self, D):
        result = merge_to_phonemes([DiphoneRun(D("k", "a"), 0, 2), DiphoneRun(D("a", "l"), 3, 5)])
        assert result.lattice.positions == (("k",), ("a",), ("l",))
        assert result.breaks == ()

    def test_single_diphone_splits(self, D):
        result = merge_to_phonemes([DiphoneRun(D("k", "a"), 0, 0)])
        assert result.lattice.positions == (("k",), ("a",))

    def test_non_chaining_keeps_both_with_diagnostic(self, D):
        ka, il = D("k", "a"), D("i", "l")
        result = merge_to_phonemes([DiphoneRun(ka, 0, 1), DiphoneRun(il, 2, 3)])
        assert result.lattice.positions == (("k",), ("a",), ("i",), ("l",))
        assert result.breaks == (ChainBreak(2, ka, il),)


class TestDecode:
    def test_insertion_removed(self, D):
        labels = [D("k", "a")] * 4 + [D("l", "m")] * 1 + [D("a", "l")] * 3
        result = decode(frames_for(labels), DecoderConfig(min_count=2))
        assert result.lattice.positions == (("k",), ("a",), ("l",))
        assert result.breaks == ()

    def test_clean_chain(self, D):
        labels = [D("k", "a")] * 4 + [D("a", "l")] * 3
        result = decode(frames_for(labels), DecoderConfig(min_count=2))
        assert result.lattice.positions == (("k",), ("a",), ("l",))

    def test_empty(self):
        result = decode([], DecoderConfig())
        assert len(result.lattice) == 0

    def test_deterministic(self, D):
        labels = [D("k", "a")] * 3 + [D("a", "l")] * 2
        a = decode(frames_for(labels), DecoderConfig())
        b = decode(frames_for(labels), DecoderConfig())
        assert a == b

    @given(data=st.data())
    @settings(max_examples=60)
    def test_frame_conservation_before_pruning(self, data):
        D = make_diphone_factory()
        labels = data.draw(st.lists(
            st.sampled_from([D("k", "a"), D("a", "l"), D("l", "m"), D("m", "a")]),
            max_size=30,
        ))
        runs = group_runs(frames_for(labels))
        assert sum(r.count for r in runs) == len(labels)


from oracle_utils import chained_walk


class TestRoundTrip:
    def test_noise_free_round_trip(self, inventory):
        rng = random.Random(11)
        for _ in range(50):
            truth = chained_walk(inventory, rng, rng.randint(2, 12))
            frames = []
            idx = 0
            for a, b in zip(truth, truth[1:]):
                d = classify_diphone(a, b)
                for _ in range(rng.randint(2, 5)):
                    frames.append(SpottingFrame(idx, d))
                    idx += 1
            result = decode(frames, DecoderConfig(min_count=2))
            assert [a[0] for a in result.lattice.positions] == [p.symbol for p in truth]
            assert result.breaks == ()


class TestFramesFile:
    def test_round_trip(self, tmp_path, inventory):
        f = tmp_path / "frames.tsv"
        f.write_text("0\tk\ta\t0.9\n1\tk\ta\n2\ta\tl\n")
        frames = load_frames(f, inventory)
        assert len(frames) == 3
        assert frames[0].score == 0.9
        assert frames[2].diphone.label == "a+l"

    def test_bad_symbol(self, tmp_path, inventory):
        f = tmp_path / "frames.tsv"
        f.write_text("0\tk\tq\n")
        with pytest.raises(DecodeError, match="frames.tsv:1"):
            load_frames(f, inventory)

    def test_bad_pair(self, tmp_path, inventory):
        f = tmp_path / "frames.tsv"
        f.write_text("0\tng\ta\n")
        with pytest.raises(DecodeError):
            load_frames(f, inventory)
