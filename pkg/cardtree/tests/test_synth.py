from unittest import TestCase

import numpy as np

from cardtree.core import CondensedMatrix, Partition
from cardtree.exceptions import ArgumentError
from cardtree.linkage import lance_williams, normalize
from cardtree.permtest import FROBENIUS, TestConfig, perm_test
from cardtree.synth import (
    SynthSpec, cut, distinct_truth, flip_blocks, random_dendrogram, relabel, synth_generate,
)
from cardtree.tests.fixtures import D1

TWO = CondensedMatrix(2, [0.3])


class TestCut(TestCase):

    def setUp(self):
        self.dendrogram = normalize(lance_williams(D1)[0])

    def test_below_first_merge(self):
        """
        Test cutting below every merge gives singletons
        """
        self.assertEqual(Partition(3, [[0], [1], [2]]), cut(self.dendrogram, 0.5))

    def test_between_merges(self):
        """
        Test cutting between the merges keeps the first cluster
        """
        self.assertEqual(Partition(3, [[0, 1], [2]]), cut(self.dendrogram, 0.9))

    def test_at_root(self):
        """
        Test cutting at the root gives one block
        """
        self.assertEqual(Partition(3, [[0, 1, 2]]), cut(self.dendrogram, 1.0))


class TestFlipBlocks(TestCase):

    def test_no_flips(self):
        """
        Test probability 0 keeps the assignment
        """
        assignment = np.array([0, 0, 1, 1])
        np.testing.assert_array_equal(assignment, flip_blocks(assignment, 0.0, np.random.default_rng(0)))

    def test_single_pile(self):
        """
        Test flipping out of the only pile opens a new one
        """
        flipped = flip_blocks([0, 0], 1.0, np.random.default_rng(0))
        self.assertEqual(Partition(2, [[0], [1]]), Partition.from_assignment(flipped))

    def test_every_card_moves(self):
        """
        Test probability 1 moves every card out of its pile
        """
        assignment = np.array([0, 0, 1, 1, 2])
        flipped = flip_blocks(assignment, 1.0, np.random.default_rng(3))
        self.assertTrue(np.all(flipped != assignment))


class TestSynthSpec(TestCase):

    def test_defaults(self):
        """
        Test truths are normalized and labels generated
        """
        truth = lance_williams(D1)[0]
        spec = SynthSpec({'A': truth}, {'A': 2})
        self.assertTrue(spec.truths['A'].normalized)
        self.assertEqual(('w0', 'w1', 'w2'), spec.labels)

    def test_invalid(self):
        """
        Test bad sizes, noise levels and mismatched groups
        """
        truth = lance_williams(D1)[0]
        with self.assertRaises(ArgumentError):
            SynthSpec({'A': truth}, {'B': 2})
        with self.assertRaises(ArgumentError):
            SynthSpec({'A': truth}, {'A': 0})
        with self.assertRaises(ArgumentError):
            SynthSpec({'A': truth}, {'A': 2}, flip=1.5)
        with self.assertRaises(ArgumentError):
            SynthSpec({'A': truth}, {'A': 2}, jitter=-1)
        with self.assertRaises(ArgumentError):
            SynthSpec({'A': truth}, {'A': 2}, labels=('a', 'b'))


class TestSynthGenerate(TestCase):

    def test_noiseless(self):
        """
        Test every participant reproduces the cut of the truth
        """
        truth = lance_williams(D1)[0]
        sample = synth_generate(SynthSpec({'A': truth}, {'A': 3}, cut_height=0.9))
        self.assertEqual(['A-001', 'A-002', 'A-003'], [p.participant_id for p in sample.participants])
        for participant in sample.participants:
            self.assertEqual(Partition(3, [[0, 1], [2]]), participant.partition)

    def test_flip_example(self):
        """
        Test cutting two cards at the root and flipping both separates them
        """
        spec = SynthSpec({'A': lance_williams(TWO)[0]}, {'A': 1}, cut_height=1.0, flip=1.0)
        self.assertEqual(Partition(2, [[0], [1]]), synth_generate(spec).participants[0].partition)

    def test_deterministic(self):
        """
        Test one seed replays one sample
        """
        rng = np.random.default_rng(0)
        spec = SynthSpec({'A': random_dendrogram(6, rng), 'B': random_dendrogram(6, rng)}, {'A': 5, 'B': 4},
                         jitter=0.2, flip=0.2, seed=9)
        first, second = synth_generate(spec), synth_generate(spec)
        self.assertEqual(first.participants, second.participants)
        self.assertEqual(['A', 'B'], first.groups())
        self.assertNotEqual(first.participants, synth_generate(spec.with_seed(10)).participants)


class TestTruths(TestCase):

    def test_random_dendrogram(self):
        """
        Test random truths are normalized
        """
        dendrogram = random_dendrogram(7, np.random.default_rng(1))
        self.assertTrue(dendrogram.normalized)
        self.assertEqual(1.0, dendrogram.heights[-1])

    def test_relabel(self):
        """
        Test relabeling renames leaves only
        """
        dendrogram = lance_williams(D1)[0]
        renamed = relabel(dendrogram, [2, 1, 0])
        self.assertEqual([frozenset({1, 2}), frozenset({0, 1, 2})], renamed.clusters())
        self.assertEqual(dendrogram.heights, renamed.heights)
        with self.assertRaises(ArgumentError):
            relabel(dendrogram, [0, 0, 1])

    def test_distinct_truth(self):
        """
        Test the swapped truth has a different cluster set
        """
        rng = np.random.default_rng(2)
        for _ in range(10):
            dendrogram = random_dendrogram(6, rng)
            other = distinct_truth(dendrogram, rng)
            self.assertNotEqual(set(dendrogram.clusters()), set(other.clusters()))
        with self.assertRaises(ArgumentError):
            distinct_truth(lance_williams(TWO)[0], rng)


class TestSynthesizedTest(TestCase):

    def test_distinct_truths(self):
        """
        Test groups cut from truths with different clusters are never exceeded by a replicate
        """
        pairs = CondensedMatrix(4, [0.2, 1.0, 1.0, 1.0, 1.0, 0.2])
        crossed = CondensedMatrix(4, [1.0, 0.2, 1.0, 1.0, 0.2, 1.0])
        truths = {'A': lance_williams(pairs)[0], 'B': lance_williams(crossed)[0]}
        sample = synth_generate(SynthSpec(truths, {'A': 8, 'B': 8}, jitter=0.05, seed=4))
        self.assertEqual(Partition(4, [[0, 1], [2, 3]]), sample.participants[0].partition)
        self.assertEqual(Partition(4, [[0, 2], [1, 3]]), sample.participants[-1].partition)
        result = perm_test(sample, 'A', 'B', TestConfig(permutations=50))
        self.assertEqual(0.0, result[FROBENIUS].s_hat)
