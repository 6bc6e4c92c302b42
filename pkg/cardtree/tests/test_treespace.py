from unittest import TestCase

import numpy as np

from cardtree.core import CondensedMatrix
from cardtree.exceptions import ArgumentError
from cardtree.linkage import Dendrogram, MergeStep, cophenetic, lance_williams, normalize
from cardtree.tests.fixtures import D1, D2, T1, random_tree
from cardtree.treespace import (
    DendrogramTree, SplitTree, dendrogram_tree, euclidean_norm_diff, from_dendrogram, splits_compatible,
    to_cophenetic,
)


class TestSplitsCompatible(TestCase):

    def test_nested(self):
        """
        Test nested splits are compatible
        """
        self.assertTrue(splits_compatible(frozenset({0, 1}), frozenset({0, 1, 2})))

    def test_disjoint(self):
        """
        Test disjoint splits are compatible
        """
        self.assertTrue(splits_compatible(frozenset({0, 1}), frozenset({2, 3})))

    def test_crossing(self):
        """
        Test overlapping splits that are not nested conflict
        """
        self.assertFalse(splits_compatible(frozenset({0, 1}), frozenset({1, 2})))


class TestSplitTree(TestCase):

    def test_incompatible_splits(self):
        """
        Test a tree cannot hold two crossing splits
        """
        with self.assertRaises(ArgumentError):
            SplitTree(4, {(0, 1): 0.2, (1, 2): 0.3}, np.ones(4))

    def test_bad_split(self):
        """
        Test singletons and the full leaf set are not inner splits
        """
        with self.assertRaises(ArgumentError):
            SplitTree(3, {(0,): 0.2}, np.ones(3))
        with self.assertRaises(ArgumentError):
            SplitTree(3, {(0, 1, 2): 0.2}, np.ones(3))

    def test_zero_lengths_dropped(self):
        """
        Test zero-length splits are not stored
        """
        tree = SplitTree(3, {(0, 1): 0.0}, np.ones(3))
        self.assertEqual(tree.splits(), [])
        self.assertEqual(tree.length((0, 1)), 0.0)

    def test_depth_one(self):
        """
        Test a dendrogram tree must put every leaf at depth one
        """
        DendrogramTree(3, {(0, 1): 0.5}, [0.5, 0.5, 1.0])
        with self.assertRaises(ArgumentError):
            DendrogramTree(3, {(0, 1): 0.5}, [0.5, 0.6, 1.0])

    def test_star(self):
        """
        Test the star tree has unit leaves and no inner splits
        """
        star = DendrogramTree.star(5)
        self.assertEqual(star.splits(), [])
        self.assertEqual(star.leaf_lengths.tolist(), [1.0] * 5)


class TestFromDendrogram(TestCase):

    def test_tie_example(self):
        """
        Test the normalized D1 dendrogram has split {0,1} of length 0.2
        """
        tree = from_dendrogram(normalize(lance_williams(D1)[0]))
        self.assertEqual(tree.splits(), [frozenset({0, 1})])
        self.assertAlmostEqual(tree.length({0, 1}), 0.2, places=12)
        np.testing.assert_allclose(tree.leaf_lengths, [0.8, 0.8, 1.0], rtol=0, atol=1e-12)
        self.assertIsInstance(tree, DendrogramTree)

    def test_leaf_lengths(self):
        """
        Test leaves hang from their first merge
        """
        dendrogram = Dendrogram(3, [MergeStep(0, 1, 0.8, 3), MergeStep(3, 2, 2.0, 4)], [0.4, 1.0], normalized=True)
        tree = from_dendrogram(dendrogram)
        self.assertEqual(tree.leaf_lengths.tolist(), [0.4, 0.4, 1.0])
        self.assertAlmostEqual(tree.length({0, 1}), 0.6, places=12)
        np.testing.assert_allclose(to_cophenetic(tree).values, [0.8, 2.0, 2.0], rtol=0, atol=1e-12)

    def test_requires_normalized(self):
        """
        Test raw dendrograms give a plain split tree only when asked
        """
        dendrogram, _ = lance_williams(D2)
        with self.assertRaises(ArgumentError):
            from_dendrogram(dendrogram)
        tree = from_dendrogram(dendrogram, require_normalized=False)
        self.assertNotIsInstance(tree, DendrogramTree)
        self.assertEqual(tree.leaf_lengths.tolist(), [1.0, 1.25, 1.0])

    def test_cophenetic_round_trip(self):
        """
        Test the tree's path lengths equal the dendrogram's cophenetic matrix
        """
        rng = np.random.default_rng(4)
        for _ in range(20):
            d0 = CondensedMatrix(7, rng.random(21))
            dendrogram = normalize(lance_williams(d0)[0])
            self.assertTrue(to_cophenetic(from_dendrogram(dendrogram)).allclose(cophenetic(dendrogram), atol=1e-12))

    def test_depths(self):
        """
        Test random normalized trees satisfy the depth condition
        """
        rng = np.random.default_rng(6)
        for p in range(2, 10):
            self.assertTrue(random_tree(rng, p).satisfies_depth_one())


class TestDendrogramTree(TestCase):

    def test_degenerate_is_star(self):
        """
        Test an all-zero dendrogram maps to the star tree
        """
        dendrogram, _ = lance_williams(CondensedMatrix(4, np.zeros(6)))
        self.assertEqual(dendrogram_tree(dendrogram), DendrogramTree.star(4))

    def test_normalizes(self):
        """
        Test raw heights are rescaled first
        """
        dendrogram, _ = lance_williams(D1)
        self.assertEqual(dendrogram_tree(dendrogram), from_dendrogram(normalize(dendrogram)))

    def test_raw(self):
        """
        Test raw heights are kept when asked
        """
        dendrogram, _ = lance_williams(D1)
        tree = dendrogram_tree(dendrogram, normalized=False)
        self.assertEqual(to_cophenetic(tree).values.tolist(), list(T1))


class TestEuclideanNormDiff(TestCase):

    def test_identical(self):
        """
        Test a tree is at distance 0 from itself
        """
        tree = random_tree(np.random.default_rng(0), 6)
        self.assertEqual(euclidean_norm_diff(tree, tree), 0.0)

    def test_absent_splits(self):
        """
        Test a split missing from one tree counts with its full length
        """
        t1 = DendrogramTree(3, {(0, 1): 0.5}, [0.5, 0.5, 1.0])
        t2 = DendrogramTree(3, {(1, 2): 0.5}, [1.0, 0.5, 0.5])
        self.assertAlmostEqual(euclidean_norm_diff(t1, t2), 1.0, places=12)

    def test_mismatched(self):
        """
        Test trees over different leaf counts are refused
        """
        with self.assertRaises(ArgumentError):
            euclidean_norm_diff(DendrogramTree.star(3), DendrogramTree.star(4))
