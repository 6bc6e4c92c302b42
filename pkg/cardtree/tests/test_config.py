import os
from unittest import TestCase

from mock import patch

from cardtree.config import DEFAULTS, THREADS_ENV, load_config
from cardtree.exceptions import ArgumentError


class TestLoadConfig(TestCase):

    def test_defaults(self):
        """
        Test an empty configuration is the defaults
        """
        self.assertEqual(DEFAULTS, load_config(environ={}))

    def test_overrides_skip_none(self):
        """
        Test unset flags leave the default in place
        """
        config = load_config({'method': 'ward', 'seed': None, 'permutations': 100}, environ={})
        self.assertEqual('ward', config['method'])
        self.assertEqual(0, config['seed'])
        self.assertEqual(100, config['permutations'])

    def test_threads_from_environment(self):
        """
        Test the thread count falls back to the environment
        """
        self.assertEqual(4, load_config(environ={THREADS_ENV: '4'})['threads'])
        self.assertEqual(2, load_config({'threads': 2}, environ={THREADS_ENV: '4'})['threads'])

    def test_process_environment(self):
        """
        Test the process environment is read when none is passed
        """
        with patch.dict(os.environ, {THREADS_ENV: '3'}):
            self.assertEqual(3, load_config()['threads'])

    def test_invalid_threads(self):
        """
        Test a malformed or non-positive thread count
        """
        with self.assertRaisesRegex(ArgumentError, THREADS_ENV):
            load_config(environ={THREADS_ENV: 'many'})
        with self.assertRaises(ArgumentError):
            load_config({'threads': 0}, environ={})
