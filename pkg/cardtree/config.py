import logging
import os

from cardtree.exceptions import ArgumentError

logger = logging.getLogger(__name__)

THREADS_ENV = 'CARDTREE_THREADS'

DEFAULTS = {
    'method': 'group_average',
    'ties': 'lexicographic',
    'metric': 'frobenius',
    'permutations': 5000,
    'seed': 0,
    'alpha': 0.05,
    'normalize': False,
    'normalize_geodesic': True,
    'threads': 1,
}


def load_config(overrides=None, environ=None):
    """
    Build the run configuration

    Priority:
        1. explicit overrides (command-line flags); None values are ignored
        2. the CARDTREE_THREADS environment variable (thread count only)
        3. DEFAULTS
    """
    environ = os.environ if environ is None else environ
    config = {key: value for key, value in (overrides or {}).items() if value is not None}
    if 'threads' not in config and environ.get(THREADS_ENV):
        raw = environ[THREADS_ENV]
        try:
            config['threads'] = int(raw)
        except ValueError:
            raise ArgumentError('{} must be an integer, got "{}"'.format(THREADS_ENV, raw))
        logger.debug('thread count %d taken from %s', config['threads'], THREADS_ENV)
    for key, value in DEFAULTS.items():
        config.setdefault(key, value)
    if config['threads'] < 1:
        raise ArgumentError('thread count must be at least 1')
    return config
