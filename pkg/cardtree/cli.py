"""
Command-line surface

Commands are registered on a CommandSet the way a web framework registers endpoints: each one
declares its arguments, the Serializer for its result and any extra output formats, and the
CommandSet wraps it so that failures are formatted by the active ContentType and turned into an
exit code (0 success, 1 usage error, 2 data error).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from sys import exc_info

import numpy as np

from cardtree import __version__
from cardtree.config import load_config
from cardtree.content_types import JSON, PlainText, TabSeparated
from cardtree.deserializers import (
    CardSortDeserializer, DendrogramFileDeserializer, DistanceDeserializer, ReportDeserializer,
)
from cardtree.documents import DendrogramFile, ReportFile
from cardtree.exceptions import CardTreeError, ParseError, UsageError
from cardtree.geodesic import geodesic_distance
from cardtree.linkage import ALIASES, METHODS, LinkageMethod, TiePolicy, cophenetic, lance_williams, normalize
from cardtree.permtest import BOTH, METRICS, TestConfig, compare_groups, perm_test
from cardtree.scatter import emit_scatter
from cardtree.serializers import (
    DendrogramFileSerializer, GeodesicSerializer, ReportSerializer, SimulationRowSerializer,
)
from cardtree.synth import SynthSpec, distinct_truth, random_dendrogram, relabel, synth_generate
from cardtree.treespace import dendrogram_tree

logger = logging.getLogger(__name__)

USAGE_ERROR = 1
DATA_ERROR = 2


class ArgumentParser(argparse.ArgumentParser):
    """
    Raises UsageError instead of exiting, so main() owns the exit code
    """

    def error(self, message):
        raise UsageError('{}\n\n{}'.format(message, self.format_help().rstrip()))


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected an integer, got "{}"'.format(text))
    if value < 1:
        raise argparse.ArgumentTypeError('must be at least 1, got {}'.format(value))
    return value


def probability(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected a number, got "{}"'.format(text))
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError('must lie in [0, 1], got {}'.format(value))
    return value


def open_level(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError('expected a number, got "{}"'.format(text))
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError('must lie strictly between 0 and 1, got {}'.format(value))
    return value


def load_document(path):
    """
    Decoded JSON of a file; unreadable or malformed files are data errors
    """
    try:
        with open(path, encoding='utf-8') as stream:
            document = json.load(stream)
    except OSError as exc:
        raise ParseError('cannot read {}: {}'.format(path, exc.strerror or exc))
    except ValueError as exc:
        raise ParseError('{} is not valid JSON: {}'.format(path, exc))
    logger.info('read %s', path)
    return document


def exit_code(exc):
    if isinstance(exc, UsageError):
        return USAGE_ERROR
    return DATA_ERROR


class Command(object):
    """
    Command object

    For tracking the arguments, serializer and the various content-types of one subcommand.
    Also contains setup and teardown logic for every invocation.
    """

    def __init__(self):
        """
        Initialize with default command behavior.
        """
        self.Serializer = None
        self.arguments = []
        self.content_type_map = {}
        self.content_type = None
        self.default_format = PlainText.NAME
        self.help = None

    def bind(self, commands, name, func, decorated):
        """
        Bind this command to the CommandSet under a name with a specific function
        """
        self.commands = commands
        self.name = name
        self.func = func
        self.decorated = decorated
        self.help = self.help or (func.__doc__ or '').strip().split('\n')[0]
        # Generate the content_type_map with this priority:
        #   1. command content-type overrides
        #   2. default content-types
        for name, content_type_class in commands.config['DEFAULT_CONTENT_TYPE_MAP'].items():
            self.content_type_map.setdefault(name, content_type_class)

    def init_parser(self, subparsers):
        parser = subparsers.add_parser(self.name, help=self.help, description=self.help)
        # decorators run bottom-up; restore the order the arguments were written in
        for args, kwargs in reversed(self.arguments):
            parser.add_argument(*args, **kwargs)
        parser.add_argument(
            '--format', choices=sorted(self.content_type_map),
            help='output format (default: {})'.format(self.default_format),
        )
        parser.set_defaults(command=self)
        return parser

    def setup_request(self, options):
        """
        Setup the output format for this invocation
        """
        name = getattr(options, 'format', None) or self.default_format
        self.content_type = self.content_type_map[name](self.Serializer)

    def teardown_request(self):
        """
        Teardown the invocation (cleanup)
        """
        self.content_type = None


class CommandSet(object):
    """
    Registry of subcommands
    """

    def __init__(self, prog='cardtree'):
        self.prog = prog
        self.commands = {}
        self.config = {}
        # setup the default content-types
        self.config.setdefault(
            'DEFAULT_CONTENT_TYPE_MAP',
            {
                JSON.NAME: JSON,
                PlainText.NAME: PlainText,
            }
        )

    def get_command(self, name):
        command = self.commands.get(name)
        if command is None:
            command = Command()
            self.commands[name] = command
        return command

    def register_serializer(self, target, default_format=None):
        def decorator(func):
            command = self.get_command(func.__name__)
            command.Serializer = target
            if default_format:
                command.default_format = default_format
            return func
        return decorator

    def register_content_type(self, target):
        def decorator(func):
            command = self.get_command(func.__name__)
            command.content_type_map[target.NAME] = target
            return func
        return decorator

    def argument(self, *args, **kwargs):
        def decorator(func):
            self.get_command(func.__name__).arguments.append((args, kwargs))
            return func
        return decorator

    def command(self, name=None):
        """
        Define a subcommand
        """
        # decorate the command
        def decorator(func):
            def decorated(options, stdout, stderr):
                content_type = PlainText()
                try:
                    command.setup_request(options)
                    content_type = command.content_type
                    returned_object = func(options, command)
                    serialized_data = content_type.serialize(returned_object)
                    content_type.make_response(serialized_data, path=options.out, stream=stdout)
                    code = 0
                except (CardTreeError, ValueError, OSError):
                    exc_type, exc_value, exc_traceback = exc_info()
                    logger.debug('%s failed', command.name, exc_info=True)
                    stderr.write(content_type.format_error(exc_type, exc_value, exc_traceback))
                    code = exit_code(exc_value)
                command.teardown_request()
                return code

            # setup the command
            command = self.get_command(func.__name__)
            command.bind(self, name or func.__name__, func, decorated)

            return func

        return decorator

    def build_parser(self):
        parser = ArgumentParser(
            prog=self.prog,
            description='Compare card-sort groups through the dendrograms of their Hamming distances.',
        )
        parser.add_argument('--version', action='version', version='%(prog)s {}'.format(__version__))
        parser.add_argument('-v', '--verbose', action='count', default=0, help='more logging (repeatable)')
        parser.add_argument('-q', '--quiet', action='store_true', help='only log errors')
        subparsers = parser.add_subparsers(dest='command_name', metavar='command', required=True)
        for command in self.commands.values():
            command.init_parser(subparsers)
        return parser


commands = CommandSet()


def _clustering_arguments(func):
    for args, kwargs in (
        (('--normalize',), {'action': 'store_true', 'default': None,
                            'help': 'rescale dendrogram heights so the root sits at 1'}),
        (('--seed',), {'type': int, 'help': 'master seed (random tie breaking, permutations)'}),
        (('--ties',), {'choices': ['lex', 'random'], 'help': 'tie-breaking rule (default: lex)'}),
        (('--method',), {'choices': sorted(ALIASES) + sorted(METHODS),
                         'help': 'Lance-Williams linkage (default: average)'}),
    ):
        func = commands.argument(*args, **kwargs)(func)
    return func


def _test_config(options, **extra):
    overrides = {
        'method': options.method,
        'ties': options.ties,
        'seed': options.seed,
        'normalize': options.normalize,
    }
    for key in ('metric', 'permutations', 'alpha', 'threads'):
        overrides[key] = getattr(options, key, None)
    overrides.update(extra)
    return TestConfig.from_mapping(load_config(overrides))


@commands.command()
@commands.register_serializer(DendrogramFileSerializer)
@commands.argument('input', help='card-sort file or labeled distance matrix (JSON)')
@commands.argument('--group', action='append', help='only use participants of this group (repeatable)')
@_clustering_arguments
@commands.argument('--out', help='write the result to this file instead of stdout')
def cluster(options, command):
    """
    Cluster one distance matrix and print its dendrogram and cophenetic matrix
    """
    config = load_config({'method': options.method, 'ties': options.ties, 'seed': options.seed})
    method = LinkageMethod.named(config['method'])
    ties = TiePolicy.named(config['ties'], seed=config['seed'])
    document = load_document(options.input)
    if isinstance(document, dict) and 'distances' in document:
        if options.group:
            raise UsageError('--group only applies to card-sort files')
        distance_file = DistanceDeserializer(document).deserialize()
        label_set, distances = distance_file.label_set, distance_file.distances
    else:
        sample = CardSortDeserializer(document).deserialize()
        if options.group:
            for group in options.group:
                sample.indices(group)
            sample = sample.subset(options.group)
        label_set, distances = sample.label_set, sample.hamming(range(len(sample)))

    dendrogram, d_t = lance_williams(distances, method, ties)
    if options.normalize:
        dendrogram = normalize(dendrogram)
        d_t = cophenetic(dendrogram)
    return DendrogramFile(label_set, method.name, dendrogram, d_t)


@commands.command(name='test')
@commands.register_serializer(ReportSerializer, default_format=JSON.NAME)
@commands.argument('input', help='card-sort file (JSON)')
@commands.argument('--groups', nargs=2, metavar=('GROUP1', 'GROUP2'), help='the two groups to compare')
@commands.argument('--all-pairs', action='store_true', help='compare every pair of groups')
@commands.argument('--metric', choices=list(METRICS) + [BOTH], help='tree distance (default: frobenius)')
@commands.argument('--permutations', type=positive_int, help='Monte Carlo replicates K (default: 5000)')
@commands.argument('--alpha', type=open_level, help='interval level is 1 - alpha (default: 0.05)')
@commands.argument('--threads', type=positive_int, help='worker threads for the replicates')
@_clustering_arguments
@commands.argument('--scatter', help='also write the per-replicate distance table here (metric both)')
@commands.argument('--out', help='write the report to this file instead of stdout')
def run_test(options, command):
    """
    Permutation test of dendrogram equality between groups; writes a report
    """
    started = time.perf_counter()
    config = _test_config(options)
    sample = CardSortDeserializer(load_document(options.input)).deserialize()
    if options.groups and options.all_pairs:
        raise UsageError('--groups and --all-pairs are mutually exclusive')
    if options.scatter and config.metric != BOTH:
        raise UsageError('--scatter needs --metric both')

    if options.all_pairs:
        results = compare_groups(sample, config)
    else:
        groups = options.groups or sample.groups()
        if len(groups) != 2:
            raise UsageError(
                'the file has {} groups; choose two with --groups or use --all-pairs'.format(len(groups))
            )
        results = [perm_test(sample, groups[0], groups[1], config)]

    if options.scatter:
        _write_scatters(results, options.scatter)
    return ReportFile(
        config=config.to_dict(),
        sample=sample,
        comparisons=tuple(results),
        generated={
            'timestamp': datetime.now(timezone.utc).isoformat(timespec='seconds'),
            'runtime': time.perf_counter() - started,
        },
    )


def _write_scatters(results, path):
    if len(results) == 1:
        emit_scatter(results[0], path=path)
        return
    path = Path(path)
    for result in results:
        emit_scatter(
            result, path=str(path.with_name('{}-{}-{}{}'.format(path.stem, result.group1, result.group2, path.suffix)))
        )


@commands.command()
@commands.register_serializer(GeodesicSerializer)
@commands.argument('first', help='dendrogram file written by `cardtree cluster --out`')
@commands.argument('second', help='dendrogram file over the same labels')
@commands.argument('--raw', action='store_true', help='use the heights as stored instead of normalizing')
@commands.argument('--out', help='write the result to this file instead of stdout')
def geodesic(options, command):
    """
    Geodesic distance and support between two dendrograms
    """
    first = DendrogramFileDeserializer(load_document(options.first)).deserialize()
    second = DendrogramFileDeserializer(load_document(options.second)).deserialize()
    dendrogram = second.dendrogram
    if second.labels != first.labels:
        if sorted(second.labels) != sorted(first.labels):
            raise ParseError('the two dendrograms are over different labels')
        dendrogram = relabel(dendrogram, [first.label_set.index(label) for label in second.labels])
    result = geodesic_distance(
        dendrogram_tree(first.dendrogram, normalized=not options.raw),
        dendrogram_tree(dendrogram, normalized=not options.raw),
    )
    command.content_type.context = {'labels': first.labels}
    return result


@dataclass(frozen=True)
class SimulationRow:
    n: int
    runs: int
    metric: str
    mean_s: float
    median_s: float
    rejected: float


def simulation_truths(p, seed, identical):
    rng = np.random.default_rng(np.random.SeedSequence([seed, p]))
    base = random_dendrogram(p, rng)
    return base, base if identical else distinct_truth(base, rng)


@commands.command()
@commands.register_serializer(SimulationRowSerializer, default_format=TabSeparated.NAME)
@commands.register_content_type(TabSeparated)
@commands.argument('--labels', type=int, default=8, help='number of cards p (default: 8)')
@commands.argument('--sizes', type=positive_int, nargs='+', default=[8, 32, 128],
                   help='participants per group, one sweep point each (default: 8 32 128)')
@commands.argument('--runs', type=positive_int, default=20, help='simulated studies per size (default: 20)')
@commands.argument('--identical', action='store_true', help='both groups share one ground truth (null)')
@commands.argument('--cut', type=probability, default=0.5, help='cut height of the truth (default: 0.5)')
@commands.argument('--jitter', type=float, default=0.1, help='cut-height noise scale (default: 0.1)')
@commands.argument('--flip', type=probability, default=0.1, help='per-card flip probability (default: 0.1)')
@commands.argument('--metric', choices=list(METRICS) + [BOTH], help='tree distance (default: frobenius)')
@commands.argument('--permutations', type=positive_int, default=500, help='replicates per test (default: 500)')
@commands.argument('--alpha', type=open_level, help='rejection level (default: 0.05)')
@commands.argument('--threads', type=positive_int, help='worker threads for the replicates')
@_clustering_arguments
@commands.argument('--out', help='write the table to this file instead of stdout')
def simulate(options, command):
    """
    Synthetic studies swept over group sizes; summarizes S per size
    """
    if options.labels < 3:
        raise UsageError('--labels must be at least 3')
    if options.jitter < 0:
        raise UsageError('--jitter must be non-negative')
    config = _test_config(options)
    truth1, truth2 = simulation_truths(options.labels, config.seed, options.identical)
    rows = []
    for n in options.sizes:
        values = {metric: [] for metric in config.metrics()}
        for run in range(options.runs):
            seed = int(np.random.SeedSequence([config.seed, n, run]).generate_state(1)[0])
            spec = SynthSpec(
                truths={'A': truth1, 'B': truth2},
                sizes={'A': n, 'B': n},
                cut_height=options.cut,
                jitter=options.jitter,
                flip=options.flip,
                seed=seed,
            )
            result = perm_test(synth_generate(spec), 'A', 'B', replace(config, seed=seed))
            for metric in values:
                values[metric].append(result[metric].s_hat)
        for metric, s_values in values.items():
            s_values = np.array(s_values)
            rows.append(SimulationRow(
                n=n,
                runs=options.runs,
                metric=metric,
                mean_s=float(s_values.mean()),
                median_s=float(np.median(s_values)),
                rejected=float(np.mean(s_values < config.alpha)),
            ))
            logger.info('N=%d %s: median S %.4f', n, metric, rows[-1].median_s)
    return rows


@commands.command()
@commands.register_serializer(ReportSerializer)
@commands.argument('report', help='report file written by `cardtree test`')
@commands.argument('--scatter', help='write the per-replicate distance table here (metric both)')
@commands.argument('--out', help='write the output to this file instead of stdout')
def report(options, command):
    """
    Pretty-print a report
    """
    document = ReportDeserializer(load_document(options.report)).deserialize()
    if options.scatter:
        _write_scatters(list(document.comparisons), options.scatter)
    return document


def _configure_logging(options, stderr):
    if options.quiet:
        level = logging.ERROR
    else:
        level = max(logging.DEBUG, logging.WARNING - 10 * options.verbose)
    logging.basicConfig(level=level, stream=stderr, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('cardtree').setLevel(level)


def main(argv=None, stdout=None, stderr=None):
    """
    Run the command line; returns the exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = commands.build_parser()
    try:
        options = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write('{}: error: {}\n'.format(parser.prog, exc))
        return USAGE_ERROR
    except SystemExit as exc:
        # --help and --version
        return exc.code or 0
    _configure_logging(options, stderr)
    return options.command.decorated(options, stdout, stderr)
