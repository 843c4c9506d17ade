"""
Command line interface: one subcommand per pipeline stage.

Exit codes: 0 success, 1 error, 2 partial success (some texts could not be scored or
some grid cells failed). Every output file gets a <output>.manifest.json next to it.
"""

import os
import sys
import argparse

from . import util
from . import anova
from . import config
from . import corpus
from . import client
from . import similarity
from . import resampling
from . import evaluation
from . import classifiers
from . import PerspectiveKitException
from .config import ConfigurationError
from .manifest import RunManifest

log = config.log

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def _mapping(args):
    if args.positive_classes:
        return corpus.label_mapping('custom', [c.strip() for c in args.positive_classes.split(',') if c.strip()])
    return corpus.MAPPINGS[args.mapping]


def make_client(client_config):
    return client.PerspectiveClient(client_config)


def cmd_score(args):
    manifest = RunManifest('score', vars_of(args))
    instances = corpus.load_corpus(manifest.add_input(args.input), args.text_col, args.label_col, id_column=args.id_col)
    mapping = _mapping(args)
    labels = dict(corpus.binarize(instances, mapping))

    cfg = client.client_config(mode=args.mode, cache_dir=args.cache_dir, qps_limit=args.qps, workers=args.workers)
    result = make_client(cfg).analyze_corpus(instances)
    dataset = corpus.from_scores(args.name or _stem(args.output), result.scored, labels)
    log.info('%s: class counts %s under mapping %s' % (dataset.name, dataset.class_counts(), mapping.name))

    corpus.save_dataset(dataset, manifest.add_output(args.output))
    if result.failures:
        failures_path = manifest.add_output(args.output + '.failures.json')
        util.write_json(failures_path, [f._asdict() for f in result.failures])
        sys.stderr.write('{} of {} texts could not be scored, see {}\n'.format(
            len(result.failures), len(instances), failures_path))
    manifest.write(args.output)
    return EXIT_PARTIAL if result.failures else EXIT_OK


def _model(args, dataset):
    main_terms = util.parse_list(args.order) or corpus.ATTRIBUTES
    return anova.model_spec(main_terms, util.parse_list(args.interactions), not args.no_intercept,
                            valid_terms=dataset.feature_names)


def _sample(args, dataset):
    if args.sample_size is None:
        return dataset
    if not 0 < args.sample_size <= len(dataset):
        raise ConfigurationError('--sample-size must be in 1..{}, got {}'.format(len(dataset), args.sample_size))
    rng = util.make_rng(util.derive_seed(args.seed, 'anova-sample'))
    rows = sorted(rng.choice(len(dataset), size=args.sample_size, replace=False).tolist())
    log.info('fitting on %d of %d rows' % (args.sample_size, len(dataset)))
    return dataset.subset(rows)


def significance_path(out):
    return os.path.splitext(out)[0] + '.significance.json'


def cmd_anova(args):
    manifest = RunManifest('anova', vars_of(args), seed=args.seed if args.sample_size else None)
    dataset = corpus.load_dataset(manifest.add_input(args.scores))
    spec = _model(args, dataset)
    table, diagnostics = anova.anova(_sample(args, dataset), spec)

    render = anova.render_json if args.format == 'json' else anova.render_text
    with open(manifest.add_output(args.out), 'w', encoding='utf-8', newline='\n') as fd:
        fd.write(render(table, diagnostics))
    similarity.save_vector(
        anova.significance_vector(table, dataset=dataset.name),
        manifest.add_output(significance_path(args.out)),
    )
    manifest.write(args.out)
    return EXIT_OK


def cmd_similarity(args):
    manifest = RunManifest('similarity', vars_of(args))
    u = similarity.load_vector(manifest.add_input(args.a))
    v = similarity.load_vector(manifest.add_input(args.b))
    score = similarity.similarity(u, v)
    print(repr(score))
    if args.out:
        util.write_json(manifest.add_output(args.out), {'a': u.dataset, 'b': v.dataset, 'similarity': score})
        manifest.write(args.out)
    return EXIT_OK


def cmd_qq(args):
    manifest = RunManifest('qq', vars_of(args))
    dataset = corpus.load_dataset(manifest.add_input(args.scores))
    _, diagnostics = anova.anova(dataset, _model(args, dataset))
    points = anova.qq_data(diagnostics)
    with open(manifest.add_output(args.out), 'w', encoding='utf-8', newline='\n') as fd:
        fd.write('theoretical,sample\n')
        for p in points:
            fd.write('{!r},{!r}\n'.format(p.theoretical, p.sample))
    manifest.write(args.out)
    return EXIT_OK


def _sampler(method, args, seed):
    return resampling.sampler_config(
        method,
        k_neighbors=args.k,
        m_neighbors=args.m,
        seed=seed,
        target_ratio=args.target_ratio,
    )


def cmd_resample(args):
    manifest = RunManifest('resample', vars_of(args), seed=args.seed)
    dataset = corpus.load_dataset(manifest.add_input(args.input))
    sampler = _sampler(args.method, args, util.derive_seed(args.seed, 'resample'))
    log.info('%s: class counts %s before %s' % (dataset.name, dataset.class_counts(), sampler.method))
    result = resampling.resample(dataset, sampler)
    corpus.save_dataset(result, manifest.add_output(args.out))
    manifest.write(args.out)
    return EXIT_OK


def cmd_eval(args):
    manifest = RunManifest('eval', vars_of(args), seed=args.seed)
    train = corpus.load_dataset(manifest.add_input(args.train))
    test = corpus.load_dataset(manifest.add_input(args.test))
    samplers = [_sampler(method, args, 0) for method in util.parse_list(args.samplers)]
    names = list(util.parse_list(args.classifiers)) or list(classifiers.CLASSIFIERS)

    reports = evaluation.run_grid(train, test, samplers, names, seed=args.seed, workers=args.workers)
    util.write_json(manifest.add_output(args.out), [evaluation.report_document(r) for r in reports])
    manifest.write(args.out)
    for metric in evaluation.METRICS:
        print(evaluation.render_grid(reports, metric))
    return EXIT_PARTIAL if any(r.error for r in reports) else EXIT_OK


def vars_of(args):
    return {k: v for k, v in vars(args).items() if k != 'func'}


def _model_arguments(parser):
    parser.add_argument('--order', help='comma-separated main terms in model order (default: all nine scores)')
    parser.add_argument('--interactions', help='comma-separated A:B interaction terms, entered after the main terms')
    parser.add_argument('--no-intercept', action='store_true', help='fit without an intercept column')


def _sampler_arguments(parser):
    parser.add_argument('--k', type=int, help='nearest minority neighbors for interpolation')
    parser.add_argument('--m', type=int, help='nearest neighbors for borderline danger detection')
    parser.add_argument('--target-ratio', type=float, help='minority/majority ratio after sampling')


score_desc = """
example:
perspectivekit score --input davidson.csv --text-col tweet --label-col class --mapping davidson --output davidson_scores.csv --mode mock
"""

anova_desc = """
example:
perspectivekit anova --scores davidson_scores.csv --interactions TOXICITY:IDENTITY_ATTACK --out davidson_anova.txt
"""

eval_desc = """
example:
perspectivekit eval --train davidson_scores.csv --test blm_scores.csv --samplers none,smote,borderline_smote --seed 7 --out grid.json
"""


def build_parser():
    parser = argparse.ArgumentParser(prog='perspectivekit', description='Perspective Scores as features for hate speech datasets')
    parser.add_argument('--config', help='JSON config file')
    parser.add_argument('--log-level', choices=['debug', 'info', 'warning', 'error', 'critical'])
    subparsers = parser.add_subparsers(help='operation to perform')

    score_parser = subparsers.add_parser(
            name='score',
            help='score a labeled text corpus',
            description=score_desc,
            formatter_class=argparse.RawDescriptionHelpFormatter,
            )
    score_parser.add_argument('--input', required=True, help='CSV corpus')
    score_parser.add_argument('--text-col', required=True)
    score_parser.add_argument('--label-col', required=True)
    score_parser.add_argument('--id-col', help='id column (default: row index)')
    score_parser.add_argument('--output', required=True, help='score CSV to write')
    score_parser.add_argument('--name', help='dataset name (default: output file stem)')
    score_parser.add_argument('--mode', choices=client.MODES)
    score_parser.add_argument('--cache-dir')
    score_parser.add_argument('--qps', type=float)
    score_parser.add_argument('--workers', type=int)
    score_parser.add_argument('--mapping', choices=sorted(corpus.MAPPINGS), default='binary', help='named label mapping')
    score_parser.add_argument('--positive-classes', help='comma-separated raw labels mapped to 1; overrides --mapping')
    score_parser.set_defaults(func=cmd_score)

    anova_parser = subparsers.add_parser(
            name='anova',
            help='sequential ANOVA table and significance vector',
            description=anova_desc,
            formatter_class=argparse.RawDescriptionHelpFormatter,
            )
    anova_parser.add_argument('--scores', required=True, help='score CSV')
    _model_arguments(anova_parser)
    anova_parser.add_argument('--format', choices=['text', 'json'], default='text')
    anova_parser.add_argument('--out', required=True)
    anova_parser.add_argument('--sample-size', type=int, help='fit on a seeded random subset of this many rows')
    anova_parser.add_argument('--seed', type=int, default=0)
    anova_parser.set_defaults(func=cmd_anova)

    similarity_parser = subparsers.add_parser(name='similarity', help='similarity of two significance vectors')
    similarity_parser.add_argument('--a', required=True)
    similarity_parser.add_argument('--b', required=True)
    similarity_parser.add_argument('--out', help='also write the result as JSON')
    similarity_parser.set_defaults(func=cmd_similarity)

    qq_parser = subparsers.add_parser(name='qq', help='normal Q-Q points of the ANOVA residuals')
    qq_parser.add_argument('--scores', required=True)
    _model_arguments(qq_parser)
    qq_parser.add_argument('--out', required=True, help='CSV of theoretical,sample quantiles')
    qq_parser.set_defaults(func=cmd_qq)

    resample_parser = subparsers.add_parser(name='resample', help='oversample the minority class')
    resample_parser.add_argument('--method', required=True, choices=[m.value for m in resampling.Method])
    resample_parser.add_argument('--in', dest='input', required=True)
    resample_parser.add_argument('--out', required=True)
    resample_parser.add_argument('--seed', type=int, default=0)
    _sampler_arguments(resample_parser)
    resample_parser.set_defaults(func=cmd_resample)

    eval_parser = subparsers.add_parser(
            name='eval',
            help='cross-dataset evaluation grid',
            description=eval_desc,
            formatter_class=argparse.RawDescriptionHelpFormatter,
            )
    eval_parser.add_argument('--train', required=True)
    eval_parser.add_argument('--test', required=True)
    eval_parser.add_argument('--samplers', default='none,smote,borderline_smote')
    eval_parser.add_argument('--classifiers', help='comma-separated; default: ' + ','.join(classifiers.CLASSIFIERS))
    eval_parser.add_argument('--seed', type=int, default=0)
    eval_parser.add_argument('--workers', type=int)
    eval_parser.add_argument('--out', required=True, help='JSON report array')
    _sampler_arguments(eval_parser)
    eval_parser.set_defaults(func=cmd_eval)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, 'func'):
        parser.print_usage(sys.stderr)
        return EXIT_ERROR
    try:
        if args.config:
            config.load_file(args.config)
        if args.log_level:
            config.set_log_level(args.log_level)
        return args.func(args)
    except (PerspectiveKitException, OSError, ValueError) as e:
        log.debug('%s failed' % args.func.__name__, exc_info=True)
        sys.stderr.write('perspectivekit: error: {}\n'.format(e))
        return EXIT_ERROR
