import os
import json

import pandas as pd
import pytest

from perspectivekit import cli
from perspectivekit import anova
from perspectivekit import client
from perspectivekit import corpus
from perspectivekit.client import transport
from perspectivekit.manifest import load_manifest

from helpers import DATA_DIR, gaussian_dataset


class CountingTransport(object):

    def __init__(self, fail=()):
        self.mock = transport.MockTransport()
        self.fail = set(fail)
        self.calls = 0

    def post(self, body):
        self.calls += 1
        if body['comment']['text'] in self.fail:
            return 400, None
        return self.mock.post(body)


@pytest.fixture
def counting(monkeypatch):
    transports = []

    def make_client(cfg):
        transports.append(CountingTransport())
        return client.PerspectiveClient(cfg, transport=transports[-1], sleep=lambda s: None)

    monkeypatch.setattr(cli, 'make_client', make_client)
    return transports


def tweet(i):
    text = 'tweet number {}'.format(i)
    if i % 8 == 0:
        text += ' i will kill you'
    elif i % 8 == 4:
        text += ' what the fuck'
    return text


def write_corpus(path, n):
    pd.DataFrame({
        'tweet': [tweet(i) for i in range(n)],
        'class': ['1' if i % 4 == 0 else '0' for i in range(n)],
    }).to_csv(str(path), index=False)
    return str(path)


def score(tmp_path, corpus_path, output, cache='cache'):
    return cli.main([
        'score', '--input', corpus_path, '--text-col', 'tweet', '--label-col', 'class',
        '--output', str(output), '--mode', 'mock', '--cache-dir', str(tmp_path / cache),
    ])


def test_score_mock_corpus(tmp_path, counting):
    corpus_path = write_corpus(tmp_path / 'tiny.csv', 3)
    output = tmp_path / 'tiny_scores.csv'
    assert score(tmp_path, corpus_path, output) == cli.EXIT_OK
    dataset = corpus.load_dataset(str(output))
    assert len(dataset) == 3
    assert dataset.ids == ('0', '1', '2')
    assert dataset.labels.tolist() == [1, 0, 0]
    assert counting[0].calls == 3

    first = output.read_bytes()
    assert score(tmp_path, corpus_path, output) == cli.EXIT_OK
    assert counting[1].calls == 0
    assert output.read_bytes() == first

    manifest = load_manifest(str(output) + '.manifest.json')
    assert manifest['command'] == 'score'
    assert list(manifest['inputs']) == ['tiny.csv']
    assert manifest['outputs'] == ['tiny_scores.csv']


def test_score_partial_success(tmp_path, monkeypatch):
    failing = CountingTransport(fail={tweet(1)})
    monkeypatch.setattr(cli, 'make_client', lambda cfg: client.PerspectiveClient(cfg, transport=failing))
    corpus_path = write_corpus(tmp_path / 'tiny.csv', 3)
    output = tmp_path / 'tiny_scores.csv'
    assert score(tmp_path, corpus_path, output) == cli.EXIT_PARTIAL
    assert corpus.load_dataset(str(output)).ids == ('0', '2')
    with open(str(output) + '.failures.json') as fd:
        failures = json.load(fd)
    assert [f['id'] for f in failures] == ['1']


def test_live_mode_needs_the_key(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv('PERSPECTIVE_API_KEY', raising=False)
    corpus_path = write_corpus(tmp_path / 'tiny.csv', 3)
    code = cli.main([
        'score', '--input', corpus_path, '--text-col', 'tweet', '--label-col', 'class',
        '--output', str(tmp_path / 'out.csv'), '--mode', 'live', '--cache-dir', str(tmp_path / 'cache'),
    ])
    assert code == cli.EXIT_ERROR
    assert 'PERSPECTIVE_API_KEY' in capsys.readouterr().err
    assert not (tmp_path / 'out.csv').exists()


def test_anova_table_shape(tmp_path, counting):
    scores = tmp_path / 'mock453.csv'
    assert score(tmp_path, write_corpus(tmp_path / 'corpus453.csv', 453), scores) == cli.EXIT_OK
    table_path = str(tmp_path / 'table.txt')
    assert cli.main(['anova', '--scores', str(scores), '--out', table_path]) == cli.EXIT_OK

    with open(table_path) as fd:
        lines = fd.read().splitlines()
    rows = lines[1:lines.index('---')]
    with open(os.path.join(DATA_DIR, 'anova_table_shape.txt')) as fd:
        assert [' '.join(r.split()[:2]) for r in rows] == fd.read().splitlines()

    json_path = str(tmp_path / 'table.json')
    assert cli.main(['anova', '--scores', str(scores), '--out', json_path, '--format', 'json']) == cli.EXIT_OK
    with open(json_path) as fd:
        terms = json.load(fd)['terms']
    for row, term in zip(rows, terms):
        tokens = row.split()
        assert tokens[0] == term['term']
        assert term['signif'] == anova.signif_code(term['p_value'])
        assert tokens[6:] == ([term['signif']] if term['signif'] else [])

    with open(cli.significance_path(table_path)) as fd:
        vector = json.load(fd)
    assert vector['terms'] == list(corpus.ATTRIBUTES)
    assert vector['dataset'] == 'mock453'
    manifest = load_manifest(table_path + '.manifest.json')
    assert manifest['outputs'] == ['table.txt', 'table.significance.json']


def saved(tmp_path, dataset):
    return corpus.save_dataset(dataset, str(tmp_path / (dataset.name + '.csv')))


def test_anova_interactions_and_sample_size(tmp_path):
    scores = saved(tmp_path, gaussian_dataset(150, 50, 0.4, 0.55, 0.1, seed=1, name='g200'))
    out = str(tmp_path / 'inter.txt')
    assert cli.main(['anova', '--scores', scores, '--out', out, '--interactions', 'TOXICITY:IDENTITY_ATTACK']) == 0
    with open(out) as fd:
        lines = fd.read().splitlines()
    rows = lines[1:lines.index('---')]
    assert rows[9].split()[:2] == ['TOXICITY:IDENTITY_ATTACK', '1']
    assert rows[10].split()[:2] == ['Residuals', '189']

    out = str(tmp_path / 'sampled.txt')
    assert cli.main(['anova', '--scores', scores, '--out', out, '--sample-size', '100', '--seed', '3']) == 0
    with open(out) as fd:
        residual = [line for line in fd.read().splitlines() if line.startswith('Residuals')]
    assert residual[0].split()[:2] == ['Residuals', '90']
    assert load_manifest(out + '.manifest.json')['seed'] == 3


def test_anova_unknown_term(tmp_path, capsys):
    scores = saved(tmp_path, gaussian_dataset(40, 20, 0.4, 0.55, 0.1, seed=1, name='g60'))
    code = cli.main(['anova', '--scores', scores, '--out', str(tmp_path / 't.txt'), '--order', 'TOXICITY,TOXCITY'])
    assert code == cli.EXIT_ERROR
    err = capsys.readouterr().err
    assert 'TOXCITY' in err
    assert 'SEVERE_TOXICITY' in err


def test_similarity_of_identical_files(tmp_path, capsys):
    scores = saved(tmp_path, gaussian_dataset(40, 20, 0.4, 0.55, 0.1, seed=2, name='g60'))
    table = str(tmp_path / 'g60.txt')
    assert cli.main(['anova', '--scores', scores, '--out', table]) == 0
    sig = cli.significance_path(table)
    capsys.readouterr()
    assert cli.main(['similarity', '--a', sig, '--b', sig, '--out', str(tmp_path / 'sim.json')]) == 0
    assert capsys.readouterr().out == '1.0\n'
    with open(str(tmp_path / 'sim.json')) as fd:
        assert json.load(fd) == {'a': 'g60', 'b': 'g60', 'similarity': 1.0}


def test_qq(tmp_path):
    scores = saved(tmp_path, gaussian_dataset(40, 20, 0.4, 0.55, 0.1, seed=3, name='g60'))
    out = tmp_path / 'qq.csv'
    assert cli.main(['qq', '--scores', scores, '--out', str(out)]) == 0
    frame = pd.read_csv(str(out))
    assert list(frame.columns) == ['theoretical', 'sample']
    assert len(frame) == 60
    assert frame['theoretical'].is_monotonic_increasing
    assert frame['sample'].is_monotonic_increasing


def test_resample_ten_to_four(tmp_path):
    source = saved(tmp_path, gaussian_dataset(10, 4, 0.4, 0.6, 0.1, seed=4, name='ten_four'))
    out = str(tmp_path / 'balanced.csv')
    assert cli.main(['resample', '--method', 'smote', '--k', '3', '--seed', '1', '--in', source, '--out', out]) == 0
    result = corpus.load_dataset(out)
    assert len(result) == 20
    assert result.class_counts() == {0: 10, 1: 10}


def test_resample_takes_defaults_from_config_file(tmp_path):
    source = saved(tmp_path, gaussian_dataset(10, 4, 0.4, 0.6, 0.1, seed=4, name='ten_four'))
    config_path = tmp_path / 'config.json'
    config_path.write_text(json.dumps({'sampler': {'k_neighbors': 3}}))
    out = str(tmp_path / 'balanced.csv')
    assert cli.main(['resample', '--method', 'smote', '--in', source, '--out', out]) == cli.EXIT_ERROR
    assert cli.main(['--config', str(config_path), 'resample', '--method', 'smote', '--in', source, '--out', out]) == 0
    assert len(corpus.load_dataset(out)) == 20


def test_eval_grid(tmp_path, capsys):
    train = saved(tmp_path, gaussian_dataset(60, 12, 0.4, 0.6, 0.1, seed=5, name='train'))
    test = saved(tmp_path, gaussian_dataset(30, 30, 0.4, 0.6, 0.1, seed=6, name='test'))
    out = str(tmp_path / 'grid.json')
    assert cli.main(['eval', '--train', train, '--test', test, '--k', '3', '--m', '5', '--seed', '7', '--out', out]) == 0
    with open(out) as fd:
        reports = json.load(fd)
    assert len(reports) == 18
    assert {r['sampler'] for r in reports} == {'none', 'smote', 'borderline_smote'}
    stdout = capsys.readouterr().out
    for metric in ('precision', 'recall', 'f1', 'accuracy'):
        assert metric in stdout
    assert load_manifest(out + '.manifest.json')['seed'] == 7


def test_no_subcommand():
    assert cli.main([]) == cli.EXIT_ERROR


def run_pipeline(root, corpus_path):
    root.mkdir()
    scores = root / 'scores.csv'
    assert score(root, corpus_path, scores) == cli.EXIT_OK
    assert cli.main(['anova', '--scores', str(scores), '--out', str(root / 'anova.txt')]) == cli.EXIT_OK
    assert cli.main(['resample', '--method', 'borderline_smote', '--seed', '11',
                     '--in', str(scores), '--out', str(root / 'balanced.csv')]) == cli.EXIT_OK
    assert cli.main(['eval', '--train', str(scores), '--test', str(root / 'balanced.csv'),
                     '--samplers', 'none,smote', '--classifiers', 'knn,gnb,dtree',
                     '--seed', '11', '--out', str(root / 'grid.json')]) == cli.EXIT_OK
    names = ['scores.csv', 'anova.txt', 'anova.significance.json', 'balanced.csv', 'grid.json']
    return {name: (root / name).read_bytes() for name in names}


def test_offline_pipeline_is_reproducible(tmp_path, counting):
    corpus_path = write_corpus(tmp_path / 'corpus500.csv', 500)
    first = run_pipeline(tmp_path / 'first', corpus_path)
    second = run_pipeline(tmp_path / 'second', corpus_path)
    assert first == second
    assert [t.calls for t in counting] == [500, 500]
