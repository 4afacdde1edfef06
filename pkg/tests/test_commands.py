import json

import pytest


@pytest.fixture
def read_doc():
    def read(path):
        with open(path, encoding='utf-8') as f:
            return json.load(f)
    return read


def test_validate_corpus(runner, corpus_path):
    result = runner.invoke(args=['validate', corpus_path('algebras', 'm2-f2.json'),
                                 corpus_path('modules', 'ut2-f2-regular.json')])
    assert result.exit_code == 0
    assert result.output.count(': ok') == 2


def test_validate_reports_violations(runner, write_doc):
    bad = write_doc('bad.json', {'p': 2, 'dim': 2, 'unit': [1, 0],
                                 'structure_constants': [[[1, 1], [1, 1]], [[1, 1], [1, 1]]]})
    result = runner.invoke(args=['validate', bad])
    assert result.exit_code == 1
    assert 'violation' in result.output


def test_validate_parse_error(runner, write_doc, corpus_path):
    broken = write_doc('broken.json', '{"p": 2,')
    result = runner.invoke(args=['validate', corpus_path('algebras', 'f2.json'), broken])
    assert result.exit_code == 2


def test_decompose_and_verify(runner, corpus_path, tmp_path, read_doc):
    module = corpus_path('modules', 'ut2-f2-regular.json')
    out = str(tmp_path / 'cert.json')
    result = runner.invoke(args=['decompose', module, '--seed', '3', '--out', out])
    assert result.exit_code == 0, result.output
    doc = read_doc(out)
    assert doc['kind'] == 'decomposition'
    assert doc['seed'] == 3
    assert sorted(doc['payload']['decomposition']['dims']) == [1, 2]

    result = runner.invoke(args=['verify', out, module])
    assert result.exit_code == 0, result.output
    assert 'verified' in result.output


def test_verify_rejects_tampering(runner, corpus_path, tmp_path, read_doc, write_doc):
    out = str(tmp_path / 'cert.json')
    runner.invoke(args=['decompose', corpus_path('modules', 'ut2-f2-regular.json'), '--out', out])
    doc = read_doc(out)
    doc['payload']['decomposition']['injections'][0]['entries'][0][0] ^= 1
    result = runner.invoke(args=['verify', write_doc('tampered.json', doc)])
    assert result.exit_code == 1


def test_decompose_inconclusive(runner, corpus_path, tmp_path, read_doc):
    out = str(tmp_path / 'cert.json')
    result = runner.invoke(args=['decompose', corpus_path('modules', 'ut2-f2-regular.json'),
                                 '--budget', '1', '--out', out])
    assert result.exit_code == 3
    assert read_doc(out)['conclusive'] is False


def test_oracle_budget(runner, corpus_path):
    result = runner.invoke(args=['oracle', corpus_path('algebras', 'm2-f2.json'), '--budget', '4'])
    assert result.exit_code == 4


def test_oracle_on_algebra_and_module(runner, corpus_path, tmp_path, read_doc):
    out = str(tmp_path / 'lemma3.json')
    result = runner.invoke(args=['oracle', corpus_path('algebras', 'ut2-f2.json'), '--out', out])
    assert result.exit_code == 0, result.output
    assert read_doc(out)['payload']['report']['ok'] is True

    out = str(tmp_path / 'oracle.json')
    result = runner.invoke(args=['oracle', corpus_path('modules', 'ut2-f2-semisimple.json'), '--out', out])
    assert result.exit_code == 0, result.output
    assert read_doc(out)['payload']['decomposition']['dims'] == [1, 1]


def test_equiv(runner, corpus_path, tmp_path, read_doc):
    module = corpus_path('modules', 'ut2-f2-regular.json')
    first, second = str(tmp_path / 'a.json'), str(tmp_path / 'b.json')
    runner.invoke(args=['decompose', module, '--seed', '1', '--out', first])
    runner.invoke(args=['decompose', module, '--seed', '4', '--out', second])
    out = str(tmp_path / 'equiv.json')
    result = runner.invoke(args=['equiv', first, second, '--out', out])
    assert result.exit_code == 0, result.output
    assert sorted(read_doc(out)['payload']['sigma']) == [0, 1]

    result = runner.invoke(args=['verify', out, module])
    assert result.exit_code == 0, result.output


def test_conjugate(runner, corpus_path, write_doc, tmp_path, read_doc):
    E = write_doc('e.json', {'idempotents': [[1, 0, 0, 0], [0, 0, 0, 1]]})
    F = write_doc('f.json', {'idempotents': [[1, 1, 0, 0], [0, 1, 0, 1]]})
    out = str(tmp_path / 'conj.json')
    result = runner.invoke(args=['conjugate', corpus_path('algebras', 'm2-f2.json'), E, F, '--out', out])
    assert result.exit_code == 0, result.output
    assert read_doc(out)['kind'] == 'conjugation'

    result = runner.invoke(args=['verify', out])
    assert result.exit_code == 0, result.output


def test_conjugate_rejects_incomplete_sets(runner, corpus_path, write_doc):
    E = write_doc('e.json', {'idempotents': [[1, 0, 0, 0]]})
    F = write_doc('f.json', {'idempotents': [[1, 0, 0, 0], [0, 0, 0, 1]]})
    result = runner.invoke(args=['conjugate', corpus_path('algebras', 'm2-f2.json'), E, F])
    assert result.exit_code == 1


def test_endo(runner, corpus_path, tmp_path, read_doc):
    out = str(tmp_path / 'local.json')
    result = runner.invoke(args=['endo', corpus_path('algebras', 'f4.json'), '--out', out])
    assert result.exit_code == 0, result.output
    assert read_doc(out)['payload']['locality']['verdict'] == 'Local'

    out = str(tmp_path / 'end.json')
    result = runner.invoke(args=['endo', corpus_path('modules', 'ut2-f2-regular.json'), '--out', out])
    assert result.exit_code == 0, result.output
    doc = read_doc(out)
    assert doc['kind'] == 'endomorphism'
    assert doc['payload']['locality']['verdict'] == 'NotLocal'


def test_idempotents(runner, corpus_path, tmp_path, read_doc):
    out = str(tmp_path / 'idems.json')
    result = runner.invoke(args=['idempotents', corpus_path('algebras', 'm2-f2.json'), '--out', out])
    assert result.exit_code == 0, result.output
    assert len(read_doc(out)['payload']['idempotents']) == 2

    result = runner.invoke(args=['validate', out])
    assert result.exit_code == 0, result.output


def test_theorem(runner, corpus_path, tmp_path, read_doc):
    out = str(tmp_path / 'theorem.json')
    result = runner.invoke(args=['theorem', corpus_path('modules', 'ut2-f2-semisimple.json'),
                                 corpus_path('modules', 'f2-zero.json'), '--out', out])
    assert result.exit_code == 0, result.output
    doc = read_doc(out)
    assert doc['kind'] == 'main-theorem'
    assert doc['payload']['report']['ok'] is True
    assert len(doc['payload']['modules']) == 2


def test_verify_monte_carlo_certificate(runner, corpus_path, tmp_path, read_doc):
    out = str(tmp_path / 'local.json')
    result = runner.invoke(args=['endo', corpus_path('algebras', 'f4.json'), '--budget', '1', '--out', out])
    assert result.exit_code == 3
    assert read_doc(out)['conclusive'] is False

    # within the verifier's budget the Local claim is rescanned exhaustively
    result = runner.invoke(args=['verify', out, corpus_path('algebras', 'f4.json')])
    assert result.exit_code == 0, result.output

    result = runner.invoke(args=['verify', out, '--budget', '2'])
    assert result.exit_code == 3


def test_validate_reverifies_certificates(runner, corpus_path, tmp_path, read_doc, write_doc):
    out = str(tmp_path / 'cert.json')
    runner.invoke(args=['decompose', corpus_path('modules', 'ut2-f2-regular.json'), '--out', out])
    result = runner.invoke(args=['validate', out])
    assert result.exit_code == 0, result.output
    assert '(certificate): ok' in result.output

    doc = read_doc(out)
    doc['payload']['decomposition']['projections'][0]['entries'][0][0] ^= 1
    result = runner.invoke(args=['validate', write_doc('tampered.json', doc)])
    assert result.exit_code == 1
    assert '1 violation(s)' in result.output
