import json

import pytest

from cert.cli import main, OK, VIOLATION, USAGE

def write(tmp_path, name, source):
    filename = tmp_path / name
    filename.write_text(source)
    return str(filename)

def test_typecheck(path, capsys):
    assert main(['typecheck', path('geometric_charge')]) == OK
    assert capsys.readouterr().out.strip() == 'F nat'

def test_typecheck_error(path, capsys):
    assert main(['typecheck', path('ill_typed_app')]) == USAGE
    err = capsys.readouterr().err
    assert 'NotAFunction' in err
    assert ':2:' in err

def test_typecheck_error_json(path, capsys):
    assert main(['typecheck', '--json', path('ill_typed_app')]) == USAGE
    payload = json.loads(capsys.readouterr().out)
    assert payload['kind'] == 'NotAFunction'
    assert payload['line'] == 2

def test_parse_error(tmp_path, capsys):
    assert main(['typecheck', write(tmp_path, 'bad.cert', 'produce')]) == USAGE
    assert capsys.readouterr().err

def test_missing_file(tmp_path):
    assert main(['typecheck', str(tmp_path / 'missing.cert')]) == USAGE

def test_bad_arguments():
    with pytest.raises(SystemExit) as e:
        main(['estimate'])
    assert e.value.code == USAGE

def test_run(path, capsys):
    assert main(['run', '--json', '--seed', '3', path('mixed')]) == OK
    payload = json.loads(capsys.readouterr().out)
    assert payload['status'] == 'terminated'
    assert payload['cost'] in (0, 1)
    assert payload['seed'] == 3

def test_estimate(tmp_path, capsys):
    filename = write(tmp_path, 'c.cert', 'charge(3); produce ()')
    assert main(['estimate', '--samples', '50', filename]) == OK
    assert 'mean=3.000000' in capsys.readouterr().out

def test_estimate_seeds(path, capsys):
    assert main(['estimate', path('geometric_charge'), '--json', '--samples', '300', '--seeds', '1', '2']) == OK
    payload = json.loads(capsys.readouterr().out)
    assert payload['seed'] == [1, 2]
    assert payload['terminated'] == 300

def test_dist(path, capsys):
    assert main(['dist', path('mixed')]) == OK
    out = capsys.readouterr().out
    assert 'mass 1' in out
    assert 'expected cost 1/2' in out

def test_analyze(path, capsys):
    assert main(['analyze', '--tol', '1/1000000', path('geometric_charge')]) == OK
    out = capsys.readouterr().out
    assert 'converged=True' in out
    assert 'ec=2.000000' in out

def test_analyze_not_converged(path):
    args = ['analyze', '--arg', '2', '--arg', '1', '--max-depth', '8', path('random_walk')]
    assert main(args) == VIOLATION

def test_analyze_threshold(path, capsys):
    args = ['analyze', '--arg', '2', '--arg', '1', '--threshold', '10', '--max-depth', '64', path('random_walk')]
    assert main(args) == OK
    assert 'exceeded=True' in capsys.readouterr().out

def test_analyze_continuous(path):
    assert main(['analyze', path('uniform_mean')]) == USAGE

def test_pre_check(path):
    assert main(['pre', '--check', '--reward', 'identity', '--arg', '5', path('factorial')]) == OK

def test_pre_indicator(path, capsys):
    assert main(['pre', '--reward', 'indicator:0', '--depth', '4', path('mixed')]) == OK
    assert capsys.readouterr().out.strip() == '1'

def test_pre_reward_file(tmp_path, path, capsys):
    filename = write(tmp_path, 'reward.json', '[["0", "1"], ["2", "1/2"]]')
    assert main(['pre', '--reward', filename, '--depth', '4', path('mixed')]) == OK
    # 1/2 of cost, 1/2 * 1 for the value 0, 1/2 * 1/2 for the value 2
    assert capsys.readouterr().out.strip() == '5/4'

def test_pre_reward_file_default_zero(tmp_path, path, capsys):
    filename = write(tmp_path, 'reward.json', '[["2", 4]]')
    assert main(['pre', '--reward', filename, path('mixed')]) == OK
    assert capsys.readouterr().out.strip() == '5/2'

def test_pre_reward_file_check(tmp_path, path):
    filename = write(tmp_path, 'reward.json', '[["0", "1"], ["2", "1/2"]]')
    assert main(['pre', '--check', '--reward', filename, path('mixed')]) == OK

@pytest.mark.parametrize('content', [
    '{"0": 1}',
    '[["0"]]',
    '[["0", "one"]]',
    '[["0", 0.5]]',
    'not json',
])
def test_pre_reward_file_malformed(tmp_path, path, content):
    filename = write(tmp_path, 'reward.json', content)
    assert main(['pre', '--reward', filename, path('mixed')]) == USAGE

def test_pre_unknown_reward(path):
    assert main(['pre', '--reward', 'gold', path('mixed')]) == USAGE

def test_rewrite(tmp_path, capsys):
    filename = write(tmp_path, 'c.cert', 'charge(2); charge(3); produce ()')
    assert main(['rewrite', '--rules', 'ChargeMerge', filename]) == OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == 'charge(5); produce ()'
    assert out[1] == 'ChargeMerge at []'

def test_rewrite_unknown_rule(tmp_path):
    filename = write(tmp_path, 'c.cert', 'produce 0')
    assert main(['rewrite', '--rules', 'Teleport', filename]) == USAGE

def test_check_eq(tmp_path):
    a = write(tmp_path, 'a.cert', 'charge(2); charge(3); produce ()')
    b = write(tmp_path, 'b.cert', 'charge(5); produce ()')
    c = write(tmp_path, 'c.cert', 'charge(4); produce ()')
    assert main(['check-eq', a, b]) == OK
    assert main(['check-eq', a, c]) == VIOLATION

def test_crosscheck_file(path, tmp_path):
    output = str(tmp_path / 'report.json')
    assert main(['crosscheck', '--samples', '300', '-o', output, path('mixed')]) == OK
    with open(output) as fo:
        assert json.load(fo)['reports'][0]['recursion_free_equality']

def test_laws(capsys):
    assert main(['laws', '--json', '--instances', '20']) == OK
    payload = json.loads(capsys.readouterr().out)
    assert payload['passed']
    assert payload['counterexample']['strict']
