import pytest

from marswitch.parallel_backends import parallel_run
from marswitch.parallel_backends import check_parallel_config


def square(x):
    return x * x


def test_default_config():
    cfg = check_parallel_config(None, None)
    assert cfg == {'backend': 'loky', 'n_jobs': 1}


def test_config_from_file(tmp_path):
    parallel_config_file = tmp_path / "parallel_config.yml"
    parallel_config_file.write_text("backend: threading\nn_jobs: 3\n")

    cfg = check_parallel_config(parallel_config_file, n_jobs=None)
    assert cfg == {'backend': 'threading', 'n_jobs': 3}

    # The CLI value of n_jobs takes precedence over the file.
    cfg = check_parallel_config(parallel_config_file, n_jobs=2)
    assert cfg['n_jobs'] == 2


def test_unknown_backend():
    with pytest.raises(ValueError, match="Unknown backend dask"):
        check_parallel_config({'backend': 'dask'}, n_jobs=2)


@pytest.mark.parametrize('n_jobs', [1, 2])
@pytest.mark.parametrize('backend', ['loky', 'threading'])
def test_parallel_run_ordered(backend, n_jobs):
    config = check_parallel_config({'backend': backend}, n_jobs)
    results = parallel_run(square, ({'x': i} for i in range(10)), config)
    assert results == [i * i for i in range(10)]


def test_parallel_run_unordered():
    config = check_parallel_config({'backend': 'threading'}, 2)
    results = parallel_run(
        square, ({'x': i} for i in range(10)), config, ordered=False
    )
    assert sorted(results) == [i * i for i in range(10)]


def test_default_n_jobs_from_setting(monkeypatch):
    monkeypatch.setenv('MARSWITCH_N_JOBS', '3')
    assert check_parallel_config(None, None)['n_jobs'] == 3
    assert check_parallel_config(None, 2)['n_jobs'] == 2

    with pytest.raises(ValueError, match="n_jobs should be != 0"):
        check_parallel_config(None, 0)
