import yaml
from joblib import parallel_config
from joblib import Parallel, delayed

from ..config import get_setting

PARALLEL_BACKENDS = ('loky', 'threading')


def parallel_run(func, kwargs_generator, config=None, ordered=True):
    """Evaluate ``func(**kwargs)`` for every kwargs of the generator.

    Parameters
    ----------
    func : callable
        Function run for each task. With the ``loky`` backend it should be
        importable at module level.
    kwargs_generator : iterable of dict
        Keyword arguments of each task.
    config : dict | None
        Parallel config, as returned by ``check_parallel_config``.
    ordered : bool
        If True, return the list of results in the order of the tasks.
        Otherwise, return a generator yielding the results as they complete.

    Returns
    -------
    results : list | generator
    """
    config = dict(config or {})
    backend = config.pop('backend', 'loky')
    assert backend in PARALLEL_BACKENDS, (
        f"Unknown backend {backend}. Valid backends: {PARALLEL_BACKENDS}."
    )
    n_jobs = config.get('n_jobs', 1)
    if n_jobs is None or n_jobs == 1:
        results = (func(**kwargs) for kwargs in kwargs_generator)
        return list(results) if ordered else results

    return_as = "list" if ordered else "generator_unordered"
    with parallel_config(backend, **config):
        return Parallel(return_as=return_as)(
            delayed(func)(**kwargs) for kwargs in kwargs_generator
        )


def check_parallel_config(parallel_config_file, n_jobs):
    """Returns the parallelism config information for a run.

    If nothing is provided, default to `loky` backend with the ``n_jobs``
    setting.

    Parameters
    ----------
    parallel_config_file: str or dict or None
        Path to the parallel config YAML file, or a dict containing the config
        information. If None, defaults to None.
    n_jobs: int or None
        Number of parallel jobs to run. If None, defaults to the ``n_jobs``
        setting.

    Returns
    -------
    parallel_config: dict
        The parallel config information for the run.
    """
    if parallel_config_file is not None:
        if not isinstance(parallel_config_file, dict):
            with open(parallel_config_file, "r") as f:
                parallel_config = yaml.safe_load(f) or {}
        else:
            parallel_config = dict(parallel_config_file)
        parallel_config.setdefault('backend', 'loky')
        if n_jobs is not None:
            parallel_config['n_jobs'] = n_jobs
    else:
        if n_jobs is None:
            n_jobs = get_setting('n_jobs')
        parallel_config = {'backend': 'loky', 'n_jobs': n_jobs}

    if parallel_config['backend'] not in PARALLEL_BACKENDS:
        raise ValueError(
            f"Unknown backend {parallel_config['backend']}. "
            f"Valid backends: {PARALLEL_BACKENDS}."
        )
    if parallel_config.get('n_jobs') == 0:
        raise ValueError("n_jobs should be != 0.")
    return parallel_config
