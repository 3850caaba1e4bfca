import numbers
import numpy as np


def check_random_state(seed):
    """Turn seed into a np.random.Generator instance

    Parameters
    ----------
    seed : None, int or instance of Generator
        If seed is None, return a freshly seeded Generator from OS entropy.
        If seed is an int, return a new Generator seeded with seed.
        If seed is already a Generator, return it.
        Otherwise raise ValueError.
    """
    if seed is None:
        return np.random.default_rng()
    if isinstance(seed, numbers.Integral):
        return np.random.default_rng(int(seed))
    if isinstance(seed, np.random.Generator):
        return seed
    raise ValueError('%r cannot be used to seed a numpy.random.Generator'
                     ' instance' % seed)


def check_positive_int(value, name, minimum=1):
    "Check that ``value`` is an integer larger or equal to ``minimum``."
    if not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(
            f"{name} should be an integer >= {minimum}. Got {value!r}."
        )
    return int(value)
