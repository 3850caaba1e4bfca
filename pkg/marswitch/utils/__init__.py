from .checkers import check_random_state
from .checkers import check_positive_int


__all__ = ["check_random_state", "check_positive_int"]
