"A context manager to record the exceptions raised in a task."
import traceback
from contextlib import contextmanager


# Get config values
from ..config import DEBUG


class StatusHandler(object):
    def __init__(self):
        self.status = 'running'
        self.error = None


@contextmanager
def exception_handler(terminal):
    """Context manager recording the errors raised in a task.

    The error is stored in ``ctx.error`` and ``ctx.status`` is set to
    ``'error'``. It is re-raised when the ``debug`` setting is on.

    Parameter
    ---------
    terminal : TerminalOutput
        Object to display the status of the task.
    """
    ctx = StatusHandler()
    try:
        yield ctx
    except KeyboardInterrupt:
        print(end='', flush=True)
        ctx.status = 'interrupted'
        raise
    except Exception as e:
        print(end='', flush=True)
        ctx.status = 'error'
        ctx.error = e

        if DEBUG:
            terminal.show_status('error', reason=repr(e))
            raise
        terminal.debug(traceback.format_exc())
