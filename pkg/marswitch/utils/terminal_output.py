"Helper function for colored terminal outputs"
import shutil
import ctypes
import platform
import sys

if sys.platform == 'win32':
    sys.stdout.reconfigure(encoding='utf-8')

from ..config import DEBUG

MIN_LINE_LENGTH = 20
BLACK, RED, GREEN, YELLOW, BLUE, MAGENTA, CYAN, WHITE = range(30, 38)


STATUS = {
    'error': ("error", RED),
    'diverged': ("diverged", RED),
    'interrupted': ("interrupted", YELLOW),
    'skip': ('skip', YELLOW),
    'max_runs': ("done (max sweeps reached)", YELLOW),
    'done': ("done", GREEN),
}


def colorify(message, color=BLUE):
    """Change color of the standard output.

    Parameters
    ----------
    message : str
        The message to color.

    Returns
    -------
    color_message : str
        The colored message to be displayed in terminal.
    """
    return f"\033[1;{color}m" + message + "\033[0m"


def print_normalize(msg, endline=True, verbose=True):
    """Format the output to have the length of the terminal."""
    if not verbose:
        return

    line_length = max(
        MIN_LINE_LENGTH, shutil.get_terminal_size((100, 24)).columns
    )

    # We add colors to messages using `\033[1;XXm{}\0033[0m`. This adds 11
    # invisible characters for each color we add. Don't take this into
    # account for the line length.
    n_colors = msg.count('\033') // 2
    msg = msg.ljust(line_length + n_colors * 11)

    if endline:
        print(msg, flush=True)
    else:
        print(msg + '\r', end='', flush=True)


class TerminalOutput:
    """Display the progress of a command.

    Parameters
    ----------
    n_tasks : int | None
        Number of tasks (grid points or replications) displayed in the
        progress line.
    verbose : bool
        If False, only errors and debug lines are printed.
    """
    def __init__(self, n_tasks=None, verbose=True):
        # enable ANSI colors in Windows
        if platform.system() == "Windows":
            kernel32 = ctypes.windll.kernel32
            kernel32.SetConsoleMode(kernel32.GetStdHandle(-11), 7)

        self.n_tasks = n_tasks
        self.verbose = verbose
        self.task = None
        self.task_tag = ""
        self.n_done = 0

    def set(self, task=None, n_tasks=None, verbose=None):
        if task is not None:
            self.task = task
            self.task_tag = colorify(f"|--{task}:")
        if n_tasks is not None:
            self.n_tasks = n_tasks
            self.n_done = 0
        if verbose is not None:
            self.verbose = verbose

    def info(self, msg):
        print_normalize(msg, verbose=self.verbose)

    def progress(self, n_done=None):
        """Display the number of completed tasks on a single line."""
        self.n_done = self.n_done + 1 if n_done is None else n_done
        if self.n_tasks:
            print_normalize(
                f"{self.task_tag} {self.n_done / self.n_tasks:6.1%} "
                f"({self.n_done} / {self.n_tasks})",
                endline=False, verbose=self.verbose
            )

    def show_status(self, status, reason=None):
        assert status in STATUS, (
            f"status should be in {list(STATUS)}. Got '{status}'"
        )
        status_print = colorify(*STATUS[status])
        verbose = self.verbose or status in ('error', 'diverged')
        print_normalize(f"{self.task_tag} {status_print}", verbose=verbose)
        if reason is not None and verbose:
            print(f'    Reason: {reason}')

    def savefile_status(self, save_file=None):
        if save_file is None:
            print_normalize(colorify('No output produced.', RED),
                            verbose=self.verbose)
            return
        print_normalize(colorify(f'Saving result in: {save_file}', GREEN),
                        verbose=self.verbose)

    def debug(self, msg):
        if DEBUG:
            print_normalize(f"{self.task_tag} [DEBUG] - {msg}")
