import math

# Relative SSQ change under which the alternating updates have converged.
EPS = 1e-8
MAX_SWEEPS = 200

# SSQ below EXACT_FIT * total sum of squares is a perfect fit: the relative
# change is then dominated by rounding and is not monitored anymore.
EXACT_FIT = 1e-26

# Relative increase of SSQ tolerated between two sweeps before flagging it.
DESCENT_TOL = 1e-10

STATUSES = ['running', 'done', 'max_runs', 'diverged']


class StoppingCriterion():
    """Class to check if we need to stop the alternating least squares.

    This base class checks for divergence (non-finite SSQ), exact fits and
    the maximal number of sweeps. It should be sub-classed to check for the
    convergence of the SSQ trace in ``check_convergence``.

    Instances used in a fit should be created with
    ``cls.get_runner_instance``, so that each fit owns its state.

    Parameters
    ----------
    max_sweeps : int
        Maximal number of full alternating sweeps.
    **kwargs : dict
        All parameters passed when instantiating the criterion. They are used
        to re-create the criterion in ``get_runner_instance``.
    """
    kwargs = None

    def __init__(self, max_sweeps=MAX_SWEEPS, **kwargs):
        if max_sweeps < 1:
            raise ValueError(f"max_sweeps should be >= 1. Got {max_sweeps}.")
        self.kwargs = kwargs
        self.max_sweeps = max_sweeps

    def get_runner_instance(self, scale=1.0, terminal=None, run_key=None):
        """Copy the criterion and set the parameters of one fit.

        Parameters
        ----------
        scale : float
            Total sum of squares of the fitted data, used to detect exact
            fits.
        terminal : TerminalOutput or None
            Object to display debug lines.
        run_key : str or None
            Name of the fit, used in the debug lines.

        Returns
        -------
        stopping_criterion : StoppingCriterion
            Fresh instance of the criterion.
        """
        if self.kwargs is None:
            raise ValueError(
                f"{self.__class__.__name__} is a subclass of "
                "StoppingCriterion but did not call "
                "super().__init__(**kwargs) with all its parameters."
            )
        stopping_criterion = self.__class__(
            max_sweeps=self.max_sweeps, **self.kwargs
        )
        stopping_criterion.scale = scale
        stopping_criterion.terminal = terminal
        stopping_criterion.run_key = run_key
        stopping_criterion.n_increase = 0
        return stopping_criterion

    def should_stop(self, ssq_trace):
        """Check if the alternating updates should stop.

        Parameters
        ----------
        ssq_trace : list of float
            SSQ after each sweep.

        Returns
        -------
        stop : bool
            Whether or not we should stop the algorithm.
        status : str
            One of ``'running'``, ``'done'``, ``'max_runs'``, ``'diverged'``.
        """
        ssq = ssq_trace[-1]
        n_sweeps = len(ssq_trace)

        if len(ssq_trace) > 1:
            prev = ssq_trace[-2]
            if ssq - prev > DESCENT_TOL * max(prev, EXACT_FIT * self.scale):
                self.n_increase += 1
                self.debug(f"SSQ increased from {prev:.6e} to {ssq:.6e}")

        if not math.isfinite(ssq):
            stop, status = True, 'diverged'
        elif ssq <= EXACT_FIT * self.scale:
            stop, status = True, 'done'
        elif n_sweeps > 1 and self.check_convergence(ssq_trace):
            stop, status = True, 'done'
        elif n_sweeps >= self.max_sweeps:
            stop, status = True, 'max_runs'
        else:
            stop, status = False, 'running'

        if stop:
            self.debug(f"Exit after {n_sweeps} sweeps ({status}), "
                       f"SSQ = {ssq:.6e}.")
        return stop, status

    def check_convergence(self, ssq_trace):
        """Check if the SSQ trace has converged.

        Returns
        -------
        stop : bool
            Whether or not we should stop the algorithm.
        """
        return False

    def debug(self, msg):
        """Helper to print debug messages."""
        if getattr(self, 'terminal', None) is not None:
            prefix = f"{self.run_key}: " if self.run_key else ""
            self.terminal.debug(prefix + msg)


class RelativeDescentCriterion(StoppingCriterion):
    """Stop once the relative SSQ change is below ``rel_tol``.

    The change is ``|SSQ_k - SSQ_{k-1}| / max(SSQ_{k-1}, 1e-300)``.

    Parameters
    ----------
    rel_tol : float (default: marswitch.stopping_criterion.EPS)
        Tolerance on the relative change of SSQ between two sweeps.
    max_sweeps : int (default: marswitch.stopping_criterion.MAX_SWEEPS)
        Maximal number of sweeps.
    """

    def __init__(self, rel_tol=EPS, max_sweeps=MAX_SWEEPS):
        if not rel_tol > 0:
            raise ValueError(f"rel_tol should be > 0. Got {rel_tol}.")
        self.rel_tol = rel_tol
        super().__init__(max_sweeps=max_sweeps, rel_tol=rel_tol)

    def check_convergence(self, ssq_trace):
        prev, ssq = ssq_trace[-2], ssq_trace[-1]
        delta = abs(ssq - prev) / max(prev, 1e-300)
        return delta < self.rel_tol
