__all__ = ['CrowdContagionError', 'ScenarioError', 'SimulationError', 'DensityError', 'TimeStepError']

from typing import Optional


class CrowdContagionError(Exception):
    """Base of the errors raised by the package."""


class ScenarioError(CrowdContagionError, ValueError):
    """
    A scenario file that does not parse or breaks an invariant.
    ``field`` is the dotted path of the offending key (``params.V_max``), ``line`` the line in the file if known.
    """

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        where = ''
        if field:
            where += f' [{field}]'
        if line is not None:
            where += f' (line {line})'
        super().__init__(message + where)


class SimulationError(CrowdContagionError, RuntimeError):
    """
    Raised by ``Simulator.advance`` when a phase fails.
    The step index and phase name are kept so a truncated run directory can say where it stopped.
    """

    def __init__(self, message: str, step: Optional[int] = None, phase: Optional[str] = None):
        self.step = step
        self.phase = phase
        if step is not None or phase is not None:
            message = f'{message} (step {step}, phase {phase})'
        super().__init__(message)


class DensityError(SimulationError):
    """A particle density reached zero or went negative."""


class TimeStepError(SimulationError):
    """beta * dt > 1: the explicit fraction update would push alpha_S below zero."""
