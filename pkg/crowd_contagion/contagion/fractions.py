__all__ = ['SUSCEPTIBLE', 'EXPOSED', 'INFECTED', 'LABELS', 'COLORS', 'step_fractions', 'classify', 'classify_array',
           'exposed_percentage']

import numpy as np

from ..errors import TimeStepError

SUSCEPTIBLE, EXPOSED, INFECTED = 0, 1, 2
LABELS = ('susceptible', 'exposed', 'infected')
# plot colours of the labels
COLORS = {'susceptible': 'green', 'exposed': 'blue', 'infected': 'red'}

_ACTIVATION = 1e-14


def step_fractions(alpha: np.ndarray, beta: np.ndarray, nu: float, theta: float, dt: float) -> np.ndarray:
    """
    One explicit Euler step of the SEIS fractions along the particle paths:

    * S' = nu I - beta S
    * E' = beta S - theta E
    * I' = theta E - nu I

    The right-hand sides add up to zero, so the sum stays 1 to round-off.
    Rows that went negative (or drifted more than 1e-14 off the simplex) are clamped and renormalised.

    :param alpha: (n, 3) or (3,) fractions S, E, I
    :param beta: infection rate per row
    :raises TimeStepError: beta * dt > 1
    """
    alpha = np.asarray(alpha, dtype=float)
    single = alpha.ndim == 1
    alpha = np.atleast_2d(alpha)
    beta = np.broadcast_to(np.asarray(beta, dtype=float), (len(alpha),))
    if len(beta) and (beta * dt).max() > 1:
        raise TimeStepError(f'beta * dt = {(beta * dt).max():.3g} > 1: dt too large for the infectivity')
    s, e, i = alpha[:, 0], alpha[:, 1], alpha[:, 2]
    infection = beta * s
    new = np.empty_like(alpha)
    new[:, 0] = s + dt * (nu * i - infection)
    new[:, 1] = e + dt * (infection - theta * e)
    new[:, 2] = i + dt * (theta * e - nu * i)
    off = (new < 0).any(axis=1) | (np.abs(new.sum(axis=1) - 1) > _ACTIVATION)
    if off.any():
        clamped = np.maximum(new[off], 0.)
        new[off] = clamped / clamped.sum(axis=1, keepdims=True)
    return new[0] if single else new


def classify(alpha: np.ndarray, threshold: float = 0.05) -> str:
    """
    infected if alpha_I > 0.5, exposed if alpha_E > threshold, else susceptible.

    >>> classify([0.9, 0.06, 0.04])
    'exposed'
    """
    return LABELS[int(classify_array(np.asarray(alpha, dtype=float).reshape(1, 3), threshold)[0])]


def classify_array(alpha: np.ndarray, threshold: float = 0.05) -> np.ndarray:
    """Label codes (``SUSCEPTIBLE``, ``EXPOSED``, ``INFECTED``) of every row of an (n, 3) array."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1, 3)
    codes = np.full(len(alpha), SUSCEPTIBLE, dtype=np.int64)
    codes[alpha[:, 1] > threshold] = EXPOSED
    codes[alpha[:, 2] > 0.5] = INFECTED
    return codes


def exposed_percentage(cloud: 'ParticleCloud', threshold: float = 0.05) -> float:
    """
    Percent of the particles seeded susceptible whose alpha_E is now above ``threshold``.
    Particles that left through an exit count with the fractions they had when leaving.
    """
    seeded = cloud.seeded_susceptible
    if seeded is None or not seeded.any():
        return 0.
    exposed = cloud.alpha[seeded, 1] > threshold
    return 100. * float(exposed.sum()) / float(seeded.sum())
