"""Model parameters for skew Brownian motion with dry friction.

The process solves ``dX = -2 mu sign(X) dt + eta dL + sqrt(2) dW`` with
``X(0) = 0``.  ``mu`` is the dry-friction magnitude and ``eta`` the skewness
of the local-time term; excursions away from zero are positive with
probability ``alpha = (1 + eta) / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError


@dataclass(frozen=True)
class ModelParams:
    """Validated, immutable parameter set.

    ``alpha`` is derived from ``eta`` and cannot be passed in.
    """

    mu: float
    eta: float
    alpha: float = field(init=False, repr=True)

    def __post_init__(self):
        mu = float(self.mu)
        eta = float(self.eta) + 0.0  # folds -0.0 into 0.0
        if not math.isfinite(mu) or mu < 0.0:
            raise DomainError(f"mu must be finite and >= 0, got {self.mu!r}")
        if not (-1.0 < eta < 1.0):
            raise DomainError(f"eta must lie in the open interval (-1, 1), got {self.eta!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "alpha", (1.0 + eta) / 2.0)

    def require_steady_state(self):
        if self.mu <= 0.0:
            raise DomainError("mu = 0 has no steady state (density is not normalizable)")


def params_new(mu, eta):
    """Build validated :class:`ModelParams`; raises :class:`DomainError`."""
    return ModelParams(mu, eta)


def mirror(params):
    """Parameters of the reflected process ``-X`` (eta negated)."""
    return ModelParams(params.mu, -params.eta)
