"""Problem parameters for -Delta u = |x|^alpha u^p on the unit ball of R^N.

A problem instance is the triple (N, alpha, p) with N >= 3 and alpha > 0.
Positive solutions exist exactly for 1 < p < p_alpha where

    p_alpha = (N + 2 + 2 alpha) / (N - 2)

plays the role of the critical Sobolev exponent for the weighted problem.
Two further derived constants recur throughout the package:

    kappa   = (2 (N - 1) + alpha) / (N - 2) > 2,
              the Emden-Fowler exponent of the transformed radial equation,
    C_alpha = 1 / ((N - 2) (N + alpha)),
              the coefficient inside the entire-space limit profile
              U(x) = (1 + C_alpha |x|^{2+alpha})^{-(N-2)/(2+alpha)}.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .errors import ParameterError


def critical_exponent(N: int, alpha: float) -> float:
    """Exponent threshold (N + 2 + 2 alpha)/(N - 2) separating existence from nonexistence."""
    if int(N) != N or N < 3:
        raise ParameterError(f"dimension must be an integer >= 3, got {N}")
    if alpha <= 0:
        raise ParameterError(f"weight exponent must be positive, got {alpha}")
    return (N + 2 + 2.0 * alpha) / (N - 2)


@dataclass(frozen=True)
class HenonParams:
    """One problem instance (N, alpha, p) with its derived constants.

    ``p`` may lie anywhere in (1, inf); operations that require a solution
    enforce p < p_alpha themselves.  A warning is emitted for alpha > 1
    because the two-valued Morse index characterization is only guaranteed
    for alpha in (0, 1].
    """

    N: int
    alpha: float
    p: float
    p_alpha: float = field(init=False)
    kappa: float = field(init=False)
    C_alpha: float = field(init=False)

    def __post_init__(self) -> None:
        pa = critical_exponent(self.N, self.alpha)  # validates N, alpha
        if self.p <= 1:
            raise ParameterError(f"exponent p must exceed 1, got {self.p}")
        if self.alpha > 1:
            warnings.warn(
                "alpha > 1: the Morse index dichotomy {1, N+1} is only "
                "established for alpha in (0, 1]; spectral truncation "
                "certificates may fail",
                stacklevel=2,
            )
        object.__setattr__(self, "p_alpha", pa)
        object.__setattr__(self, "kappa", (2.0 * (self.N - 1) + self.alpha) / (self.N - 2))
        object.__setattr__(self, "C_alpha", 1.0 / ((self.N - 2) * (self.N + self.alpha)))

    @property
    def subcritical(self) -> bool:
        return self.p < self.p_alpha
