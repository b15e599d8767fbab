"""
Auxiliary reference distributions: standard normal, chi-square and Fisher F.

Φ and Φ⁻¹ come from scipy.special (ndtr/ndtri, accurate to a few ulps), the
chi-square and F quantiles from the cephes inverses of the regularised
incomplete gamma and beta functions.
"""
import math
from typing import Literal, Optional

import numpy as np
import numpy.typing as npt
from scipy import special

from ..exceptions import DomainError
from .base import as_output


def phi(x: npt.ArrayLike):
    """Standard normal CDF Φ."""
    return as_output(x, special.ndtr(x))


def phi_inv(u: npt.ArrayLike):
    """Standard normal quantile Φ⁻¹; ±inf at 0 and 1."""
    arr = np.asarray(u, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise DomainError(f"probability must lie in [0, 1], got {u}")
    return as_output(u, special.ndtri(arr))


class AuxDistribution:
    """Reference distribution used for Φ, χ² and F probabilities and quantiles."""

    def __init__(self, kind: Literal["standard_normal", "chi_square", "fisher_f"],
                 df1: Optional[float] = None, df2: Optional[float] = None):
        if kind not in ("standard_normal", "chi_square", "fisher_f"):
            raise DomainError(f"unknown auxiliary distribution '{kind}'")
        self.kind, self.df1, self.df2 = kind, df1, df2
        needed = {"standard_normal": (), "chi_square": ("df1",), "fisher_f": ("df1", "df2")}[self.kind]
        for name in needed:
            value = getattr(self, name)
            if value is None or not (math.isfinite(value) and value > 0):
                raise DomainError(f"{self.kind} needs a positive finite '{name}', got {value}")

    def __repr__(self) -> str:
        return f"AuxDistribution({self.kind}, df1={self.df1}, df2={self.df2})"

    @classmethod
    def chi_square(cls, df: float) -> "AuxDistribution":
        return cls(kind="chi_square", df1=df)

    @classmethod
    def fisher_f(cls, df1: float, df2: float) -> "AuxDistribution":
        return cls(kind="fisher_f", df1=df1, df2=df2)

    @classmethod
    def standard_normal(cls) -> "AuxDistribution":
        return cls(kind="standard_normal")

    def cdf(self, x: npt.ArrayLike):
        x_arr = np.asarray(x, dtype=float)
        if self.kind == "standard_normal":
            out = special.ndtr(x_arr)
        elif self.kind == "chi_square":
            out = special.chdtr(self.df1, np.maximum(x_arr, 0.0))
        else:
            out = special.fdtr(self.df1, self.df2, np.maximum(x_arr, 0.0))
        return as_output(x, out)

    def sf(self, x: npt.ArrayLike):
        x_arr = np.asarray(x, dtype=float)
        if self.kind == "standard_normal":
            out = special.ndtr(-x_arr)
        elif self.kind == "chi_square":
            out = special.chdtrc(self.df1, np.maximum(x_arr, 0.0))
        else:
            out = special.fdtrc(self.df1, self.df2, np.maximum(x_arr, 0.0))
        return as_output(x, out)

    def quantile(self, u: npt.ArrayLike):
        arr = np.asarray(u, dtype=float)
        if np.any(~((arr > 0) & (arr < 1))):
            raise DomainError(f"quantile level must lie strictly between 0 and 1, got {u}")
        if self.kind == "standard_normal":
            out = special.ndtri(arr)
        elif self.kind == "chi_square":
            # chdtri inverts the upper tail
            out = special.chdtri(self.df1, 1.0 - arr)
        else:
            out = special.fdtri(self.df1, self.df2, arr)
        return as_output(u, out)
