from abc import ABC, abstractmethod
from typing import Dict, Literal, Tuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel

from ..exceptions import DomainError


class Moments(BaseModel):
    mean: float
    sd: float
    median: float


class ProcessModel(ABC):
    """
    Univariate distribution of a quality characteristic.

    Subclasses provide the CDF, quantile, density (or mass) and sampling; the
    base class adds the helpers the index modules share (survival function,
    point mass, median, seeded sampling).
    """
    family: str = "abstract"
    kind: Literal["continuous", "discrete"] = "continuous"

    @property
    @abstractmethod
    def support(self) -> Tuple[float, float]:
        """Closed hull of the support, possibly infinite on either side."""

    @property
    @abstractmethod
    def params(self) -> Dict[str, float]:
        pass

    @abstractmethod
    def cdf(self, x: npt.ArrayLike) -> npt.NDArray:
        """P(X <= x), clamped to [0, 1]."""

    @abstractmethod
    def _quantile(self, u: npt.NDArray) -> npt.NDArray:
        pass

    @abstractmethod
    def density(self, x: npt.ArrayLike) -> npt.NDArray:
        """Probability density, or probability mass for discrete models."""

    @abstractmethod
    def moments(self) -> Moments:
        pass

    @abstractmethod
    def _draw(self, n: int, rng: np.random.Generator) -> npt.NDArray:
        pass

    def sf(self, x: npt.ArrayLike) -> npt.NDArray:
        """P(X > x)."""
        return as_output(x, np.clip(1.0 - np.asarray(self.cdf(x)), 0.0, 1.0))

    def mass(self, x: float) -> float:
        """P(X = x); zero for continuous models."""
        if self.kind == "continuous":
            return 0.0
        return float(self.density(x))

    def extended_cdf(self, x: npt.ArrayLike) -> npt.NDArray:
        raise DomainError(f"linear-extension CDF is only defined for the uniform family, not {self.family}")

    def quantile(self, u: npt.ArrayLike) -> npt.NDArray:
        """For continuous models the x with F(x)=u; for discrete ones inf{x : F(x) >= u}."""
        arr = np.asarray(u, dtype=float)
        if np.any(~((arr > 0) & (arr < 1))):
            raise DomainError(f"quantile level must lie strictly between 0 and 1, got {u}")
        return as_output(u, self._quantile(arr))

    def median(self) -> float:
        return float(self.quantile(0.5))

    def draw_sample(self, n: int, seed: int) -> npt.NDArray:
        """n i.i.d. draws, deterministic given (model, n, seed)."""
        return self.draw(n, np.random.default_rng(seed))

    def draw(self, n: int, rng: np.random.Generator) -> npt.NDArray:
        if n < 1:
            raise DomainError(f"sample size must be at least 1, got {n}")
        return np.asarray(self._draw(int(n), rng), dtype=float)

    def describe(self) -> Dict[str, object]:
        return {"family": self.family, "params": self.params}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{type(self).__name__}({self.family}: {args})"


def as_output(x: npt.ArrayLike, values: npt.ArrayLike):
    """Return a float for scalar input, an array otherwise."""
    if np.ndim(x) == 0:
        return float(np.asarray(values))
    return np.asarray(values, dtype=float)
