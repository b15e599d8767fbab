from typing import Dict, Literal, Tuple

import numpy as np
import numpy.typing as npt

from ..exceptions import DomainError
from .base import Moments, ProcessModel, as_output


class EmpiricalModel(ProcessModel):
    """
    Step empirical CDF of an observed sample.

    Quantiles invert the ECDF (the smallest order statistic x_(k) with
    k/n >= u) unless `interpolation="linear"` is requested. The model counts
    as discrete: every observation carries mass 1/n, so yields computed with
    inclusive endpoints equal the share of observations inside [L, U].
    """
    family = "empirical"
    kind = "discrete"

    def __init__(self, values: npt.ArrayLike, interpolation: Literal["step", "linear"] = "step"):
        data = np.sort(np.asarray(values, dtype=float).ravel())
        if data.size < 2:
            raise DomainError(f"empirical model needs at least 2 observations, got {data.size}")
        if not np.all(np.isfinite(data)):
            raise DomainError("empirical model requires finite observations")
        if interpolation not in ("step", "linear"):
            raise DomainError(f"unknown interpolation '{interpolation}'")
        self._data = data
        self.interpolation = interpolation

    @property
    def values(self) -> npt.NDArray:
        return self._data.copy()

    @property
    def n(self) -> int:
        return int(self._data.size)

    @property
    def params(self) -> Dict[str, float]:
        return {"n": float(self.n)}

    @property
    def support(self) -> Tuple[float, float]:
        return float(self._data[0]), float(self._data[-1])

    def cdf(self, x: npt.ArrayLike):
        return as_output(x, np.searchsorted(self._data, x, side="right") / self.n)

    def density(self, x: npt.ArrayLike):
        right = np.searchsorted(self._data, x, side="right")
        left = np.searchsorted(self._data, x, side="left")
        return as_output(x, (right - left) / self.n)

    def _quantile(self, u: npt.NDArray) -> npt.NDArray:
        method = "inverted_cdf" if self.interpolation == "step" else "linear"
        return np.quantile(self._data, u, method=method)

    def moments(self) -> Moments:
        return Moments(mean=float(self._data.mean()), sd=float(self._data.std(ddof=1)), median=self.median())

    def _draw(self, n: int, rng: np.random.Generator) -> npt.NDArray:
        return rng.choice(self._data, size=n, replace=True)

    def __repr__(self) -> str:
        return f"EmpiricalModel(n={self.n}, interpolation={self.interpolation})"
