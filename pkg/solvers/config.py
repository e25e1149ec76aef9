# =============================================================
#  solvers/config.py – validated solver configuration
# =============================================================
from __future__ import annotations

from enum import Enum
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import (
    DEFAULT_GAMMA,
    DEFAULT_MAX_ITER,
    DEFAULT_PERIODS,
    DEFAULT_TAU,
    DEFAULT_TOL,
)


class Method(str, Enum):
    HOPM   = "hopm"
    GEAP   = "geap"
    RHOPM  = "rhopm"
    HOPMM1 = "hopmm1"
    HOPMM2 = "hopmm2"
    QEHOPM = "qehopm"

    @property
    def label(self) -> str:
        return {
            "hopm": "HOPM", "geap": "GEAP", "rhopm": "RHOPM",
            "hopmm1": "HOPMM-I", "hopmm2": "HOPMM-II", "qehopm": "QEHOPM",
        }[self.value]


class SolverConfig(BaseModel):
    """Parameters shared by every solver; unused fields are ignored by a method."""

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    method: Method = Method.HOPM
    tol: float = Field(DEFAULT_TOL, gt=0)
    max_iter: int = Field(DEFAULT_MAX_ITER, ge=1)
    beta: Optional[float] = Field(None, ge=0)
    eta: Optional[float] = Field(None, ge=0)
    gamma: float = Field(DEFAULT_GAMMA, gt=0)
    tau: float = Field(DEFAULT_TAU, gt=0)
    geap_hessian: Literal["sym", "nonsym"] = "sym"
    period: Optional[int] = Field(None, ge=1)
    x0: Optional[Tuple[float, ...]] = None
    record_iterates: bool = False

    @field_validator("x0", mode="before")
    @classmethod
    def _x0_on_simplex(cls, v):
        if v is None:
            return v
        v = tuple(float(a) for a in np.ravel(np.asarray(v, dtype=float)))
        if len(v) == 0:
            raise ValueError("x0 must not be empty")
        if min(v) < 0 or abs(sum(v) - 1.0) > 1e-12:
            raise ValueError("x0 must be nonnegative and sum to 1")
        return v

    @model_validator(mode="after")
    def _momentum_given(self):
        if self.method is Method.HOPMM1 and self.beta is None:
            raise ValueError("HOPMM-I needs a momentum parameter beta")
        if self.method is Method.HOPMM2 and self.eta is None:
            raise ValueError("HOPMM-II needs a momentum parameter eta")
        return self

    # ------------------------------------------------------------------
    @property
    def resolved_period(self) -> int:
        if self.period is not None:
            return self.period
        return DEFAULT_PERIODS.get(self.method.value, 1)

    def params(self) -> dict:
        """Only the parameters the chosen method actually reads."""
        m = self.method
        if m is Method.GEAP:
            return {"tau": self.tau, "geap_hessian": self.geap_hessian}
        if m is Method.RHOPM:
            return {"gamma": self.gamma}
        if m is Method.HOPMM1:
            return {"beta": self.beta, "period": self.resolved_period}
        if m is Method.HOPMM2:
            return {"eta": self.eta, "period": self.resolved_period}
        if m is Method.QEHOPM:
            return {"period": self.resolved_period}
        return {}
