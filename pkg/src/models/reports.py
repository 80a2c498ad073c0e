"""Report models emitted by the CLI and the self-test job.

Numeric values are decimal strings so reports never carry binary floats.
"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class ErrorDetail(BaseModel):
    """A library error as reported on stdout."""
    code: str = Field(..., description="Stable error code")
    message: str = Field(..., description="Human readable message")
    line: Optional[int] = Field(None, description="1-based line of a parse error")
    column: Optional[int] = Field(None, description="1-based column of a parse error")


class ErrorReport(BaseModel):
    error: ErrorDetail


class LValueReport(BaseModel):
    """
    Partial and total L-values of one character.

    ``partials`` maps the exponent vector of each ray class (over the ray
    class generators) to its partial value; ``total`` is their sum in that order.
    """
    character: str = Field(..., description="Character spec string")
    s: str = Field(..., description="Evaluation point")
    method: Literal["eseries", "dirichlet"] = Field(..., description="Evaluation route")
    precision: int = Field(..., description="Precision in bits")
    class_representatives: Dict[str, str] = Field(default_factory=dict, description="Ray class -> ideal")
    partials: Dict[str, str] = Field(default_factory=dict, description="Ray class -> partial value")
    total: str = Field(..., description="Sum of the partial values")
    error_bound: str = Field(..., description="Bound on the absolute error of the total")
    terms: Optional[int] = Field(None, description="Number of ideals summed by the Dirichlet route")


class EKReport(BaseModel):
    b: int
    a: int
    s: str
    t: str
    lattice: List[str] = Field(..., description="Basis (w1, w2)")
    gamma_order: int
    method: Literal["continued", "direct"]
    precision: int
    value: str
    error_bound: str


class PeriodReport(BaseModel):
    field: str
    precision: int
    g2: str
    g3: str
    j: str
    omega: str
    normalization: Literal["j0", "j1728", "generic"]
    dual_period: str
    error_bound: str


class RecognitionResult(BaseModel):
    """Outcome of integer-relation recognition for one number."""
    status: Literal["recognized", "undetermined", "insufficient_precision"]
    polynomial: Optional[List[int]] = Field(None, description="Coefficients, highest degree first")
    degree: Optional[int] = None
    height: Optional[int] = None
    residual: Optional[str] = None
    stable: bool = Field(False, description="Same polynomial at the higher precision")
    basis: Optional[str] = Field(None, description="'rational', 'quadratic' or 'power'")


class VerifyReport(BaseModel):
    """
    Deligne-ratio pipeline for one critical character.

    ``ratio`` is L * conj(Omega)^b / Omega^a; ``normalized_ratio`` is L divided by
    the Deligne period Omega^a (Omega_dual)^b / (2 pi i)^b, the number recognized.
    """
    character: str
    precision: int
    critical: bool
    l_value: str
    omega: str
    normalization: str
    ratio: str
    normalized_ratio: str
    recognition: RecognitionResult
    recognized: bool
    error_bound: str


class GaloisReport(BaseModel):
    """Output of the galois commands; ``data`` holds command-specific fields."""
    command: str
    setting: str
    field: Optional[str] = None
    data: Dict[str, object] = Field(default_factory=dict)
