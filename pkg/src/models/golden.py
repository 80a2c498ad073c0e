"""Schema of the versioned golden value files."""

from typing import List, Optional

from pydantic import BaseModel, Field, model_validator


class GoldenEntry(BaseModel):
    """
    One reference value.

    Exactly one of ``value`` (a decimal string, ``re`` or ``re+imj``) and
    ``closed_form`` (an expression in pi, gamma, sqrt, ...) is given.
    """
    name: str = Field(..., description="Key used by the checks")
    value: Optional[str] = Field(None, description="Decimal string")
    closed_form: Optional[str] = Field(None, description="Exact expression evaluated at any precision")
    tolerance: str = Field(default="1e-25", description="Relative tolerance of comparisons")
    oracle: str = Field(..., description="Command or derivation that produced the value")

    @model_validator(mode="after")
    def _one_source(self) -> "GoldenEntry":
        if (self.value is None) == (self.closed_form is None):
            raise ValueError(f"entry '{self.name}' needs exactly one of value and closed_form")
        return self


class GoldenFile(BaseModel):
    version: int = Field(..., ge=1, description="Schema version")
    description: str = Field(default="", description="What the file pins down")
    entries: List[GoldenEntry] = Field(default_factory=list)
