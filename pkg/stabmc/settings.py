import os

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()

MAX_DEPTH = int(os.getenv("STABMC_MAX_DEPTH", "100000"))
MAX_NODES = int(os.getenv("STABMC_MAX_NODES", "5000000"))
SUPPORT_CAP = int(os.getenv("STABMC_SUPPORT_CAP", "20"))
LOG_LEVEL = os.getenv("STABMC_LOG_LEVEL", "WARNING")
# Used only when a comparison involves a non-rational term value
FLOAT_TOLERANCE = float(os.getenv("STABMC_FLOAT_TOLERANCE", "1e-9"))


class Limits(BaseModel):
    """Run limits for tree construction and valuation extraction."""
    max_depth: int = Field(default=MAX_DEPTH, ge=0)
    max_nodes: int = Field(default=MAX_NODES, ge=1)
    support_cap: int = Field(default=SUPPORT_CAP, ge=0)

    @classmethod
    def from_env(cls, **overrides) -> "Limits":
        """Defaults from the environment; None-valued overrides are ignored."""
        values = {k: v for k, v in overrides.items() if v is not None}
        return cls(**values)
