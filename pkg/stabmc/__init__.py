"""stabmc: explicit-state model checking of concurrent stabilizer quantum protocols."""

__version__ = "0.1.0"
