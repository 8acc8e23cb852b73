"""Semi-SIC qubit POVMs: construction, quantum-walk compilation, optics and self-testing."""

__version__ = "0.1.0"
