"""Layer-code construction: local 3D stabilizer codes from arbitrary CSS codes."""

__version__ = "0.1.0"
