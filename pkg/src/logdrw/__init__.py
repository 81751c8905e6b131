"""Log de Rham-Witt complexes of local toric models over F_p."""

__version__ = "0.1.0"
