"""Root-system lattices, boundary complexes and tropical fans for D_n, E_6, E_7."""

__version__ = "0.1.0"
