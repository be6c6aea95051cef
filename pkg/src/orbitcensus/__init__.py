"""Exact census of Galois orbits of local inertial types for GL2(Q_p) with
trivial nebentypus, and the resulting lower bound for non-CM newform orbits."""

__version__ = "0.1.0"
