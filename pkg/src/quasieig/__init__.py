"""Quasilinear eigenproblems: admissibility certificates and radial solvers."""
