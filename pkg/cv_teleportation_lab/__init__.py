"""Continuous-variable quantum teleportation with QND entanglement: simulation, optimization and verification."""
