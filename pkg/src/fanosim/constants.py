"""Named numerical tolerances.

Tests and runtime checks refer to these names instead of bare literals.
"""

#: Exact-arithmetic identities (Pauli products, norms, anticommutators).
ALGEBRA_TOL = 1e-12

#: Gate-decomposition equivalences compared modulo global phase.
DECOMPOSITION_TOL = 1e-10

#: Maximum ``||A - A^dagger||`` accepted as Hermitian input.
HERMITIAN_TOL = 1e-10

#: Ideal circuit simulation vs. dense oracle.
ORACLE_TOL = 1e-9

#: Compile-then-verify fidelity deficit with full refocusing.
COMPILER_TOL = 1e-8
