"""Software reproduction of an NMR quantum simulation of an impurity coupled to a fermion ring.

Modules:

* ``operators``: Pauli-string algebra and dense linear algebra.
* ``jordan_wigner``: fermion modes to qubits.
* ``model``: Hamiltonian, derived parameters and exact oracles.
* ``circuits``: gates, decompositions and ancilla measurement networks.
* ``simulator``: state-vector and pseudo-pure execution, experiment drivers.
* ``nmr``: molecules, pulse-sequence compiler and pulse-level verifier.
* ``spectral``: DFT, peak extraction and error propagation.
* ``cli``: the ``fanosim`` command.
"""

from .model import ModelParams, derive

__all__ = ["ModelParams", "derive"]
__version__ = "0.1.0"
