"""Dense operators in the computational basis and the interpolated H(s).

The anneal follows H(s) = (1-s) H_d + s(1-s) H_c + s H_p with the driver
H_d = -sum_i sigma^x_i, the catalyst H_c = J_xx sigma^x_i sigma^x_j over the
chosen pairs, and the diagonal problem Hamiltonian H_p.  With J_xx > 0 the
catalyst enters with the opposite sign to the driver, so H(s) has
off-diagonal entries of both signs (non-stoquastic) for s in (0, 1).
"""

from dataclasses import dataclass

import numpy as np

from .mwis import problem_energies

# Dense full-space matrices are refused beyond this many qubits; larger
# systems go through the symmetric-sector path.
FULL_SPACE_CAP = 14


class OperatorError(ValueError):
    """Raised for invalid operator requests."""


def _check_cap(n):
    if n > FULL_SPACE_CAP:
        raise OperatorError(
            "full-space operators refused for n=%d (cap %d); "
            "use the symmetric sector" % (n, FULL_SPACE_CAP)
        )


@dataclass(frozen=True)
class CatalystSpec:
    """XX catalyst: qubit pairs and a common nonnegative strength."""

    pairs: tuple
    jxx: float

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if self.jxx < 0:
            raise OperatorError("jxx must be nonnegative")
        seen = set()
        for i, j in pairs:
            if i == j:
                raise OperatorError("catalyst pair needs distinct qubits")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise OperatorError("duplicate catalyst pair %s" % (key,))
            seen.add(key)


def catalyst_pair(instance, sub_graph=1):
    """Default single-pair catalyst: the first two qubits of a sub-graph.

    Sub-graph 1 hosts the state whose crossing with the ground state the
    catalyst targets; the swapped-geometry experiment places the pair in
    sub-graph 0 instead.
    """
    verts = instance.vertices_of(sub_graph)
    if len(verts) < 2:
        raise OperatorError("sub-graph %d has fewer than two vertices" % sub_graph)
    return (verts[0], verts[1])


def driver_matrix(n):
    """-sum_i sigma^x_i as a dense matrix."""
    _check_cap(n)
    dim = 1 << n
    H = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(n):
        H[idx, idx ^ (1 << i)] = -1.0
    return H


def problem_matrix(encoding):
    _check_cap(encoding.n)
    return np.diag(problem_energies(encoding))


def catalyst_matrix(n, spec):
    """sum over pairs of J_xx sigma^x_i sigma^x_j (double bit flips)."""
    _check_cap(n)
    dim = 1 << n
    H = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i, j in spec.pairs:
        if i >= n or j >= n or i < 0 or j < 0:
            raise OperatorError("catalyst pair (%d,%d) out of range" % (i, j))
        mask = (1 << i) | (1 << j)
        H[idx, idx ^ mask] += spec.jxx
    return H


def total_hamiltonian(encoding, spec, s):
    if not 0.0 <= s <= 1.0:
        raise OperatorError("s=%r outside [0,1]" % (s,))
    H = (1.0 - s) * driver_matrix(encoding.n)
    if spec is not None and spec.jxx != 0.0:
        H += s * (1.0 - s) * catalyst_matrix(encoding.n, spec)
    H[np.diag_indices_from(H)] += s * problem_energies(encoding)
    return H


class FullSystem:
    """Cached full-space assembly of H(s) plus basis bookkeeping.

    Builds the three constituent operators once; h_of_s combines them.
    Provides the pieces the scan machinery needs: dimension, the uniform
    driver ground state, and the basis index of each one-sub-graph optimum.
    """

    def __init__(self, encoding, spec=None):
        _check_cap(encoding.n)
        self.encoding = encoding
        self.spec = spec
        self.n = encoding.n
        self.dim = 1 << encoding.n
        self._hd = driver_matrix(encoding.n)
        self._diag = problem_energies(encoding)
        if spec is not None and spec.jxx != 0.0:
            self._hc = catalyst_matrix(encoding.n, spec)
        else:
            self._hc = None

    @property
    def jxx(self):
        return 0.0 if self.spec is None else self.spec.jxx

    def h_of_s(self, s):
        if not 0.0 <= s <= 1.0:
            raise OperatorError("s=%r outside [0,1]" % (s,))
        H = (1.0 - s) * self._hd
        if self._hc is not None:
            H += (s * (1.0 - s)) * self._hc
        H[np.diag_indices_from(H)] += s * self._diag
        return H

    def uniform_state(self):
        return np.full(self.dim, self.dim ** -0.5)

    def optimum_index(self, sub_graph):
        """Basis index of the all-of-one-sub-graph problem state."""
        return self.encoding.instance.optimum_mask(sub_graph)

    def tracked_indices(self):
        """Basis indices of the problem states tracked in overlap traces.

        Ordered by problem energy: index 0 is the global optimum.
        """
        inst = self.encoding.instance
        masks = [inst.optimum_mask(a) for a in range(inst.k)]
        masks.sort(key=lambda m: self._diag[m])
        return masks

    def catalyst_free(self):
        return FullSystem(self.encoding, None)
