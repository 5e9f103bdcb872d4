"""Permutation-symmetric sector of the annealing Hamiltonian.

Within each sub-graph every vertex enters H(s) identically, so the
dynamics started from the uniform superposition stays in the subspace
spanned by the symmetric (Dicke) states of each sub-graph.  A sub-graph
of n_a spins contributes a ladder of n_a + 1 states labeled by the number
of up spins, with collective operators

    <m| sum sigma^z |m>   = 2m - n_a
    <m+1| sum sigma^x |m> = sqrt((m+1)(n_a - m))

A single XX catalyst pair breaks the full permutation symmetry of its
sub-graph down to (pair) x (rest).  The pair contributes a 3-state block
{both down, symmetrized one-up, both up}; the catalyst swaps the outer
two states and leaves the middle one invariant with eigenvalue +1.  The
antisymmetric pair singlet is dropped: the initial state is symmetric
under the pair swap and H(s) commutes with it, so that sector is never
reached (checked against full diagonalization in the tests rather than
proven here).

Sector dimension: product of (n_a + 1) over plain sub-graphs times
3 (n_c - 1) for the catalyst-hosting sub-graph, linear in n per block, so
scaling studies reach tens of vertices where 2^n is hopeless.
"""

from dataclasses import dataclass
from functools import reduce
from math import comb

import numpy as np


class SectorError(ValueError):
    """Raised for sector requests outside the supported structure."""


def _ladder_block(n_spins, sub_graph):
    dim = n_spins + 1
    z = np.array([2.0 * m - n_spins for m in range(dim)])
    x = np.zeros((dim, dim))
    for m in range(n_spins):
        amp = np.sqrt((m + 1.0) * (n_spins - m))
        x[m + 1, m] = amp
        x[m, m + 1] = amp
    uniform = np.array([np.sqrt(comb(n_spins, m)) for m in range(dim)])
    uniform /= np.sqrt(2.0 ** n_spins)
    return _Block(sub_graph, dim, z, x, None, uniform)


def _pair_block(sub_graph):
    z = np.array([-2.0, 0.0, 2.0])
    r2 = np.sqrt(2.0)
    x = np.array([[0.0, r2, 0.0], [r2, 0.0, r2], [0.0, r2, 0.0]])
    xx = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    uniform = np.array([0.5, r2 / 2.0, 0.5])
    return _Block(sub_graph, 3, z, x, xx, uniform)


@dataclass(frozen=True)
class _Block:
    sub_graph: int
    dim: int
    zdiag: np.ndarray
    x: np.ndarray
    xx: object
    uniform: np.ndarray


@dataclass(frozen=True)
class SectorBasis:
    """Ordered block structure; labels enumerate lexicographically.

    The flat index of a label tuple follows mixed-radix order with the
    first block slowest, matching a kron chain over the blocks.
    """

    instance: object
    catalyst_sub_graph: object
    blocks: tuple

    @property
    def dim(self):
        d = 1
        for b in self.blocks:
            d *= b.dim
        return d

    @property
    def shape(self):
        return tuple(b.dim for b in self.blocks)

    def labels(self):
        out = [()]
        for b in self.blocks:
            out = [t + (i,) for t in out for i in range(b.dim)]
        return out

    def flat_index(self, label):
        idx = 0
        for b, l in zip(self.blocks, label):
            idx = idx * b.dim + l
        return idx


def sector_basis(instance, spec=None):
    """Build the block structure, placing the pair block if a catalyst acts.

    The catalyst must be a single pair with both qubits in one sub-graph
    of size >= 2; anything else has no symmetric-sector reduction here.
    """
    cat_sub = None
    if spec is not None and spec.jxx != 0.0 and spec.pairs:
        if len(spec.pairs) != 1:
            raise SectorError("sector mode supports a single catalyst pair")
        i, j = spec.pairs[0]
        a_i = instance.sub_graph_of(i)
        a_j = instance.sub_graph_of(j)
        if a_i != a_j:
            raise SectorError("catalyst pair spans two sub-graphs")
        cat_sub = a_i
    blocks = []
    for a, na in enumerate(instance.sub_graph_sizes):
        if a == cat_sub:
            if na < 2:
                raise SectorError("catalyst sub-graph needs >= 2 vertices")
            blocks.append(_pair_block(a))
            blocks.append(_ladder_block(na - 2, a))
        else:
            blocks.append(_ladder_block(na, a))
    return SectorBasis(instance, cat_sub, tuple(blocks))


def _kron_at(basis, position, mat):
    parts = []
    for k, b in enumerate(basis.blocks):
        parts.append(mat if k == position else np.eye(b.dim))
    return reduce(np.kron, parts)


def _diag_at(basis, position, vec):
    shape = [1] * len(basis.blocks)
    shape[position] = basis.blocks[position].dim
    full = np.zeros(basis.shape)
    full += vec.reshape(shape)
    return full.reshape(-1)


def collective_z(basis, sub_graph):
    """Diagonal of sum_{i in sub_graph} sigma^z_i over the sector basis."""
    out = np.zeros(basis.dim)
    for k, b in enumerate(basis.blocks):
        if b.sub_graph == sub_graph:
            out += _diag_at(basis, k, b.zdiag)
    return out


class SectorSystem:
    """Sector analogue of FullSystem: cached operators and h_of_s.

    Accepts any encoding; the catalyst spec may be None or carry a single
    in-sub-graph pair.  Matches the full-space spectrum on the lowest
    levels for the instances studied here (asserted by the oracle tests).
    """

    def __init__(self, encoding, spec=None):
        self.encoding = encoding
        self.spec = spec
        inst = encoding.instance
        self.basis = sector_basis(inst, spec)
        self.dim = self.basis.dim
        self.n = inst.n

        basis = self.basis
        hd = np.zeros((self.dim, self.dim))
        for k, b in enumerate(basis.blocks):
            hd -= _kron_at(basis, k, b.x)
        self._hd = hd

        self._hc = None
        if basis.catalyst_sub_graph is not None:
            for k, b in enumerate(basis.blocks):
                if b.xx is not None:
                    self._hc = spec.jxx * _kron_at(basis, k, b.xx)

        z_per_sub = [collective_z(basis, a) for a in range(inst.k)]
        diag = np.zeros(self.dim)
        for a in range(inst.k):
            h_a = encoding.local_fields[inst.vertices_of(a)[0]]
            diag += h_a * z_per_sub[a]
        for a in range(inst.k):
            for b in range(a + 1, inst.k):
                diag += encoding.coupling * z_per_sub[a] * z_per_sub[b]
        self._diag = diag

    @property
    def jxx(self):
        return 0.0 if self.spec is None else self.spec.jxx

    def h_of_s(self, s):
        if not 0.0 <= s <= 1.0:
            raise SectorError("s=%r outside [0,1]" % (s,))
        H = (1.0 - s) * self._hd
        if self._hc is not None:
            H += (s * (1.0 - s)) * self._hc
        H[np.diag_indices_from(H)] += s * self._diag
        return H

    def problem_diagonal(self):
        return self._diag.copy()

    def uniform_state(self):
        return reduce(np.kron, [b.uniform for b in self.basis.blocks])

    def optimum_index(self, sub_graph):
        """Sector index of the all-of-one-sub-graph problem state."""
        label = []
        for b in self.basis.blocks:
            up = b.sub_graph == sub_graph
            label.append(b.dim - 1 if up else 0)
        return self.basis.flat_index(tuple(label))

    def tracked_indices(self):
        inst = self.encoding.instance
        idx = [self.optimum_index(a) for a in range(inst.k)]
        idx.sort(key=lambda i: self._diag[i])
        return idx

    def catalyst_free(self):
        return SectorSystem(self.encoding, None)
