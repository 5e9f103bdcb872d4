"""Complete k-partite MWIS instances and their normalized Ising encoding.

A problem instance is a complete k-partite graph: k disjoint sub-graphs
with no internal edges, every cross-sub-graph pair connected.  Each
sub-graph carries a total weight split evenly over its vertices, so each
maximal independent set (all vertices of one sub-graph) is a local optimum
of the weighted independent-set problem.  The Ising encoding assigns

    H_p = sum_i (c_i * J_zz - 2 w_i) sigma^z_i + sum_edges J_zz sigma^z_i sigma^z_j

with c_i the vertex degree.  Fields and couplings are normalized so that
the total energy spread over all 2^n basis states equals n * e_scale,
which keeps the problem scale fixed while the raw parameters vary.
"""

from dataclasses import dataclass

import numpy as np

# Exhaustive basis enumeration refuses beyond this many qubits.
ENUMERATION_CAP = 20

# Problem energy scale relative to the unit driver field.  This value puts
# the catalyst-free gap minimum of the calibrated 5-vertex instances at
# s = 0.9 and is the scale at which all quoted catalyst strengths hold.
E_SCALE_DEFAULT = 15.0


class InstanceError(ValueError):
    """Raised for invalid instance parameters."""


@dataclass(frozen=True)
class MwisInstance:
    """Complete k-partite MWIS instance with raw (un-normalized) parameters.

    sub_graph_sizes   : vertex count n_a per sub-graph
    sub_graph_weights : total raw weight W'_a per sub-graph, split evenly
    jzz_raw           : raw edge penalty J'_zz
    e_scale           : problem energy scale relative to the driver
    """

    sub_graph_sizes: tuple
    sub_graph_weights: tuple
    jzz_raw: float
    e_scale: float

    def __post_init__(self):
        sizes = tuple(int(x) for x in self.sub_graph_sizes)
        weights = tuple(float(w) for w in self.sub_graph_weights)
        object.__setattr__(self, "sub_graph_sizes", sizes)
        object.__setattr__(self, "sub_graph_weights", weights)
        if len(sizes) < 2:
            raise InstanceError("need at least two sub-graphs")
        if any(x < 1 for x in sizes):
            raise InstanceError("every sub-graph needs at least one vertex")
        if len(weights) != len(sizes):
            raise InstanceError("one weight per sub-graph required")
        if any(w <= 0 for w in weights):
            raise InstanceError("weights must be positive")
        for a in range(len(weights) - 1):
            if weights[a] <= weights[a + 1]:
                raise InstanceError("weights must be strictly decreasing")
        if self.jzz_raw <= self.weight_base / self.n_edges:
            raise InstanceError(
                "jzz_raw must exceed %.6g (normalization denominator)"
                % (self.weight_base / self.n_edges)
            )
        if self.e_scale <= 0:
            raise InstanceError("e_scale must be positive")

    @property
    def k(self):
        return len(self.sub_graph_sizes)

    @property
    def n(self):
        return sum(self.sub_graph_sizes)

    @property
    def n_edges(self):
        sizes = self.sub_graph_sizes
        total = sum(sizes)
        return sum(na * (total - na) for na in sizes) // 2

    @property
    def weight_base(self):
        """Sum of all sub-graph weights except the top one.

        Equals 1 for the bipartite convention (W'_0 = 1 + dW, W'_1 = 1) and
        enters the normalization denominator so that the full-basis energy
        spread comes out as exactly n * e_scale.
        """
        return sum(self.sub_graph_weights[1:])

    @property
    def delta_w(self):
        return self.sub_graph_weights[0] - self.sub_graph_weights[1]

    def sub_graph_of(self, vertex):
        v = vertex
        for a, na in enumerate(self.sub_graph_sizes):
            if v < na:
                return a
            v -= na
        raise IndexError("vertex %d out of range" % vertex)

    def vertices_of(self, sub_graph):
        start = sum(self.sub_graph_sizes[:sub_graph])
        return tuple(range(start, start + self.sub_graph_sizes[sub_graph]))

    def optimum_mask(self, sub_graph):
        """Bitmask of the independent set containing all of one sub-graph."""
        mask = 0
        for v in self.vertices_of(sub_graph):
            mask |= 1 << v
        return mask


def build_instance(sizes, delta_w, jzz_raw, e_scale=E_SCALE_DEFAULT,
                   weights=None):
    """Construct an instance from the conventional parameterization.

    For two sub-graphs the weights are (1 + delta_w, 1).  For more, the
    default ladder 1 + (k - 1 - a) * delta_w keeps them strictly
    decreasing with uniform spacing delta_w; pass `weights` explicitly to
    override.
    """
    sizes = tuple(int(x) for x in sizes)
    if delta_w <= 0:
        raise InstanceError("delta_w must be positive (distinct optima)")
    if weights is None:
        k = len(sizes)
        weights = tuple(1.0 + (k - 1 - a) * delta_w for a in range(k))
    return MwisInstance(sizes, tuple(weights), float(jzz_raw), float(e_scale))


@dataclass(frozen=True)
class IsingEncoding:
    """Normalized fields and couplings realizing the instance.

    local_fields[i] multiplies sigma^z_i; `coupling` is the single shared
    cross-sub-graph ZZ coefficient (within-sub-graph pairs carry zero).
    """

    instance: MwisInstance
    local_fields: np.ndarray
    coupling: float
    normalization_k: float

    @property
    def n(self):
        return self.instance.n

    def coupling_of(self, i, j):
        if self.instance.sub_graph_of(i) == self.instance.sub_graph_of(j):
            return 0.0
        return self.coupling

    def to_json_dict(self):
        return {
            "sizes": list(self.instance.sub_graph_sizes),
            "weights_raw": list(self.instance.sub_graph_weights),
            "jzz_raw": self.instance.jzz_raw,
            "e_scale": self.instance.e_scale,
            "fields": [float(h) for h in self.local_fields],
            "coupling": float(self.coupling),
            "K": float(self.normalization_k),
        }


def encode(instance):
    """Produce the normalized Ising encoding of an instance.

    K = n / (4 (N_edges * J'_zz - W'_base)) and every raw quantity is
    scaled by K * e_scale.
    """
    n = instance.n
    denom = instance.n_edges * instance.jzz_raw - instance.weight_base
    K = n / (4.0 * denom)
    scale = K * instance.e_scale
    h = np.empty(n)
    for a, na in enumerate(instance.sub_graph_sizes):
        degree = n - na
        w_raw = instance.sub_graph_weights[a] / na
        for v in instance.vertices_of(a):
            h[v] = scale * (degree * instance.jzz_raw - 2.0 * w_raw)
    return IsingEncoding(instance, h, scale * instance.jzz_raw, K)


def problem_energies(encoding):
    """Energies of all 2^n basis states, indexed by bitmask.

    Bit i set means vertex i is included (sigma^z_i = +1).
    """
    inst = encoding.instance
    n = inst.n
    if n > ENUMERATION_CAP:
        raise InstanceError(
            "enumeration over 2^%d states refused (cap %d); "
            "use the symmetric-sector path" % (n, ENUMERATION_CAP)
        )
    dim = 1 << n
    masks = np.arange(dim)
    # z[m, i] = +-1 spin value of qubit i in basis state m
    z = np.empty((dim, n))
    for i in range(n):
        z[:, i] = 2.0 * ((masks >> i) & 1) - 1.0
    e = z @ encoding.local_fields
    # cross-sub-graph ZZ terms via per-sub-graph collective spins
    k = inst.k
    zsum = np.empty((dim, k))
    for a in range(k):
        zsum[:, a] = z[:, list(inst.vertices_of(a))].sum(axis=1)
    for a in range(k):
        for b in range(a + 1, k):
            e += encoding.coupling * zsum[:, a] * zsum[:, b]
    return e


def energy_of_mask(encoding, mask):
    inst = encoding.instance
    e = 0.0
    for i in range(inst.n):
        z_i = 1.0 if (mask >> i) & 1 else -1.0
        e += encoding.local_fields[i] * z_i
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            jij = encoding.coupling_of(i, j)
            if jij:
                z_i = 1.0 if (mask >> i) & 1 else -1.0
                z_j = 1.0 if (mask >> j) & 1 else -1.0
                e += jij * z_i * z_j
    return e


def is_independent(instance, mask):
    """True when the set bits of `mask` touch at most one sub-graph."""
    touched = 0
    for a in range(instance.k):
        sub_mask = instance.optimum_mask(a)
        if mask & sub_mask:
            touched += 1
            if touched > 1:
                return False
    return True


@dataclass(frozen=True)
class BasisState:
    bitmask: int
    energy: float
    independent: bool
    hamming_weight_per_sub_graph: tuple


def _classify(instance, mask, energy):
    hw = tuple(bin(mask & instance.optimum_mask(a)).count("1")
               for a in range(instance.k))
    return BasisState(int(mask), float(energy), is_independent(instance, mask), hw)


def enumerate_problem_states(encoding):
    """All basis states sorted by energy (stable in mask order on ties)."""
    e = problem_energies(encoding)
    inst = encoding.instance
    order = np.argsort(e, kind="stable")
    return [_classify(inst, m, e[m]) for m in order]


def neighbourhood(encoding, state):
    """The n states one spin flip away from `state`, with classifications."""
    inst = encoding.instance
    e = problem_energies(encoding)
    mask = state.bitmask if isinstance(state, BasisState) else int(state)
    out = []
    for i in range(inst.n):
        m = mask ^ (1 << i)
        out.append(_classify(inst, m, e[m]))
    return out
