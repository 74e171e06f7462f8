"""Component-level combinatorics of a truncated simplicial scheme: the chain
complex of connected components, the cocharacter group of the toric part of
the simplicial Picard group, boundary divisor lattices, and the weight-graded
rank ledger tying a Picard-type skeleton to the rank of its assembled
realization.

Everything here is computed at the level of an algebraically closed base
(trivial Galois actions); actions can be attached to the emitted
presentation afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import intmat
from .blocks import AbelianBlock, LatticeData, TorusData, abelian_from_ap
from .errors import InvalidSimplicialError, ShapeError, UnsupportedInputError
from .onemotive import OneMotiveSpec, assemble
from .witt import RingParams

__all__ = [
    "SimplicialComponents",
    "DivisorPresentation",
    "PicardSkeleton",
    "H1Ledger",
    "component_complex",
    "cocharacter_group",
    "div0_lattice",
    "picard_skeleton",
    "h1_weight_ledger",
]


@dataclass(frozen=True)
class SimplicialComponents:
    """Component counts of X_0..X_2 (optionally X_3) and the face maps at the
    component level: face_maps[j-1][i] sends level-j components through d_i."""

    counts: tuple[int, ...]
    face_maps: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        object.__setattr__(
            self,
            "face_maps",
            tuple(tuple(tuple(int(x) for x in fmap) for fmap in level) for level in self.face_maps),
        )

    def validate(self) -> None:
        counts = self.counts
        if len(counts) not in (3, 4) or any(c < 0 for c in counts):
            raise InvalidSimplicialError("counts must list 3 or 4 non-negative levels")
        if len(self.face_maps) != len(counts) - 1:
            raise InvalidSimplicialError("face maps required for every level j >= 1")
        for j in range(1, len(counts)):
            maps = self.face_maps[j - 1]
            if len(maps) != j + 1:
                raise InvalidSimplicialError(f"level {j} needs {j + 1} face maps")
            for fmap in maps:
                if len(fmap) != counts[j]:
                    raise InvalidSimplicialError(f"face map at level {j} has wrong length")
                if any(not (0 <= v < counts[j - 1]) for v in fmap):
                    raise InvalidSimplicialError(f"face map at level {j} lands out of range")
        # d_i d_j = d_{j-1} d_i for i < j, checked wherever both sides exist
        for lvl in range(2, len(counts)):
            lower = self.face_maps[lvl - 2]
            upper = self.face_maps[lvl - 1]
            for i in range(lvl + 1):
                for j in range(i + 1, lvl + 1):
                    for s in range(counts[lvl]):
                        if lower[i][upper[j][s]] != lower[j - 1][upper[i][s]]:
                            raise InvalidSimplicialError(
                                f"simplicial identity d_{i} d_{j} = d_{j-1} d_{i} fails at level {lvl}, component {s}"
                            )

    def face(self, level: int, i: int) -> tuple[int, ...]:
        return self.face_maps[level - 1][i]


def component_complex(s: SimplicialComponents) -> tuple[list[list[int]], list[list[int]]]:
    """Integer chain complex C_2 -> C_1 -> C_0 with differentials the
    alternating sums of the face maps; validates the simplicial identities."""
    s.validate()
    c0, c1, c2 = s.counts[0], s.counts[1], s.counts[2]
    d1 = intmat.zeros(c0, c1)
    for j in range(c1):
        d1[s.face(1, 0)[j]][j] += 1
        d1[s.face(1, 1)[j]][j] -= 1
    d2 = intmat.zeros(c1, c2)
    for j in range(c2):
        d2[s.face(2, 0)[j]][j] += 1
        d2[s.face(2, 1)[j]][j] -= 1
        d2[s.face(2, 2)[j]][j] += 1
    composite = intmat.mul(d1, d2)
    assert all(all(x == 0 for x in row) for row in composite)
    return d1, d2


def cocharacter_group(s: SimplicialComponents) -> tuple[int, list[list[int]]]:
    """Rank and a lifted basis (columns) of Ker d^2 / Im d^1 in the dualized
    complex C^0 -> C^1 -> C^2.

    The quotient is free and Im(C_1 -> C_0) is a direct summand: both facts
    are asserted via elementary divisors.
    """
    d1, d2 = component_complex(s)
    dual1 = intmat.transpose(d1)  # C^0 -> C^1
    dual2 = intmat.transpose(d2)  # C^1 -> C^2
    # the image of d_1 (equivalently d^1) is a direct summand
    divisors = intmat.elementary_divisors(d1)
    assert all(d == 1 for d in divisors), "image of C_1 -> C_0 is not a direct summand"
    kernel = intmat.kernel_basis(dual2)  # columns, saturated in C^1
    k = len(kernel)
    if k == 0:
        return 0, []
    kmat = intmat.transpose(kernel)  # c1 x k, columns = kernel basis
    # express Im d^1 in kernel coordinates (possible: d^2 d^1 = 0, kernel saturated)
    coords = intmat.solve_exact(kmat, dual1)
    assert coords is not None, "image of d^1 does not land in Ker d^2"
    u, d, _ = intmat.smith_normal_form(coords)
    nz = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]
    assert all(x == 1 for x in nz), "cocharacter quotient has torsion"
    rank = k - len(nz)
    uinv = intmat.inverse_unimodular(u)
    # free-part basis lifts: kernel basis times the trailing columns of U^(-1)
    lift = intmat.mul(kmat, [[uinv[i][j] for j in range(len(nz), k)] for i in range(k)])
    basis = [[lift[i][j] for i in range(len(lift))] for j in range(rank)]
    return rank, basis


@dataclass(frozen=True)
class DivisorPresentation:
    """Integer presentation of the boundary divisor lattice: m divisor
    components upstairs, the two pullback matrices to level 1 (rows =
    divisor components on X_1), and the matrix of degree classes cutting out
    the subgroup mapping to zero in the component group of the Picard
    functor."""

    m: int
    pull0: tuple[tuple[int, ...], ...]
    pull1: tuple[tuple[int, ...], ...]
    ns_classes: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for name, mat in (("pull0", self.pull0), ("pull1", self.pull1), ("ns_classes", self.ns_classes)):
            object.__setattr__(self, name, tuple(tuple(int(x) for x in row) for row in mat))
        if self.m < 0:
            raise ShapeError("m must be non-negative")
        r0 = intmat.shape(self.pull0) if self.pull0 else (0, self.m)
        r1 = intmat.shape(self.pull1) if self.pull1 else (0, self.m)
        if r0 != r1:
            raise ShapeError("pull0 and pull1 must have equal shapes")
        if self.m and r0[1] != self.m:
            raise ShapeError("pullback matrices must have m columns")
        if self.ns_classes and intmat.shape(self.ns_classes)[1] != self.m:
            raise ShapeError("ns_classes must have m columns")


def div0_lattice(d: DivisorPresentation) -> tuple[int, list[list[int]]]:
    """Rank and basis (columns) of the divisors with equal pullbacks that
    die in the component group: Ker(pull0 - pull1) intersected with
    Ker(ns_classes)."""
    if d.m == 0:
        return 0, []
    diff = [
        [a - b for a, b in zip(r0, r1)] for r0, r1 in zip(d.pull0, d.pull1)
    ]
    stacked = [list(row) for row in diff] + [list(row) for row in d.ns_classes]
    if not stacked:
        stacked = [[0] * d.m]
    kernel = intmat.kernel_basis(stacked)
    return len(kernel), kernel


@dataclass(frozen=True)
class PicardSkeleton:
    """Discrete invariants of a Picard-type presentation: boundary lattice
    rank, torus cocharacter rank, and the abelian dimension supplied by the
    caller."""

    lattice_rank: int
    torus_rank: int
    abelian_dim: int

    def __post_init__(self):
        if min(self.lattice_rank, self.torus_rank, self.abelian_dim) < 0:
            raise ShapeError("skeleton ranks must be non-negative")


def _default_abelian(g: int, params: RingParams) -> AbelianBlock:
    if g == 0:
        return AbelianBlock.empty(params)
    if params.a != 1:
        raise UnsupportedInputError(
            "default abelian blocks use the companion model and need a = 1; pass an explicit block"
        )
    block = abelian_from_ap(0, params)
    for _ in range(g - 1):
        block = block + abelian_from_ap(0, params)
    return block


def picard_skeleton(
    s: SimplicialComponents,
    d: DivisorPresentation,
    g: int,
    params: RingParams,
    abelian: AbelianBlock | None = None,
) -> tuple[PicardSkeleton, OneMotiveSpec]:
    """Discrete skeleton of the Picard presentation of the simplicial data,
    plus a split presentation with trivial actions realizing it.

    The abelian part is caller data: either an explicit block or the default
    supersingular companion blocks of dimension g.
    """
    lattice_rank, _ = div0_lattice(d)
    torus_rank, _ = cocharacter_group(s)
    block = abelian if abelian is not None else _default_abelian(g, params)
    if block.dim != g:
        raise ShapeError(f"abelian block has dimension {block.dim}, expected {g}")
    skeleton = PicardSkeleton(lattice_rank, torus_rank, g)
    spec = OneMotiveSpec.split(
        params,
        LatticeData.trivial(lattice_rank),
        TorusData.trivial(torus_rank),
        block,
        label="picard-skeleton",
    )
    return skeleton, spec


@dataclass(frozen=True)
class H1Ledger:
    """Expected weight-graded ranks of the twisted first cohomology of the
    simplicial pair, checked against the rank of the assembled realization."""

    gr0: int
    gr1: int
    gr2: int
    total: int
    crystal_rank: int

    @property
    def consistent(self) -> bool:
        return self.total == self.crystal_rank


def h1_weight_ledger(
    sk: PicardSkeleton, params: RingParams, abelian: AbelianBlock | None = None
) -> H1Ledger:
    """Rank ledger: weight 0 from the torus cocharacters, weight 1 of size
    2g, weight 2 from the boundary divisor lattice; the total must equal the
    rank of the assembled split presentation."""
    g = sk.abelian_dim
    block = abelian if abelian is not None else _default_abelian(g, params)
    if block.dim != g:
        raise ShapeError(f"abelian block has dimension {block.dim}, expected {g}")
    spec = OneMotiveSpec.split(
        params,
        LatticeData.trivial(sk.lattice_rank),
        TorusData.trivial(sk.torus_rank),
        block,
        label="h1-ledger",
    )
    crystal_rank = assemble(spec).module.rank
    gr0, gr1, gr2 = sk.torus_rank, 2 * g, sk.lattice_rank
    return H1Ledger(gr0, gr1, gr2, gr0 + gr1 + gr2, crystal_rank)
