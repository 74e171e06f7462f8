"""Standard rank-building blocks for the three weight-graded pieces of a
1-motive realization: lattice part (weight 0), abelian part (weight -1),
toric part (weight -2), and rank-1 twists.

Normalization: the weight -2 twist has F = [1], V = [p]; its twisted dual
(weight 0) has F = [p], V = [1].  The torus block carries a unimodular F,
the lattice block a unimodular V, so F is an isomorphism on the lowest
graded piece and V on the highest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import intmat
from .errors import (
    InvalidActionError,
    InvalidTraceError,
    PrecisionError,
    ShapeError,
    UnsupportedInputError,
)
from .semilinear import (
    FilteredFModule,
    direct_sum,
    newton_slopes,
    verify,
    wmat_from_ints,
)
from .witt import RingParams

ORDER_SEARCH_LIMIT = 120

__all__ = [
    "LatticeData",
    "TorusData",
    "AbelianBlock",
    "tate",
    "lattice_block",
    "torus_block",
    "abelian_from_ap",
]


def _validated_action(sigma, rank: int) -> list[list[int]]:
    mat = [list(map(int, row)) for row in sigma]
    r, c = intmat.shape(mat) if mat else (0, 0)
    if (r, c) != (rank, rank):
        raise ShapeError(f"sigma action must be {rank}x{rank}")
    if rank == 0:
        return mat
    if not intmat.is_unimodular(mat):
        raise InvalidActionError("sigma action must be unimodular over Z")
    intmat.matrix_order(mat, ORDER_SEARCH_LIMIT)
    return mat


@dataclass(frozen=True)
class LatticeData:
    """A free Z-lattice of finite rank with a finite-order Galois action."""

    rank: int
    sigma_action: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "sigma_action", tuple(tuple(int(x) for x in row) for row in self.sigma_action)
        )
        _validated_action(self.sigma_action, self.rank)

    @staticmethod
    def trivial(rank: int) -> "LatticeData":
        return LatticeData(rank, tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank)))


@dataclass(frozen=True)
class TorusData:
    """A torus given by its cocharacter lattice with a finite-order action."""

    rank: int
    sigma_action: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "sigma_action", tuple(tuple(int(x) for x in row) for row in self.sigma_action)
        )
        _validated_action(self.sigma_action, self.rank)

    @staticmethod
    def trivial(rank: int) -> "TorusData":
        return TorusData(rank, tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank)))


def tate(m: int, params: RingParams) -> FilteredFModule:
    """Rank-1 twist of weight -2m.

    m = 1 is the unit-root twist (F = [1], V = [p]); m = 0 its twisted dual
    (F = [p], V = [1]).  Other integers extend the family consistently with
    the tensor product, at the cost of level |m| resp. 1 - m.
    """
    if m >= 1:
        f = wmat_from_ints(params, [[1]])
        v = wmat_from_ints(params, [[params.p**m]])
        level = m
    else:
        f = wmat_from_ints(params, [[params.p ** (1 - m)]])
        v = wmat_from_ints(params, [[1]])
        level = 1 - m
    return FilteredFModule(params, 1, (-2 * m,), f, v, level)


def lattice_block(d: LatticeData, params: RingParams) -> FilteredFModule:
    """Weight-0 block: F = p A, V = A^(-1) for the lifted sigma action A."""
    a = [list(row) for row in d.sigma_action]
    ainv = intmat.inverse_unimodular(a) if d.rank else []
    f = wmat_from_ints(params, [[params.p * x for x in row] for row in a])
    v = wmat_from_ints(params, ainv)
    return FilteredFModule(params, d.rank, (0,) * d.rank, f, v, 1)


def torus_block(d: TorusData, params: RingParams) -> FilteredFModule:
    """Weight -2 block: F = B, V = p B^(-1) for the lifted sigma action B."""
    b = [list(row) for row in d.sigma_action]
    binv = intmat.inverse_unimodular(b) if d.rank else []
    f = wmat_from_ints(params, b)
    v = wmat_from_ints(params, [[params.p * x for x in row] for row in binv])
    return FilteredFModule(params, d.rank, (-2,) * d.rank, f, v, 1)


@dataclass(frozen=True)
class AbelianBlock:
    """Weight -1 block of even rank 2g with slopes in [0,1] symmetric under
    s -> 1 - s.  Built from a Frobenius trace (elliptic companion matrix)
    or accepted as an explicit verified module."""

    dim: int
    crystal: FilteredFModule

    @staticmethod
    def empty(params: RingParams) -> "AbelianBlock":
        return AbelianBlock(0, FilteredFModule(params, 0, (), (), (), 1))

    @staticmethod
    def from_module(module: FilteredFModule) -> "AbelianBlock":
        if module.rank % 2:
            raise UnsupportedInputError("abelian block must have even rank 2g")
        if any(w != -1 for w in module.weights):
            raise UnsupportedInputError("abelian block must be pure of weight -1")
        if module.level != 1 or module.v_mat is None:
            raise UnsupportedInputError("abelian block must be a level-1 module with V")
        rep = verify(module)
        if not rep.ok:
            raise UnsupportedInputError(
                f"abelian block fails verification: {rep.first_failure.name}"
            )
        if module.rank:
            slopes = newton_slopes(module).as_list()
            if sorted(1 - s for s in slopes) != slopes:
                raise UnsupportedInputError("abelian block slopes are not symmetric under s -> 1-s")
        return AbelianBlock(module.rank // 2, module)

    def __add__(self, other: "AbelianBlock") -> "AbelianBlock":
        return AbelianBlock(self.dim + other.dim, direct_sum(self.crystal, other.crystal))


def abelian_from_ap(a_p: int, params: RingParams) -> AbelianBlock:
    """Rank-2 abelian block from the companion matrix of x^2 - a_p x + q,
    q = p^a.  Requires |a_p| <= 2 sqrt(q) and an integral V = p F^(-1); the
    latter holds exactly when q = p, otherwise an explanatory error is
    raised (supply an explicit module instead)."""
    p, n, a = params.p, params.n, params.a
    q = p**a
    if a_p * a_p > 4 * q:
        raise InvalidTraceError(f"|a_p| = {abs(a_p)} violates the Weil bound 2 sqrt({q})")
    if n < 2 * a + 1:
        raise PrecisionError(
            f"companion abelian block needs n >= {2*a + 1} to pin its slopes",
            required=2 * a + 1,
        )
    # V = p F^(-1) = (p/q) [[a_p, q], [-1, 0]] entrywise; integral iff q | p * entry
    entries = [[p * a_p, p * q], [-p, 0]]
    if any(x % q for row in entries for x in row):
        raise UnsupportedInputError(
            f"V = p F^(-1) is not integral over F_{q}: the companion model needs q = p; "
            "pass an explicit weight -1 module instead"
        )
    f = wmat_from_ints(params, [[0, -q], [1, a_p]])
    v = wmat_from_ints(params, [[x // q for x in row] for row in entries])
    module = FilteredFModule(params, 2, (-1, -1), f, v, 1)
    slopes = newton_slopes(module).as_list()
    assert sorted(Fraction(1) - s for s in slopes) == slopes
    assert verify(module).ok
    return AbelianBlock(1, module)
