"""Root data, characters and radial special functions for a catalog of
compact connected Lie groups.

The catalog covers torus(n), su2, so3, su2xsu2 and su3.  Every entry carries
one fixed Ad-invariant inner product: the negative trace form of the defining
representation, scaled so that orthonormal coordinates on the Cartan
subalgebra measure radians along coroot directions.  With this scale the
kernel of exp restricted to the Cartan subalgebra is 2*pi times the coroot
lattice for the simply connected entries (4*pi*Z for su2, its index-two
superset 2*pi*Z for so3).

Construction runs in two layers.  A rational layer (Fractions in
lattice-adapted ambient coordinates) checks the structural invariants
exactly: strict positivity of <rho, alpha>, integrality of the pairings
between the weight lattice and the exponential kernel lattice, closure of
the Weyl group with determinants of modulus one, and the dimension count
dim = rank + 2 * #positive_roots.  A numeric layer then fixes an orthonormal
basis of the Cartan subalgebra and exposes float data (roots as covectors,
rho, lattice bases, Weyl matrices) for all downstream numerics.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    CatalogError,
    DomainError,
    InstabilityError,
    ResourceLimitError,
    SingularityError,
)

TWO_PI = 2.0 * math.pi

# Candidate/result caps for lattice walks (resource guard, not physics).
WEIGHT_CAP = 200_000
LATTICE_CAP = 1_000_000

# |sin(alpha(H)/2)| below this means H sits on (or hugs) a singular wall and
# character ratios switch to the wall-limit derivative formula.
_SINGULAR_SIN = 5e-5

# |alpha(H)| below this switches sin(x/2)/(x/2) to its Taylor series.
_J_SERIES_CUT = 1e-4


# ---------------------------------------------------------------------------
# exact (rational) layer
# ---------------------------------------------------------------------------

def _fvec(*entries) -> tuple[Fraction, ...]:
    return tuple(Fraction(e) for e in entries)


def _dot(gram, u, v) -> Fraction:
    return sum(gram[i][i] * u[i] * v[i] for i in range(len(u)))


def _matvec(m, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


def _matmul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


def _det(m) -> Fraction:
    n = len(m)
    if n == 1:
        return m[0][0]
    out = Fraction(0)
    for j in range(n):
        minor = tuple(row[:j] + row[j + 1:] for row in m[1:])
        out += (-1) ** j * m[0][j] * _det(minor)
    return out


@dataclass(frozen=True)
class _RawGroup:
    """Exact catalog data in lattice-adapted ambient coordinates.

    ``gram`` is the diagonal of the metric in ambient coordinates; all root,
    weight and lattice data are stored as metric vectors, so every pairing
    below goes through ``_dot``.  ``gamma_gens`` are the generators of the
    exponential kernel divided by 2*pi.
    """

    name: str
    ambient: int
    gram: tuple[tuple[Fraction, ...], ...]
    pos_roots: tuple[tuple[Fraction, ...], ...]
    simple_roots: tuple[tuple[Fraction, ...], ...]
    weight_gens: tuple[tuple[Fraction, ...], ...]
    gamma_gens: tuple[tuple[Fraction, ...], ...]
    weyl: tuple[tuple[tuple[tuple[Fraction, ...], ...], int], ...]
    factor_names: tuple[str, ...]
    factor_slices: tuple[tuple[int, int], ...]

    @property
    def rank(self) -> int:
        return len(self.weight_gens)

    @property
    def rho(self) -> tuple[Fraction, ...]:
        half = Fraction(1, 2)
        return tuple(
            half * sum(r[i] for r in self.pos_roots) if self.pos_roots else Fraction(0)
            for i in range(self.ambient)
        )


def _diag_gram(diag) -> tuple[tuple[Fraction, ...], ...]:
    n = len(diag)
    return tuple(
        tuple(Fraction(diag[i]) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def _raw_rank1(name: str, gamma_step, weight_step) -> _RawGroup:
    root = (_fvec(1),)
    eye = ((Fraction(1),),)
    neg = ((Fraction(-1),),)
    return _RawGroup(
        name=name,
        ambient=1,
        gram=_diag_gram([1]),
        pos_roots=root,
        simple_roots=root,
        weight_gens=(_fvec(weight_step),),
        gamma_gens=(_fvec(gamma_step),),
        weyl=((eye, 1), (neg, -1)),
        factor_names=(name,),
        factor_slices=((0, 1),),
    )


def _raw_torus(n: int) -> _RawGroup:
    eye = tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )
    gens = tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )
    return _RawGroup(
        name=f"torus{n}",
        ambient=n,
        gram=_diag_gram([1] * n),
        pos_roots=(),
        simple_roots=(),
        weight_gens=gens,
        gamma_gens=gens,
        weyl=((eye, 1),),
        factor_names=(f"torus{n}",),
        factor_slices=((0, n),),
    )


def _raw_su3() -> _RawGroup:
    half = Fraction(1, 2)
    sixth = Fraction(1, 6)
    pos = (
        _fvec(half, -half, 0),
        _fvec(0, half, -half),
        _fvec(half, 0, -half),
    )
    weyl = []
    for perm in itertools.permutations(range(3)):
        mat = tuple(
            tuple(Fraction(1) if perm[i] == j else Fraction(0) for j in range(3))
            for i in range(3)
        )
        sign = 1
        for i in range(3):
            for j in range(i + 1, 3):
                if perm[i] > perm[j]:
                    sign = -sign
        weyl.append((mat, sign))
    return _RawGroup(
        name="su3",
        ambient=3,
        gram=_diag_gram([2, 2, 2]),
        pos_roots=pos,
        simple_roots=pos[:2],
        weight_gens=(
            _fvec(2 * sixth, -sixth, -sixth),
            _fvec(sixth, sixth, -2 * sixth),
        ),
        gamma_gens=(_fvec(1, -1, 0), _fvec(0, 1, -1)),
        weyl=tuple(weyl),
        factor_names=("su3",),
        factor_slices=((0, 2),),
    )


def _raw_product(name: str, parts: list[_RawGroup]) -> _RawGroup:
    ambient = sum(p.ambient for p in parts)
    offsets = list(itertools.accumulate([0] + [p.ambient for p in parts]))

    def embed(vec, idx):
        out = [Fraction(0)] * ambient
        for j, val in enumerate(vec):
            out[offsets[idx] + j] = val
        return tuple(out)

    gram = [Fraction(0)] * ambient
    for idx, p in enumerate(parts):
        for j in range(p.ambient):
            gram[offsets[idx] + j] = p.gram[j][j]

    weyl = []
    for combo in itertools.product(*[p.weyl for p in parts]):
        mat = tuple(
            tuple(
                combo[idx][0][i - offsets[idx]][j - offsets[idx]]
                if offsets[idx] <= i < offsets[idx + 1]
                and offsets[idx] <= j < offsets[idx + 1]
                else Fraction(0)
                for j in range(ambient)
            )
            for idx in range(len(parts))
            for i in range(offsets[idx], offsets[idx + 1])
        )
        sign = 1
        for w in combo:
            sign *= w[1]
        weyl.append((mat, sign))

    rank_offsets = list(itertools.accumulate([0] + [p.rank for p in parts]))
    return _RawGroup(
        name=name,
        ambient=ambient,
        gram=_diag_gram(gram),
        pos_roots=tuple(
            embed(r, idx) for idx, p in enumerate(parts) for r in p.pos_roots
        ),
        simple_roots=tuple(
            embed(r, idx) for idx, p in enumerate(parts) for r in p.simple_roots
        ),
        weight_gens=tuple(
            embed(g, idx) for idx, p in enumerate(parts) for g in p.weight_gens
        ),
        gamma_gens=tuple(
            embed(g, idx) for idx, p in enumerate(parts) for g in p.gamma_gens
        ),
        weyl=tuple(weyl),
        factor_names=tuple(n for p in parts for n in p.factor_names),
        factor_slices=tuple(
            (rank_offsets[idx] + a, rank_offsets[idx] + b)
            for idx, p in enumerate(parts)
            for (a, b) in p.factor_slices
        ),
    )


def _validate_raw(raw: _RawGroup) -> None:
    rho = raw.rho
    for alpha in raw.pos_roots:
        if _dot(raw.gram, rho, alpha) <= 0:
            raise InstabilityError(f"{raw.name}: <rho, alpha> not positive")
    for lam in raw.weight_gens:
        for gam in raw.gamma_gens:
            pairing = _dot(raw.gram, lam, gam)
            if pairing.denominator != 1:
                raise InstabilityError(
                    f"{raw.name}: weight/lattice pairing {pairing} not integral"
                )
    mats = {m for m, _ in raw.weyl}
    for (ma, sa), (mb, sb) in itertools.product(raw.weyl, raw.weyl):
        prod = _matmul(ma, mb)
        if prod not in mats:
            raise InstabilityError(f"{raw.name}: Weyl set not closed under product")
    for m, sign in raw.weyl:
        d = _det(m)
        if abs(d) != 1 or d != sign:
            raise InstabilityError(f"{raw.name}: Weyl determinant mismatch")
    for i in range(raw.ambient):
        if raw.gram[i][i] <= 0:
            raise InstabilityError(f"{raw.name}: metric not positive definite")


# ---------------------------------------------------------------------------
# numeric layer
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupSpec:
    """Immutable description of one catalog group in orthonormal coordinates.

    Attributes
    ----------
    positive_roots : (m, rank) array
        Roots as covectors; alpha(H) = positive_roots[i] @ H.
    rho : (rank,) array
        Half the sum of positive roots.
    weight_basis : (rank, rank) array
        Rows generate the weight lattice of the group.
    gamma_basis : (rank, rank) array
        Rows generate Gamma = {H : exp(H) = identity} (2*pi included).
    weyl_group : tuple of (matrix, sign)
        Orthogonal rank x rank matrices with their determinants.
    volume : float
        Riemannian volume of the group; this is the exact conversion factor
        between the geodesic lattice sum and the character series.
    """

    name: str
    rank: int
    dim: int
    positive_roots: np.ndarray
    simple_roots: np.ndarray
    rho: np.ndarray
    rho_norm_sq: float
    weight_basis: np.ndarray
    gamma_basis: np.ndarray
    weyl_group: tuple
    cell_volume: float
    volume: float
    factor_names: tuple
    factor_slices: tuple
    _raw: _RawGroup = field(repr=False)
    _weyl_mats: np.ndarray = field(repr=False)
    _weyl_signs: np.ndarray = field(repr=False)
    _coord_map: np.ndarray = field(repr=False)   # (rank, ambient): v -> coords
    _lift: np.ndarray = field(repr=False)        # (ambient, rank): coords -> v

    @property
    def n_positive_roots(self) -> int:
        return len(self.positive_roots)

    @property
    def weyl_order(self) -> int:
        return len(self.weyl_group)

    @property
    def is_abelian(self) -> bool:
        return self.n_positive_roots == 0

    def weight(self, coords) -> "Weight":
        return weight(self, coords)

    def __repr__(self) -> str:  # keep array noise out of logs
        return (
            f"GroupSpec({self.name}, rank={self.rank}, dim={self.dim}, "
            f"roots={self.n_positive_roots}, |W|={self.weyl_order})"
        )


def _finish(raw: _RawGroup) -> GroupSpec:
    _validate_raw(raw)
    gram = np.array([[float(x) for x in row] for row in raw.gram])
    span = raw.simple_roots if raw.pos_roots else raw.weight_gens
    basis = []
    for v in span:
        w = np.array([float(x) for x in v])
        for b in basis:
            w = w - (b @ gram @ w) * b
        nrm = math.sqrt(w @ gram @ w)
        if nrm < 1e-12:
            continue
        basis.append(w / nrm)
    if len(basis) != raw.rank:
        raise InstabilityError(f"{raw.name}: Cartan basis has wrong rank")
    lift = np.array(basis).T                       # (ambient, rank)
    coord_map = lift.T @ gram                      # (rank, ambient)

    def coords(vec) -> np.ndarray:
        return coord_map @ np.array([float(x) for x in vec])

    pos = (
        np.array([coords(r) for r in raw.pos_roots])
        if raw.pos_roots
        else np.zeros((0, raw.rank))
    )
    simple = (
        np.array([coords(r) for r in raw.simple_roots])
        if raw.simple_roots
        else np.zeros((0, raw.rank))
    )
    rho_exact = raw.rho
    rho = coords(rho_exact)
    rho_nsq = float(_dot(raw.gram, rho_exact, rho_exact))
    wb = np.array([coords(g) for g in raw.weight_gens])
    gb = TWO_PI * np.array([coords(g) for g in raw.gamma_gens])

    mats, signs = [], []
    for m, sign in raw.weyl:
        mf = np.array([[float(x) for x in row] for row in m])
        om = coord_map @ mf @ lift
        if not np.allclose(om @ om.T, np.eye(raw.rank), atol=1e-12):
            raise InstabilityError(f"{raw.name}: Weyl matrix not orthogonal")
        mats.append(om)
        signs.append(sign)
    mats = np.array(mats)
    signs = np.array(signs, dtype=float)

    cell = abs(float(np.linalg.det(gb)))
    pi_rho = 1.0
    for alpha in raw.pos_roots:
        pi_rho *= float(_dot(raw.gram, rho_exact, alpha))
    volume = (TWO_PI ** len(raw.pos_roots)) * cell / pi_rho

    for arr in (pos, simple, rho, wb, gb, mats, signs):
        arr.setflags(write=False)

    return GroupSpec(
        name=raw.name,
        rank=raw.rank,
        dim=raw.rank + 2 * len(raw.pos_roots),
        positive_roots=pos,
        simple_roots=simple,
        rho=rho,
        rho_norm_sq=rho_nsq,
        weight_basis=wb,
        gamma_basis=gb,
        weyl_group=tuple((mats[i], int(signs[i])) for i in range(len(signs))),
        cell_volume=cell,
        volume=volume,
        factor_names=raw.factor_names,
        factor_slices=raw.factor_slices,
        _raw=raw,
        _weyl_mats=mats,
        _weyl_signs=signs,
        _coord_map=coord_map,
        _lift=lift,
    )


_TORUS_RE = re.compile(r"^torus(\d+)$")


@lru_cache(maxsize=None)
def make_group(name: str) -> GroupSpec:
    """Build (and cache) the catalog entry with the given name.

    Valid names: ``torus<n>`` for n >= 1, ``su2``, ``so3``, ``su2xsu2``,
    ``su3``.
    """
    if name == "su2":
        return _finish(_raw_rank1("su2", 2, Fraction(1, 2)))
    if name == "so3":
        return _finish(_raw_rank1("so3", 1, 1))
    if name == "su3":
        return _finish(_raw_su3())
    if name == "su2xsu2":
        return _finish(_raw_product("su2xsu2", [_raw_rank1("su2", 2, Fraction(1, 2))] * 2))
    m = _TORUS_RE.match(name)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise CatalogError("torus dimension must be >= 1")
        if n > 16:
            raise CatalogError("torus dimension capped at 16")
        return _finish(_raw_torus(n))
    raise CatalogError(
        f"unknown group {name!r}; expected torus<n>, su2, so3, su2xsu2 or su3"
    )


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Weight:
    """A dominant integral weight, keyed by its integer coordinates in the
    weight-lattice basis of its group."""

    group_name: str
    coords: tuple[int, ...]
    dimension: int = field(compare=False)
    lambda_plus_rho_norm_sq: float = field(compare=False)
    mu: np.ndarray = field(compare=False, repr=False)          # lambda + rho
    _norm_exact: Fraction = field(compare=False, repr=False)


def _exact_weight_vector(raw: _RawGroup, coords) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * raw.ambient
    for c, gen in zip(coords, raw.weight_gens):
        for i in range(raw.ambient):
            out[i] += c * gen[i]
    return tuple(out)


def weight(g: GroupSpec, coords) -> Weight:
    """Construct the dominant weight with the given integer coordinates."""
    coords = tuple(int(c) for c in coords)
    if len(coords) != g.rank:
        raise DomainError(f"{g.name}: expected {g.rank} weight coordinates")
    return _weight_cached(g.name, coords)


@lru_cache(maxsize=250_000)
def _weight_cached(group_name: str, coords: tuple[int, ...]) -> Weight:
    g = make_group(group_name)
    raw = g._raw
    lam = _exact_weight_vector(raw, coords)
    for alpha in raw.simple_roots:
        if _dot(raw.gram, lam, alpha) < 0:
            raise DomainError(f"{g.name}: coordinates {coords} are not dominant")
    rho = raw.rho
    mu_exact = tuple(a + b for a, b in zip(lam, rho))
    nsq = _dot(raw.gram, mu_exact, mu_exact)
    dim = weyl_dimension(g, coords)
    mu = g._coord_map @ np.array([float(x) for x in mu_exact])
    mu.setflags(write=False)
    return Weight(
        group_name=g.name,
        coords=coords,
        dimension=dim,
        lambda_plus_rho_norm_sq=float(nsq),
        mu=mu,
        _norm_exact=nsq,
    )


def weyl_dimension(g: GroupSpec, coords) -> int:
    """Dimension of the irreducible representation with highest weight
    ``coords``, via the exact rational Weyl product formula."""
    coords = tuple(int(c) for c in coords)
    raw = g._raw
    lam = _exact_weight_vector(raw, coords)
    rho = raw.rho
    mu = tuple(a + b for a, b in zip(lam, rho))
    out = Fraction(1)
    for alpha in raw.pos_roots:
        out *= _dot(raw.gram, mu, alpha) / _dot(raw.gram, rho, alpha)
    if out.denominator != 1:
        raise InstabilityError(f"{g.name}: Weyl dimension {out} not an integer")
    return int(out)


# ---------------------------------------------------------------------------
# torus points and radial special functions
# ---------------------------------------------------------------------------

def _as_points(g: GroupSpec, H) -> tuple[np.ndarray, bool]:
    arr = np.asarray(H, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != g.rank:
            raise DomainError(f"{g.name}: torus point needs {g.rank} coordinates")
        return arr[None, :], True
    if arr.ndim == 2 and arr.shape[1] == g.rank:
        return arr, False
    raise DomainError(f"{g.name}: bad torus point array shape {arr.shape}")


def wall_distance(g: GroupSpec, H) -> np.ndarray:
    """min over positive roots of |sin(alpha(H)/2)|; 1.0 for tori."""
    pts, single = _as_points(g, H)
    if g.is_abelian:
        out = np.ones(len(pts))
    else:
        a = pts @ g.positive_roots.T
        out = np.abs(np.sin(a / 2.0)).min(axis=1)
    return out[0] if single else out


def is_regular(g: GroupSpec, H, tol: float = 1e-8) -> bool:
    return bool(np.all(wall_distance(g, H) > tol))


def j_compact(g: GroupSpec, H):
    """Analytic square root of det(d exp) along the Cartan subalgebra:
    the product over positive roots of sin(alpha(H)/2) / (alpha(H)/2).

    Removable singularities at alpha(H) = 0 are filled with the Taylor
    series of sin(y)/y once |alpha(H)| drops below 1e-4.  The value is 1 at
    H = 0 and may be zero or negative outside the fundamental alcove.
    """
    pts, single = _as_points(g, H)
    if g.is_abelian:
        out = np.ones(len(pts))
        return float(out[0]) if single else out
    y = (pts @ g.positive_roots.T) / 2.0            # (P, m)
    small = np.abs(y) < (_J_SERIES_CUT / 2.0)
    ysq = y * y
    series = 1.0 - ysq / 6.0 + ysq * ysq / 120.0
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(small, series, np.sin(y) / np.where(small, 1.0, y))
    out = ratio.prod(axis=1)
    return float(out[0]) if single else out


def weyl_density(g: GroupSpec, H):
    """Weyl integration density |Delta(H)|^2 = prod 4 sin^2(alpha(H)/2)."""
    pts, single = _as_points(g, H)
    if g.is_abelian:
        out = np.ones(len(pts))
        return float(out[0]) if single else out
    y = (pts @ g.positive_roots.T) / 2.0
    out = (4.0 * np.sin(y) ** 2).prod(axis=1)
    return float(out[0]) if single else out


def weyl_denominator(g: GroupSpec, points: np.ndarray) -> np.ndarray:
    """Complex Weyl denominator prod (e^{i a/2} - e^{-i a/2}) at each point."""
    if g.is_abelian:
        return np.ones(len(points), dtype=complex)
    y = (points @ g.positive_roots.T) / 2.0
    return (2j * np.sin(y)).prod(axis=1)


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

def orbit_stack(g: GroupSpec, weights: list[Weight]) -> np.ndarray:
    """(L, |W|, rank) stack of w(lambda + rho) over the Weyl group."""
    mus = np.array([w.mu for w in weights])         # (L, rank)
    return np.einsum("wij,lj->lwi", g._weyl_mats, mus)


def _numerators(g: GroupSpec, stack: np.ndarray, points: np.ndarray) -> np.ndarray:
    """(L, P) alternating exponential sums sum_w det(w) e^{i <w mu, H>}."""
    phases = np.einsum("lwi,pi->lwp", stack, points)
    return np.einsum("w,lwp->lp", g._weyl_signs, np.exp(1j * phases))


def as_real_checked(values: np.ndarray, context: str, scale: float = 1.0):
    """Drop an imaginary part after asserting it is below 1e-10 relative to
    max(scale, |real part|, 1).  Used wherever a character combination is
    known to be real by symmetry of its coefficients; ``scale`` is the
    natural magnitude of the combination (e.g. sum |c_lambda| d_lambda)."""
    values = np.asarray(values)
    floor = np.maximum(np.maximum(1.0, float(scale)), np.abs(values.real))
    worst = np.max(np.abs(values.imag) / floor) if values.size else 0.0
    if worst > 1e-10:
        raise InstabilityError(
            f"{context}: imaginary part {worst:.3e} above the 1e-10 budget"
        )
    return np.ascontiguousarray(values.real)


class CharacterTable:
    """Batched Weyl-character evaluation for a fixed list of weights.

    Regular points use the quotient of alternating sums directly.  At a
    point lying on s singular walls both alternating sums vanish to order
    exactly s along the rho direction, so the value is the ratio of the
    s-th directional derivatives, a plain finite sum with no limit taken;
    H = 0 additionally short-circuits to the exact dimensions.  Values are
    complex: characters of non-self-conjugate weights (torus characters,
    generic su3 weights) are genuinely complex, and real-by-symmetry
    combinations are validated by the callers via ``as_real_checked``.
    """

    def __init__(self, g: GroupSpec, weights: list[Weight]):
        self.group = g
        self.weights = list(weights)
        self._stack = orbit_stack(g, self.weights)
        self._dims = np.array([float(w.dimension) for w in self.weights])

    def _regular_values(self, points: np.ndarray) -> np.ndarray:
        num = _numerators(self.group, self._stack, points)
        den = weyl_denominator(self.group, points)
        return num / den[None, :]

    def _singular_values(self, pts: np.ndarray) -> np.ndarray:
        """Wall limits by the derivative ratio described in the class
        docstring.  A point within the singular tolerance of s walls gets
        the value on the wall intersection; the difference is O(dist)."""
        g = self.group
        v = g.rho / math.sqrt(g.rho_norm_sq)
        sines = np.abs(np.sin((pts @ g.positive_roots.T) / 2.0))
        order = np.sum(sines <= _SINGULAR_SIN, axis=1)
        rho_stack = np.einsum("wij,j->wi", g._weyl_mats, g.rho)
        mu_v = self._stack @ v                                   # (L, W)
        rho_v = rho_stack @ v                                    # (W,)
        out = np.empty((len(self.weights), len(pts)), dtype=complex)
        for s in np.unique(order):
            sel = order == s
            p = pts[sel]
            num_ph = np.exp(1j * np.einsum("lwi,pi->lwp", self._stack, p))
            den_ph = np.exp(1j * np.einsum("wi,pi->wp", rho_stack, p))
            num = np.einsum("w,lw,lwp->lp", g._weyl_signs, mu_v ** s, num_ph)
            den = np.einsum("w,w,wp->p", g._weyl_signs, rho_v ** s, den_ph)
            if np.min(np.abs(den)) < 1e-8:
                raise InstabilityError(
                    f"{g.name}: degenerate wall-limit denominator "
                    f"(order {int(s)}) at a singular point"
                )
            out[:, sel] = num / den[None, :]
        return out

    def values(self, H) -> np.ndarray:
        """Character values as an (L, P) complex array (or (L,) for one
        point)."""
        g = self.group
        points, single = _as_points(g, H)
        out = np.empty((len(self.weights), len(points)), dtype=complex)
        if g.is_abelian:
            out[:] = self._regular_values(points)
        else:
            dist = wall_distance(g, points)
            ok = dist > _SINGULAR_SIN
            if ok.any():
                out[:, ok] = self._regular_values(points[ok])
            bad = ~ok
            if bad.any():
                bad_pts = points[bad]
                origin = np.max(np.abs(bad_pts), axis=1) < 1e-12
                if origin.any():
                    out[:, np.flatnonzero(bad)[origin]] = self._dims[:, None]
                rest = np.flatnonzero(bad)[~origin]
                if len(rest):
                    out[:, rest] = self._singular_values(points[rest])
        return out[:, 0] if single else out


def character(g: GroupSpec, lam: Weight | tuple, H):
    """Irreducible character of highest weight ``lam`` at torus point(s) H.

    Returns a real value whenever the imaginary part is negligible (always
    the case for self-conjugate weights, so for every su2/so3/su2xsu2
    weight); non-self-conjugate weights keep their complex value.
    """
    if not isinstance(lam, Weight):
        lam = weight(g, lam)
    vals = CharacterTable(g, [lam]).values(H)
    vals = vals[0] if vals.ndim == 2 else vals
    if np.all(np.abs(vals.imag) <= 1e-10 * np.maximum(1.0, np.abs(vals.real))):
        vals = vals.real
    if vals.ndim == 0:
        return complex(vals) if np.iscomplexobj(vals) else float(vals)
    return vals


# ---------------------------------------------------------------------------
# lattices, grids and sample points
# ---------------------------------------------------------------------------

def enumerate_weights(g: GroupSpec, cutoff: float) -> list[Weight]:
    """All dominant weights with ||lambda + rho||^2 <= cutoff, sorted by that
    norm (exact ties broken lexicographically by coordinates)."""
    if cutoff <= 0:
        raise DomainError("cutoff must be positive")
    sig = np.linalg.svd(g.weight_basis, compute_uv=False)
    reach = (math.sqrt(cutoff) + math.sqrt(g.rho_norm_sq)) / sig[-1]
    bound = int(math.ceil(reach)) + 1
    dominant_only = not g.is_abelian
    axis = range(0, bound + 1) if dominant_only else range(-bound, bound + 1)
    if (len(axis)) ** g.rank > WEIGHT_CAP:
        raise ResourceLimitError(
            f"{g.name}: weight scan would visit {(len(axis)) ** g.rank} "
            f"candidates (cap {WEIGHT_CAP}); lower the cutoff"
        )
    cut = Fraction(cutoff)
    # float prefilter over the whole box; the exact comparison below still
    # adjudicates membership, the band just skips hopeless candidates
    grid = np.array(list(itertools.product(axis, repeat=g.rank)), dtype=float)
    mu_f = grid @ g.weight_basis + g.rho
    near = np.einsum("ij,ij->i", mu_f, mu_f) <= cutoff * (1 + 1e-9) + 1e-9
    out = []
    for coords in grid[near]:
        try:
            w = weight(g, coords)
        except DomainError:
            continue
        if w._norm_exact <= cut:
            out.append(w)
    out.sort(key=lambda w: (w._norm_exact, w.coords))
    if len(out) > WEIGHT_CAP:
        raise ResourceLimitError(
            f"{g.name}: {len(out)} weights under cutoff {cutoff} (cap {WEIGHT_CAP})"
        )
    return out


def lattice_points(g: GroupSpec, center, radius: float) -> np.ndarray:
    """All gamma in Gamma with ||center + gamma|| <= radius, as a (K, rank)
    array sorted by distance (ties by integer coordinates)."""
    center = np.asarray(center, dtype=float)
    if center.shape != (g.rank,):
        raise DomainError(f"{g.name}: center needs {g.rank} coordinates")
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    sig = np.linalg.svd(g.gamma_basis, compute_uv=False)
    bound = int(math.ceil((radius + np.linalg.norm(center)) / sig[-1])) + 1
    if (2 * bound + 1) ** g.rank > LATTICE_CAP:
        raise ResourceLimitError(
            f"{g.name}: lattice scan would visit {(2 * bound + 1) ** g.rank} "
            f"candidates (cap {LATTICE_CAP}); lower the radius"
        )
    picked = []
    r2 = radius * radius
    for k in itertools.product(range(-bound, bound + 1), repeat=g.rank):
        gam = np.array(k) @ g.gamma_basis
        d2 = float(np.sum((center + gam) ** 2))
        if d2 <= r2 + 1e-12:
            picked.append((d2, k, gam))
    picked.sort(key=lambda item: (item[0], item[1]))
    if not picked:
        return np.zeros((0, g.rank))
    return np.array([gam for _, _, gam in picked])


def dual_index(g: GroupSpec, xi) -> np.ndarray:
    """Integer coordinates of a weight-lattice vector against the dual basis
    of gamma_basis / 2*pi; rounding beyond 1e-6 raises."""
    xi = np.asarray(xi, dtype=float)
    raw_idx = (g.gamma_basis @ xi) / TWO_PI
    idx = np.rint(raw_idx)
    if np.max(np.abs(raw_idx - idx)) > 1e-6:
        raise InstabilityError(f"{g.name}: vector {xi} is not in the weight lattice")
    return idx.astype(int)


def cell_grid(g: GroupSpec, n: int) -> np.ndarray:
    """Uniform n^rank grid over the fundamental cell spanned by gamma_basis.

    Together with equal weights 1/n^rank this is the periodic trapezoidal
    rule: it integrates every lattice character with dual index below n
    exactly, which is what all quadrature in the package relies on.
    """
    if n < 1:
        raise DomainError("grid size must be >= 1")
    idx = np.indices((n,) * g.rank).reshape(g.rank, -1).T / float(n)
    return idx @ g.gamma_basis


def alcove_points(g: GroupSpec, count: int, margin: float = 0.04) -> np.ndarray:
    """Deterministic spread of ``count`` regular points inside the
    fundamental alcove (fundamental cell for tori), kept off every wall by
    the given relative margin."""
    if count < 1:
        raise DomainError("count must be >= 1")
    if not 0 < margin < 0.5:
        raise DomainError("margin must be in (0, 0.5)")

    def interval(lo, hi, k):
        w = hi - lo
        return lo + w * (margin + (1 - 2 * margin) * (np.arange(k) + 0.5) / k)

    def coprime_step(seed, k):
        step = seed
        while math.gcd(step, k) != 1:
            step += 1
        return step

    if g.name == "su2":
        return interval(0.0, TWO_PI, count)[:, None]
    if g.name == "so3":
        return interval(0.0, math.pi, count)[:, None]
    if g.name == "su2xsu2":
        a = interval(0.0, TWO_PI, count)
        step = coprime_step(7, count)
        b = interval(0.0, TWO_PI, count)[(step * np.arange(count) + 3) % count]
        return np.column_stack([a, b])
    if g.name == "su3":
        verts = np.array(
            [[0.0, 0.0], 2 * TWO_PI * g.weight_basis[0], 2 * TWO_PI * g.weight_basis[1]]
        )
        bary = []
        depth = 2
        while (depth - 1) * depth // 2 < count:
            depth += 1
        for i in range(1, depth):
            for j in range(1, depth - i + 1):
                k = depth + 2 - i - j
                bary.append((i, j, k))
        bary = np.array(bary[:count], dtype=float)
        bary /= bary.sum(axis=1, keepdims=True)
        bary = margin / 3 + (1 - margin) * bary
        bary /= bary.sum(axis=1, keepdims=True)
        return bary @ verts
    if g.is_abelian:
        pts = np.empty((count, g.rank))
        seeds = [1, 3, 7, 11, 17, 23, 29, 37, 41, 43, 47, 53, 59, 61, 67, 71]
        for jdim in range(g.rank):
            step = coprime_step(seeds[jdim % len(seeds)], count)
            perm = (step * np.arange(count)) % count
            pts[:, jdim] = -math.pi + TWO_PI * (
                margin + (1 - 2 * margin) * (perm + 0.5) / count
            )
        return pts
    raise CatalogError(f"no alcove sampler for {g.name}")


def haar_quadrature(g: GroupSpec, values: np.ndarray) -> float:
    """Mean of ``values * weyl_density`` over a cell grid, divided by |W|:
    the probability-Haar integral of the central function the values came
    from.  ``values`` must be sampled on ``cell_grid(g, n)`` in order."""
    n_pts = len(values)
    n = round(n_pts ** (1.0 / g.rank))
    if n ** g.rank != n_pts:
        raise DomainError("values are not a full cell grid")
    grid = cell_grid(g, n)
    dens = weyl_density(g, grid)
    return float(np.mean(values * dens) / g.weyl_order)
