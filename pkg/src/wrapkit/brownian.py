"""Brownian motion on the catalog groups by matrix simulation, and the
Monte Carlo verification of the transport identities.

The scheme is geodesic Euler: xi_{k+1} = xi_k * exp(sqrt(h) sum_i X_i z_i)
with iid standard normal z and X_i an orthonormal basis of the Lie algebra
for the same inner product all analytic modules use.  For a bi-invariant
metric this scheme needs no drift correction and converges weakly at first
order to the process generated by half the group Laplacian (the plain heat
semigroup).

Determinism contract: every estimator splits its paths into fixed-size
chunks; chunk k uses an independent Philox stream keyed by (seed, tag, k),
and per-chunk partial results are reduced in chunk order.  Worker-thread
count therefore never changes any output bit, only wall time.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DomainError,
    InstabilityError,
    ResolutionError,
    ResourceLimitError,
)
from .groups import GroupSpec, TWO_PI, weyl_density
from .heat import heat_coefficients
from .wrapping import CentralFunction

_COST_CAP = 5e8          # paths times steps
_RENORM_EVERY = 100
_DRIFT_TOL = 1e-6

_TAG_GROUP = 0
_TAG_FLAT = 1
_TAG_COUPLED = 2


# ---------------------------------------------------------------------------
# configuration and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SdeConfig:
    """Simulation request; part of the experiment identity (chunk included)."""

    group: GroupSpec
    t: float
    step: float
    paths: int
    seed: int
    chunk: int = 20000

    def __post_init__(self):
        if self.t <= 0:
            raise DomainError("horizon t must be positive")
        if not 0 < self.step <= min(self.t, 0.01):
            raise DomainError("step must satisfy 0 < h <= min(t, 0.01)")
        if self.paths < 1:
            raise DomainError("paths must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.chunk < 1:
            raise DomainError("chunk must be >= 1")
        if self.paths * self.n_steps > _COST_CAP:
            raise ResourceLimitError(
                f"paths*steps = {self.paths * self.n_steps:.3g} exceeds the "
                f"cost cap {_COST_CAP:.3g}"
            )

    @property
    def n_steps(self) -> int:
        n = int(math.floor(self.t / self.step + 1e-9))
        return n if abs(n * self.step - self.t) < 1e-9 * max(self.t, 1.0) else n + 1

    def chunks(self) -> list[tuple[int, int]]:
        """(index, size) pairs covering all paths in order."""
        out = []
        done = 0
        idx = 0
        while done < self.paths:
            size = min(self.chunk, self.paths - done)
            out.append((idx, size))
            done += size
            idx += 1
        return out


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int


@dataclass(frozen=True)
class WrapBmReport:
    lhs: McEstimate
    rhs: McEstimate
    z: float


def _rng(seed: int, tag: int, chunk_index: int) -> np.random.Generator:
    if chunk_index >= 2**32:
        raise ResourceLimitError("chunk index exceeds 2^32")
    key = np.array([seed, (tag << 32) + chunk_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _thread_count(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("WRAPKIT_THREADS", "1"))
    return max(1, threads)


def _map_chunks(cfg: SdeConfig, worker, threads: int | None):
    """Run worker(index, size) over all chunks; results in chunk order."""
    chunks = cfg.chunks()
    nthreads = _thread_count(threads)
    if nthreads == 1 or len(chunks) == 1:
        return [worker(i, c) for i, c in chunks]
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        futures = [pool.submit(worker, i, c) for i, c in chunks]
        return [f.result() for f in futures]


def _reduce_moments(parts, seed: int) -> McEstimate:
    """Combine per-chunk (sum, sumsq, n) in fixed order."""
    total = 0.0
    total_sq = 0.0
    n = 0
    for s, sq, c in parts:
        total += s
        total_sq += sq
        n += c
    mean = total / n
    if n > 1:
        var = max((total_sq - n * mean * mean) / (n - 1), 0.0)
    else:
        var = 0.0
    return McEstimate(mean=mean, stderr=math.sqrt(var / n), n=n, seed=seed)


# ---------------------------------------------------------------------------
# matrix realizations, one engine per factor kind
# ---------------------------------------------------------------------------

def _factor_kinds(g: GroupSpec) -> list[tuple[str, int]]:
    """(kind, algebra_dim) per simulated factor."""
    out = []
    for name in g.factor_names:
        if name == "su2":
            out.append(("su2", 3))
        elif name == "so3":
            out.append(("so3", 3))
        elif name == "su3":
            out.append(("su3", 8))
        elif name.startswith("torus"):
            out.append(("torus", int(name[5:])))
        else:
            raise DomainError(f"no matrix realization for factor {name}")
    return out


@lru_cache(maxsize=1)
def _gell_mann() -> np.ndarray:
    """The eight standard 3x3 Hermitian generators, tr(L_a L_b) = 2 delta."""
    L = np.zeros((8, 3, 3), dtype=complex)
    L[0, 0, 1] = L[0, 1, 0] = 1
    L[1, 0, 1] = -1j
    L[1, 1, 0] = 1j
    L[2, 0, 0] = 1
    L[2, 1, 1] = -1
    L[3, 0, 2] = L[3, 2, 0] = 1
    L[4, 0, 2] = -1j
    L[4, 2, 0] = 1j
    L[5, 1, 2] = L[5, 2, 1] = 1
    L[6, 1, 2] = -1j
    L[6, 2, 1] = 1j
    L[7] = np.diag([1, 1, -2]) / math.sqrt(3)
    return L


def _sinc(s: np.ndarray) -> np.ndarray:
    small = s < 1e-6
    safe = np.where(small, 1.0, s)
    return np.where(small, 1.0 - s * s / 6.0, np.sin(safe) / safe)


class _Su2State:
    """SU(2) elements as (a, b) with matrix [[a, b], [-conj b, conj a]]."""

    def __init__(self, count: int):
        self.a = np.ones(count, dtype=complex)
        self.b = np.zeros(count, dtype=complex)

    def step(self, z: np.ndarray, sqh: float) -> None:
        c = 0.5 * sqh * z
        s = np.linalg.norm(c, axis=1)
        q = c * _sinc(s)[:, None]
        ua = np.cos(s) - 1j * q[:, 2]
        ub = -q[:, 1] - 1j * q[:, 0]
        a, b = self.a, self.b
        self.a = a * ua - b * np.conj(ub)
        self.b = a * ub + b * np.conj(ua)

    def drift(self) -> float:
        r = np.abs(self.a) ** 2 + np.abs(self.b) ** 2
        return float(np.max(np.abs(np.sqrt(r) - 1.0)))

    def renormalize(self) -> None:
        r = np.sqrt(np.abs(self.a) ** 2 + np.abs(self.b) ** 2)
        self.a = self.a / r
        self.b = self.b / r

    def alcove_coords(self) -> np.ndarray:
        return 2.0 * np.arccos(np.clip(self.a.real, -1.0, 1.0))[:, None]

    def matrices(self) -> np.ndarray:
        m = np.empty((len(self.a), 2, 2), dtype=complex)
        m[:, 0, 0] = self.a
        m[:, 0, 1] = self.b
        m[:, 1, 0] = -np.conj(self.b)
        m[:, 1, 1] = np.conj(self.a)
        return m


class _So3State:
    def __init__(self, count: int):
        self.m = np.broadcast_to(np.eye(3), (count, 3, 3)).copy()

    def step(self, z: np.ndarray, sqh: float) -> None:
        w = sqh * z
        phi = np.linalg.norm(w, axis=1)
        K = np.zeros((len(w), 3, 3))
        K[:, 0, 1] = -w[:, 2]
        K[:, 0, 2] = w[:, 1]
        K[:, 1, 0] = w[:, 2]
        K[:, 1, 2] = -w[:, 0]
        K[:, 2, 0] = -w[:, 1]
        K[:, 2, 1] = w[:, 0]
        s1 = _sinc(phi)[:, None, None]
        c2 = (0.5 * _sinc(phi / 2) ** 2)[:, None, None]
        rot = np.eye(3)[None] + s1 * K + c2 * (K @ K)
        self.m = self.m @ rot

    def drift(self) -> float:
        gram = self.m @ np.transpose(self.m, (0, 2, 1))
        return float(np.max(np.abs(gram - np.eye(3)[None])))

    def renormalize(self) -> None:
        u, _, vt = np.linalg.svd(self.m)
        self.m = u @ vt

    def alcove_coords(self) -> np.ndarray:
        tr = np.einsum("cii->c", self.m).real
        return np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0))[:, None]

    def matrices(self) -> np.ndarray:
        return self.m


class _Su3State:
    def __init__(self, count: int):
        self.m = np.broadcast_to(np.eye(3, dtype=complex), (count, 3, 3)).copy()

    def step(self, z: np.ndarray, sqh: float) -> None:
        ham = np.einsum("ca,aij->cij", z, _gell_mann()) * (0.5 * sqh)
        w, v = np.linalg.eigh(ham)
        phase = np.exp(-1j * w)
        rot = np.einsum("cik,ck,cjk->cij", v, phase, np.conj(v))
        self.m = self.m @ rot

    def drift(self) -> float:
        gram = self.m @ np.conj(np.transpose(self.m, (0, 2, 1)))
        return float(np.max(np.abs(gram - np.eye(3)[None])))

    def renormalize(self) -> None:
        u, _, vt = np.linalg.svd(self.m)
        self.m = u @ vt

    def alcove_coords(self) -> np.ndarray:
        return _su3_fold(np.linalg.eigvals(self.m))

    def matrices(self) -> np.ndarray:
        return self.m


class _TorusState:
    def __init__(self, count: int, dim: int):
        self.x = np.zeros((count, dim))

    def step(self, z: np.ndarray, sqh: float) -> None:
        self.x = self.x + sqh * z

    def drift(self) -> float:
        return 0.0

    def renormalize(self) -> None:
        pass

    def alcove_coords(self) -> np.ndarray:
        folded = self.x - TWO_PI * np.round(self.x / TWO_PI)
        return folded

    def matrices(self) -> np.ndarray:
        n = self.x.shape[1]
        m = np.zeros((len(self.x), n, n), dtype=complex)
        idx = np.arange(n)
        m[:, idx, idx] = np.exp(1j * self.x)
        return m


_ENGINES = {"su2": _Su2State, "so3": _So3State, "su3": _Su3State}


def _new_state(kind: str, dim: int, count: int):
    if kind == "torus":
        return _TorusState(count, dim)
    return _ENGINES[kind](count)


def _su3_ambient_sorted(a: np.ndarray) -> np.ndarray:
    """Descending sort of sum-zero triples (positive chamber order)."""
    return -np.sort(-a, axis=1)


def _su3_fold(eigvals: np.ndarray) -> np.ndarray:
    """Alcove representative from SU(3) eigenvalues.

    Phases are taken in (-pi, pi], their 2*pi*k total defect is absorbed
    into single entries, then the affine reduction a_1 - a_3 <= 2*pi is
    applied (each pass strictly decreases sum a^2, so it terminates).
    Ambient convention: exp(H) = diag(e^{i a_j}) for H with coordinates a."""
    a = np.angle(eigvals)
    k = np.rint(a.sum(axis=1) / TWO_PI).astype(int)
    for row in np.flatnonzero(k == 1):
        a[row, np.argmax(a[row])] -= TWO_PI
    for row in np.flatnonzero(k == -1):
        a[row, np.argmin(a[row])] += TWO_PI
    a = _su3_ambient_sorted(a)
    for _ in range(8):
        over = a[:, 0] - a[:, 2] > TWO_PI + 1e-12
        if not over.any():
            break
        a[over, 0] -= TWO_PI
        a[over, 2] += TWO_PI
        a[over] = _su3_ambient_sorted(a[over])
    else:
        raise InstabilityError("su3 alcove reduction did not terminate")
    g = _SU3_GROUP()
    return a @ g._coord_map.T


@lru_cache(maxsize=1)
def _SU3_GROUP():
    from .groups import make_group

    return make_group("su3")


def _simulate_chunk_coords(cfg: SdeConfig, index: int, count: int) -> np.ndarray:
    """Alcove torus coordinates of the chunk's endpoints, shape (count, rank)."""
    states = _run_chunk_states(cfg, index, count)
    return np.concatenate([st.alcove_coords() for st in states], axis=1)


def _run_chunk_states(cfg: SdeConfig, index: int, count: int):
    rng = _rng(cfg.seed, _TAG_GROUP, index)
    kinds = _factor_kinds(cfg.group)
    states = [_new_state(kind, dim, count) for kind, dim in kinds]
    dims = [dim for _, dim in kinds]
    offsets = np.cumsum([0] + dims)
    n = cfg.n_steps
    h = cfg.step
    last = cfg.t - (n - 1) * h
    for k in range(n):
        sqh = math.sqrt(h if k < n - 1 else last)
        z = rng.standard_normal((count, offsets[-1]))
        for st, lo, hi in zip(states, offsets[:-1], offsets[1:]):
            st.step(z[:, lo:hi], sqh)
        if (k + 1) % _RENORM_EVERY == 0 or k == n - 1:
            for st in states:
                drift = st.drift()
                if drift > _DRIFT_TOL:
                    raise InstabilityError(
                        f"{cfg.group.name}: drift {drift:.2e} off the group "
                        f"manifold exceeds {_DRIFT_TOL:g} before renormalization"
                    )
                st.renormalize()
    return states


# ---------------------------------------------------------------------------
# public sampling operations
# ---------------------------------------------------------------------------

def sample_flat_endpoint(cfg: SdeConfig, dim: int) -> np.ndarray:
    """Exact Gaussian endpoints N(0, t I_dim) of flat Brownian motion, one
    row per path; chunked and seeded like every other estimator."""
    parts = _map_chunks(
        cfg,
        lambda i, c: _rng(cfg.seed, _TAG_FLAT, i).standard_normal((c, dim))
        * math.sqrt(cfg.t),
        threads=None,
    )
    return np.concatenate(parts, axis=0)


def sample_group_endpoint(cfg: SdeConfig, threads: int | None = None) -> np.ndarray:
    """Matrix endpoints of the geodesic Euler scheme at time t, one matrix
    per path (block-diagonal over product factors)."""
    def worker(i, c):
        states = _run_chunk_states(cfg, i, c)
        mats = [st.matrices() for st in states]
        if len(mats) == 1:
            return mats[0]
        size = sum(m.shape[1] for m in mats)
        out = np.zeros((c, size, size), dtype=complex)
        at = 0
        for m in mats:
            k = m.shape[1]
            out[:, at:at + k, at:at + k] = m
            at += k
        return out

    return np.concatenate(_map_chunks(cfg, worker, threads), axis=0)


def conjugacy_coordinate(g: GroupSpec, x: np.ndarray) -> np.ndarray:
    """Torus point in the closed fundamental alcove conjugate to x.

    Deterministic (sorted eigenvalue phases); accepts one matrix or a batch.
    The input must sit on the group to 1e-6.
    """
    x = np.asarray(x)
    single = x.ndim == 2
    if single:
        x = x[None]
    gram = x @ np.conj(np.transpose(x, (0, 2, 1)))
    eye = np.eye(x.shape[1])
    if float(np.max(np.abs(gram - eye[None]))) > 1e-6:
        raise DomainError(f"{g.name}: input is not on the group to 1e-6")
    kinds = _factor_kinds(g)
    blocks = []
    at = 0
    for kind, dim in kinds:
        if kind == "su2":
            sub = x[:, at:at + 2, at:at + 2]
            tr = np.einsum("cii->c", sub).real
            blocks.append(2.0 * np.arccos(np.clip(tr / 2.0, -1.0, 1.0))[:, None])
            at += 2
        elif kind == "so3":
            sub = x[:, at:at + 3, at:at + 3]
            tr = np.einsum("cii->c", sub).real
            blocks.append(np.arccos(np.clip((tr - 1.0) / 2.0, -1.0, 1.0))[:, None])
            at += 3
        elif kind == "su3":
            sub = x[:, at:at + 3, at:at + 3]
            blocks.append(_su3_fold(np.linalg.eigvals(sub)))
            at += 3
        else:  # torus block: diagonal unitary
            sub = x[:, at:at + dim, at:at + dim]
            idx = np.arange(dim)
            phases = np.angle(sub[:, idx, idx])
            blocks.append(phases)
            at += dim
    out = np.concatenate(blocks, axis=1)
    return out[0] if single else out


def feynman_kac_weight(g: GroupSpec, t: float) -> float:
    """e^{||rho||^2 t / 2}: the constant-potential weight converting plain
    Brownian expectations into shifted-kernel expectations."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    return math.exp(g.rho_norm_sq * t / 2)


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

def _central_values(f, coords: np.ndarray) -> np.ndarray:
    vals = f.evaluate(coords) if isinstance(f, CentralFunction) else f(coords)
    return np.asarray(vals, dtype=float)


class RealCharacter:
    """Re chi_lambda as a plain callable on torus-coordinate batches.

    Characters can be complex on the torus (tori always, su3 for weights
    that are not self-dual), but Re chi has the same expectation under any
    real central law: E[Re chi] = Re E[chi] and the heat-kernel targets are
    real.  This is the canonical bounded test function for the Monte Carlo
    checks; |Re chi| <= d_lambda everywhere.
    """

    def __init__(self, g: GroupSpec, coords):
        from .groups import CharacterTable, weight

        self.group = g
        self.weight = weight(g, coords)
        self._table = CharacterTable(g, (self.weight,))

    def __call__(self, H) -> np.ndarray:
        return np.real(self._table.values(H)[0])


def real_character(g: GroupSpec, coords) -> RealCharacter:
    """Canonical real test function: the real part of the character with
    the given dominant-weight coordinates."""
    return RealCharacter(g, coords)


def mc_expect_central(f, cfg: SdeConfig, threads: int | None = None) -> McEstimate:
    """Monte Carlo mean of a central function over plain group endpoints."""
    def worker(i, c):
        coords = _simulate_chunk_coords(cfg, i, c)
        v = _central_values(f, coords)
        return float(v.sum()), float((v * v).sum()), len(v)

    return _reduce_moments(_map_chunks(cfg, worker, threads), cfg.seed)


def _algebra_projection(g: GroupSpec, z: np.ndarray) -> np.ndarray:
    """Torus coordinates of the Ad-invariant projection of algebra points.

    No alcove folding happens here: the projection preserves the norm and
    the root angles, so j and any central function take the same values at
    the projected point as at z itself.  Rank-one factors project to the
    coordinate norm; su3 diagonalizes; torus factors pass through.
    """
    kinds = _factor_kinds(g)
    blocks = []
    at = 0
    for kind, dim in kinds:
        sub = z[:, at:at + dim]
        if kind in ("su2", "so3"):
            blocks.append(np.linalg.norm(sub, axis=1)[:, None])
        elif kind == "su3":
            # Z = sum z_a X_a with X_a = -i lambda_a / 2 is conjugate to
            # diag(i a) for a = minus the (ascending) eigenvalues of the
            # Hermitian part, which lands a in descending chamber order.
            ham = np.einsum("ca,aij->cij", sub, _gell_mann()) * 0.5
            a = -np.linalg.eigvalsh(ham)
            blocks.append(a @ _SU3_GROUP()._coord_map.T)
        else:
            blocks.append(sub)
        at += dim
    return np.concatenate(blocks, axis=1)


def wrap_bm_check(
    g: GroupSpec, f, cfg: SdeConfig, threads: int | None = None
) -> WrapBmReport:
    """Monte Carlo two-sided check of the transport of Brownian motion.

    lhs: mean of j(zeta_t) f(exp zeta_t) over exact flat Gaussian endpoints,
    evaluated through the Ad-invariant torus projection.  rhs: mean of f
    over simulated plain group endpoints, divided by feynman_kac_weight(t)
    to convert to the shifted semigroup.  Both estimate
    sum_lambda c_lambda d_lambda e^{-||lambda+rho||^2 t/2}; z is the gap in
    combined standard errors.
    """
    from .groups import j_compact

    dim = g.dim

    def flat_worker(i, c):
        z = _rng(cfg.seed, _TAG_FLAT, i).standard_normal((c, dim)) * math.sqrt(cfg.t)
        coords = _algebra_projection(g, z)
        v = j_compact(g, coords) * _central_values(f, coords)
        return float(v.sum()), float((v * v).sum()), len(v)

    lhs = _reduce_moments(_map_chunks(cfg, flat_worker, threads), cfg.seed)

    plain = mc_expect_central(f, cfg, threads)
    w = feynman_kac_weight(g, cfg.t)
    rhs = McEstimate(
        mean=plain.mean / w, stderr=plain.stderr / w, n=plain.n, seed=plain.seed
    )
    denom = math.sqrt(lhs.stderr**2 + rhs.stderr**2)
    z_score = abs(lhs.mean - rhs.mean) / denom if denom > 0 else math.inf
    return WrapBmReport(lhs=lhs, rhs=rhs, z=z_score)


# ---------------------------------------------------------------------------
# density comparison and weak-order diagnostics
# ---------------------------------------------------------------------------

def _alcove_interval(g: GroupSpec) -> tuple[float, float]:
    if g.name == "su2":
        return 0.0, TWO_PI
    if g.name == "so3":
        return 0.0, math.pi
    if g.name == "torus1":
        return -math.pi, math.pi
    raise DomainError(
        f"empirical density binning needs a rank-one group, not {g.name}"
    )


def empirical_density_table(
    g: GroupSpec, cfg: SdeConfig, bins: int, threads: int | None = None
):
    """Bin alcove-projected endpoints against the plain-kernel prediction.

    Returns ``(score, rows)``; rows hold per-bin (lo, hi, expected count,
    observed count, relative deviation, threshold 4/sqrt(expected)).  The
    score is the max over counted bins of deviation/threshold, so score < 1
    means every bin passed.  Bins expecting < 100 endpoints are skipped; if
    every bin is skipped a ResolutionError asks for more paths or fewer
    bins.
    """
    if bins < 1:
        raise DomainError("bins must be >= 1")
    if cfg.t < 0.25:
        raise DomainError(
            "density binning needs t >= 0.25; shorter horizons concentrate "
            "too sharply for histogram comparison"
        )
    lo, hi = _alcove_interval(g)
    edges = np.linspace(lo, hi, bins + 1)

    nodes, gl_w = np.polynomial.legendre.leggauss(16)
    q = heat_coefficients(g, cfg.t, shifted=False, tol=1e-10)
    probs = np.empty(bins)
    for b in range(bins):
        mid = 0.5 * (edges[b] + edges[b + 1])
        half = 0.5 * (edges[b + 1] - edges[b])
        pts = (mid + half * nodes)[:, None]
        dens = q.evaluate(pts) * weyl_density(g, pts)
        probs[b] = half * float(gl_w @ dens) / g.cell_volume
    probs = probs / probs.sum()

    def worker(i, c):
        coords = _simulate_chunk_coords(cfg, i, c)[:, 0]
        counts, _ = np.histogram(coords, bins=edges)
        return counts

    counts = sum(_map_chunks(cfg, worker, threads))
    expected = cfg.paths * probs
    rows = []
    score = 0.0
    any_counted = False
    for b in range(bins):
        if expected[b] < 100.0:
            rows.append((edges[b], edges[b + 1], expected[b], int(counts[b]),
                         math.nan, math.nan))
            continue
        any_counted = True
        dev = abs(counts[b] - expected[b]) / expected[b]
        thr = 4.0 / math.sqrt(expected[b])
        rows.append((edges[b], edges[b + 1], expected[b], int(counts[b]), dev, thr))
        score = max(score, float(dev) / thr)
    if not any_counted:
        raise ResolutionError(
            f"every one of the {bins} bins expects fewer than 100 endpoints; "
            f"increase paths or reduce bins"
        )
    return score, rows


def empirical_density_check(
    g: GroupSpec, cfg: SdeConfig, bins: int, threads: int | None = None
) -> float:
    """Max over counted bins of relative deviation over its pass threshold;
    values below 1 mean the histogram matches the predicted density."""
    score, _ = empirical_density_table(g, cfg, bins, threads)
    return score


def weak_order_ratio(
    g: GroupSpec,
    f,
    t: float,
    h: float,
    paths: int,
    seed: int,
    chunk: int = 20000,
    threads: int | None = None,
):
    """Coupled estimate of the weak-error decay of the geodesic Euler scheme.

    Simulates each path three times from shared fine increments, with steps
    h, h/2 and h/4, and returns (D1, D2, ratio, stderr1, stderr2) where
    D1 = E[f_h - f_{h/2}] and D2 = E[f_{h/2} - f_{h/4}].  First-order weak
    convergence makes the ratio approach 2; the shared increments cancel the
    O(1) Monte Carlo noise that would otherwise swamp the bias difference.
    """
    n_h = int(round(t / h))
    if abs(n_h * h - t) > 1e-9:
        raise DomainError("t/h must be an integer for the coupled comparison")
    cfg = SdeConfig(group=g, t=t, step=h, paths=paths, seed=seed, chunk=chunk)

    kinds = _factor_kinds(g)
    dims = [d for _, d in kinds]
    offsets = np.cumsum([0] + dims)

    def worker(i, c):
        rng = _rng(seed, _TAG_COUPLED, i)
        trio = [
            [_new_state(kind, dim, c) for kind, dim in kinds] for _ in range(3)
        ]
        sq = [math.sqrt(h), math.sqrt(h / 2), math.sqrt(h / 4)]
        for _ in range(n_h):
            fine = rng.standard_normal((4, c, offsets[-1]))
            levels = [
                [fine.sum(axis=0) / 2.0],
                [(fine[0] + fine[1]) / math.sqrt(2), (fine[2] + fine[3]) / math.sqrt(2)],
                [fine[0], fine[1], fine[2], fine[3]],
            ]
            for lvl in range(3):
                for z in levels[lvl]:
                    for st, a, b in zip(trio[lvl], offsets[:-1], offsets[1:]):
                        st.step(z[:, a:b], sq[lvl])
        vals = []
        for lvl in range(3):
            for st in trio[lvl]:
                st.renormalize()
            coords = np.concatenate(
                [st.alcove_coords() for st in trio[lvl]], axis=1
            )
            vals.append(_central_values(f, coords))
        d1 = vals[0] - vals[1]
        d2 = vals[1] - vals[2]
        return (
            float(d1.sum()), float((d1 * d1).sum()),
            float(d2.sum()), float((d2 * d2).sum()), c,
        )

    parts = _map_chunks(cfg, worker, threads)
    s1 = sum(p[0] for p in parts)
    q1 = sum(p[1] for p in parts)
    s2 = sum(p[2] for p in parts)
    q2 = sum(p[3] for p in parts)
    n = sum(p[4] for p in parts)
    m1, m2 = s1 / n, s2 / n
    se1 = math.sqrt(max(q1 / n - m1 * m1, 0.0) / n)
    se2 = math.sqrt(max(q2 / n - m2 * m2, 0.0) / n)
    ratio = m1 / m2 if m2 != 0 else math.inf
    return m1, m2, ratio, se1, se2
