"""Steady states: Newton-Krylov solves, stability, census, continuation.

The steady equation -(I+Laplace)^2 u + lambda u + mu u^2 - u^3 = 0 is solved
by Newton iteration with matrix-free inner solves.  The Jacobian

    J(u) v = (lambda - (1-|kappa|^2)^2) v + 2 mu u v - 3 u^2 v

is self-adjoint, so the inner solver is preconditioned conjugate gradients
with the diagonal preconditioner 1/(|beta_k| + 1); when negative curvature
shows up (indefinite J near folds and saddles) the solve falls back to
MINRES on the same preconditioner.  Stability uses dense symmetric
eigendecomposition for small systems and a preconditioned block iteration
(LOBPCG, ARPACK fallback) otherwise.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft
import scipy.sparse.linalg as spla

from .dynamics import Params, check_params
from .errors import (
    DegenerateState,
    EigsNoConvergence,
    NoConvergence,
    SingularJacobian,
)
from .linear_analysis import eigenfunction, growth_array, growth_flat, principal
from .spectral import (
    BoundaryCondition,
    Domain,
    SpectralField,
    _band_from_padded,
    _embed_indices,
    _lattice,
    _padded_values,
    cube,
    inner,
    random_field,
    square,
)

NEWTON_TOL = 1e-11
POS_TOL = 1e-8
NEUTRAL_TOL = 1e-6
DEDUP_TOL = 1e-6


@dataclass
class SteadyState:
    """A converged steady state with optional stability data."""

    state: SpectralField
    residual: float
    lam: float
    mu: float
    leading_eigs: tuple | None = None
    neutral_eigs: tuple | None = None
    morse_index: int | None = None

    @property
    def norm(self) -> float:
        return self.state.norm()

    def as_dict(self) -> dict:
        out = {
            "lambda": self.lam,
            "mu": self.mu,
            "residual": self.residual,
            "l2_norm": self.norm,
            "morse_index": self.morse_index,
        }
        if self.leading_eigs is not None:
            out["leading_eigs"] = list(self.leading_eigs)
            out["neutral_eigs"] = list(self.neutral_eigs or ())
        return out


def residual(u: SpectralField, p: Params) -> SpectralField:
    """-(I+Laplace)^2 u + lambda u + mu u^2 - u^3 as a spectral field."""
    check_params(u.domain, p)
    data = growth_array(u.domain, p.lam) * u.data - cube(u).data
    if p.mu != 0.0:
        data = data + p.mu * square(u).data
    return SpectralField(u.domain, data)


class _Jacobian:
    """Matrix-free J(u) with the grid of u cached across applies."""

    def __init__(self, u: SpectralField, p: Params):
        self.domain = u.domain
        self.p = p
        self.beta = growth_array(u.domain, p.lam)
        gu = _padded_values(u)
        self.w_odd = -3.0 * gu * gu
        self.w_even = 2.0 * p.mu * gu if p.mu != 0.0 else None

    def apply(self, v: SpectralField) -> SpectralField:
        gv = _padded_values(v)
        data = self.beta * v.data + _band_from_padded(self.w_odd * gv, self.domain, "odd")
        if self.w_even is not None:
            data = data + _band_from_padded(self.w_even * gv, self.domain, "even")
        return SpectralField(self.domain, data)

    def apply_flat(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        return self.apply(SpectralField.from_flat(self.domain, x)).to_flat()

    def as_linear_operator(self) -> spla.LinearOperator:
        n = _lattice(self.domain).nflat
        return spla.LinearOperator((n, n), matvec=self.apply_flat, dtype=float)


def jacobian_apply(u: SpectralField, p: Params, v: SpectralField) -> SpectralField:
    """Directional derivative of the steady residual at u in direction v."""
    return _Jacobian(u, p).apply(v)


def _pcg(apply_a, b, minv, rtol, maxiter):
    """Preconditioned CG; returns (x, converged, hit_negative_curvature)."""
    x = np.zeros_like(b)
    r = b.copy()
    z = minv * r
    pdir = z.copy()
    rz = float(r @ z)
    tol = rtol * float(np.linalg.norm(b))
    for _ in range(maxiter):
        ap = apply_a(pdir)
        pap = float(pdir @ ap)
        if pap <= 1e-14 * float(pdir @ pdir):
            return x, False, True
        alpha = rz / pap
        x = x + alpha * pdir
        r = r - alpha * ap
        if float(np.linalg.norm(r)) <= tol:
            return x, True, False
        z = minv * r
        rz_new = float(r @ z)
        pdir = z + (rz_new / rz) * pdir
        rz = rz_new
    return x, False, False


def _solve_newton_system(jac: _Jacobian, rhs: np.ndarray, rtol: float,
                         maxiter: int = 500) -> np.ndarray:
    minv = 1.0 / (np.abs(growth_flat(jac.domain, jac.p.lam)) + 1.0)
    x, ok, _ = _pcg(jac.apply_flat, rhs, minv, rtol, maxiter)
    if ok:
        return x
    a = jac.as_linear_operator()
    n = a.shape[0]
    m = spla.LinearOperator((n, n), matvec=lambda v: minv * v, dtype=float)
    x, _info = spla.minres(a, rhs, rtol=max(rtol, 1e-12), maxiter=max(maxiter, 2 * n), M=m)
    res = float(np.linalg.norm(jac.apply_flat(x) - rhs))
    if res > 0.5 * float(np.linalg.norm(rhs)):
        raise SingularJacobian("inner solver stagnated (singular Jacobian)")
    return x


def newton(u0: SpectralField, p: Params, *, tol: float = NEWTON_TOL,
           max_iter: int = 50, cg_maxiter: int = 500) -> SteadyState:
    """Newton iteration from u0; raises NoConvergence / SingularJacobian."""
    check_params(u0.domain, p)
    u = u0
    f = residual(u, p)
    nf = f.norm()
    for _ in range(max_iter):
        if nf <= tol:
            return SteadyState(u, nf, p.lam, p.mu)
        if not np.isfinite(nf) or nf > 1e8:
            raise NoConvergence(f"residual diverged ({nf:.3g})")
        jac = _Jacobian(u, p)
        eta = min(0.1, max(1e-4, nf))
        try:
            delta = _solve_newton_system(jac, -f.to_flat(), eta, cg_maxiter)
        except SingularJacobian:
            # iterates collapsing onto the trivial branch hit a genuinely
            # singular Jacobian (double root at the bifurcation point); the
            # limit is the exact steady state u = 0
            if u.norm() < 1e-3:
                return SteadyState(SpectralField.zeros(u.domain), 0.0, p.lam, p.mu)
            raise
        dv = SpectralField.from_flat(u.domain, delta)
        s = 1.0
        for _ in range(11):
            u_try = u + s * dv
            f_try = residual(u_try, p)
            nf_try = f_try.norm()
            if nf_try < nf:
                break
            s *= 0.5
        else:
            if u.norm() < 1e-3:
                return SteadyState(SpectralField.zeros(u.domain), 0.0, p.lam, p.mu)
            raise NoConvergence("line search could not reduce the residual")
        u, f, nf = u_try, f_try, nf_try
    if nf <= tol:
        return SteadyState(u, nf, p.lam, p.mu)
    raise NoConvergence(f"no convergence after {max_iter} Newton steps (|F|={nf:.3g})")


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------

def _leading_eigs_lobpcg(jac: _Jacobian, k: int) -> np.ndarray:
    """Largest algebraic Jacobian eigenvalues, matrix-free.

    Plain Lanczos stalls on the huge spectral spread of (I+Laplace)^2, so
    the block iteration is preconditioned with 1/(|beta|+1) and seeded on
    the least-damped modes; ARPACK is kept as a fallback.
    """
    import warnings

    n = _lattice(jac.domain).nflat
    beta = growth_flat(jac.domain, jac.p.lam)
    idx = np.argsort(-beta)[:k]
    x0 = np.zeros((n, k))
    rng = np.random.default_rng(0)
    for j, i in enumerate(idx):
        x0[i, j] = 1.0
    x0 += 1e-3 * rng.standard_normal(x0.shape)
    minv = 1.0 / (np.abs(beta) + 1.0)
    m_op = spla.LinearOperator(
        (n, n), matvec=lambda v: (minv * v.reshape(-1)).reshape(v.shape), dtype=float)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            evals, _ = spla.lobpcg(jac.as_linear_operator(), x0, M=m_op,
                                   largest=True, tol=1e-7, maxiter=100)
        if np.all(np.isfinite(evals)):
            return np.asarray(evals)
    except (np.linalg.LinAlgError, ValueError):
        pass
    try:
        return spla.eigsh(jac.as_linear_operator(), k=k, which="LA",
                          return_eigenvectors=False, maxiter=400 * k)
    except spla.ArpackNoConvergence as err:
        raise EigsNoConvergence(str(err)) from err


def stability(s: SteadyState, *, n_eigs: int = 10, dense_limit: int = 400) -> SteadyState:
    """Fill leading Jacobian eigenvalues and the Morse index.

    For periodic domains, eigenvalues with |e| < 1e-6 are reported as neutral
    translation modes and excluded from the Morse index.
    """
    p = Params(s.lam, s.mu)
    jac = _Jacobian(s.state, p)
    n = _lattice(s.state.domain).nflat
    periodic = s.state.domain.bc is BoundaryCondition.PERIODIC
    if n <= dense_limit:
        mat = np.empty((n, n))
        e = np.zeros(n)
        for i in range(n):
            e[i] = 1.0
            mat[:, i] = jac.apply_flat(e)
            e[i] = 0.0
        evals = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    else:
        k = min(max(n_eigs, 8), n - 2)
        while True:
            evals = _leading_eigs_lobpcg(jac, k)
            evals = np.sort(evals)
            if evals[0] < -NEUTRAL_TOL or k >= min(64, n - 2):
                break
            k = min(2 * k, n - 2)
    neutral = tuple(float(e) for e in evals if periodic and abs(e) < NEUTRAL_TOL)
    effective = [float(e) for e in evals if not (periodic and abs(e) < NEUTRAL_TOL)]
    morse = sum(1 for e in effective if e > POS_TOL)
    leading = tuple(sorted((float(e) for e in evals), reverse=True)[:n_eigs])
    return replace(s, leading_eigs=leading, neutral_eigs=neutral, morse_index=morse)


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

def default_seed_scale(domain: Domain, p: Params) -> float:
    """Basis-coefficient scale of the expected bifurcated states."""
    summ = principal(domain)
    beta1 = p.lam - summ.lambda_c
    phi = eigenfunction(domain, summ.critical_modes[0])
    t_self = inner(cube(phi), phi)
    if beta1 > 0 and t_self > 0:
        return float(np.sqrt(beta1 / t_self))
    return 0.3


def _translation_max_inner(a: SpectralField, b: SpectralField) -> float:
    """max over grid shifts s of <a, b(. - s)> for periodic fields."""
    d = a.domain
    q = a.data * np.conj(b.data)
    sizes = d.grid_n
    big = np.zeros(sizes, dtype=complex)
    big[np.ix_(*_embed_indices(d.band, sizes))] = q
    corr = sfft.ifftn(big).real * float(np.prod(sizes))
    return d.volume * float(corr.max())


def orbit_distance(a: SpectralField, b: SpectralField, p: Params,
                   mode: str = "symmetry") -> float:
    """L2 distance between a and the orbit of b under the symmetry group.

    mode 'symmetry': sign flip (mu = 0 only) and, for periodic domains,
    discrete grid translations.  mode 'exact': plain distance.
    """
    d0 = (a - b).norm()
    if mode == "exact":
        return d0
    best = d0
    signs = (1.0, -1.0) if p.mu == 0.0 else (1.0,)
    if a.domain.bc is BoundaryCondition.PERIODIC:
        na2, nb2 = a.norm() ** 2, b.norm() ** 2
        for sgn in signs:
            m = _translation_max_inner(a, sgn * b)
            best = min(best, float(np.sqrt(max(0.0, na2 + nb2 - 2.0 * m))))
    elif -1.0 in signs:
        best = min(best, (a + b).norm())
    return best


def _newton_task(task):
    seed, p = task
    try:
        return newton(seed, p)
    except (NoConvergence, SingularJacobian):
        return None


def find_all(domain: Domain, p: Params, n_seeds: int = 100,
             seed_scale: float | None = None, *, rng_seed: int = 0,
             jobs: int = 1, dedup: str = "symmetry",
             with_stability: bool = True) -> list[SteadyState]:
    """Newton from random critical-mode seeds, deduplicated.

    Seeds are random combinations of the critical eigenfunctions plus small
    noise on the slaved modes.  dedup 'symmetry' identifies states equal up
    to a global sign flip (mu = 0) and, for periodic domains, grid
    translations; 'exact' keeps every distinct state.
    """
    check_params(domain, p)
    if seed_scale is None:
        seed_scale = default_seed_scale(domain, p)
    summ = principal(domain)
    rng = np.random.default_rng(rng_seed)
    crit = [eigenfunction(domain, m) for m in summ.critical_modes]
    seeds = []
    for _ in range(n_seeds):
        f = SpectralField.zeros(domain)
        for phi in crit:
            f = f + float(rng.normal(0.0, seed_scale)) * phi
        f = f + random_field(domain, rng, 0.01 * seed_scale, smooth=True)
        seeds.append(f)
    tasks = [(s, p) for s in seeds]
    if jobs > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs) as pool:
            results = pool.map(_newton_task, tasks)
    else:
        results = [_newton_task(t) for t in tasks]
    states = [s for s in results if s is not None]
    states.sort(key=lambda s: (round(s.norm, 9), np.round(s.state.to_flat(), 9).tobytes()))
    kept: list[SteadyState] = []
    for s in states:
        if all(orbit_distance(s.state, k.state, p, dedup) >= DEDUP_TOL for k in kept):
            kept.append(s)
    if with_stability:
        kept = [stability(s) for s in kept]
    return kept


def index_sum(states: list[SteadyState], m: int) -> int:
    """Sum of (-1)^morse over the given states.

    For an attractor bifurcated from a critical eigenvalue of multiplicity m
    the sum equals 2 when m is odd and 0 when m is even.  Raises
    DegenerateState when a non-neutral eigenvalue sits within 1e-8 of zero.
    """
    total = 0
    for s in states:
        if s.leading_eigs is None or s.morse_index is None:
            raise ValueError("run stability() before index_sum()")
        neutral = set(s.neutral_eigs or ())
        for e in s.leading_eigs:
            if e in neutral:
                continue
            if abs(e) < POS_TOL:
                raise DegenerateState(f"eigenvalue {e:.3g} too close to zero")
        total += (-1) ** s.morse_index
    return total


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

@dataclass
class Branch:
    """Natural-parameter continuation record."""

    points: list  # list of (lambda, SteadyState)
    direction: int
    stop_reason: str  # 'reached-end' | 'bifurcation' | 'no-convergence'
    crossing_lambda: float | None = None


def _top_eig(s: SteadyState) -> float:
    eigs = [e for e in s.leading_eigs if e not in set(s.neutral_eigs or ())]
    return eigs[0] if eigs else 0.0


def continue_branch(start: SteadyState, lam_end: float, dlam: float, *,
                    stop_at_crossing: bool = True, n_eigs: int = 6) -> Branch:
    """Trace a branch in lambda with a secant predictor.

    Records a crossing event when the leading Jacobian eigenvalue changes
    sign between consecutive points; with stop_at_crossing the trace stops
    there, otherwise it continues (the event stays recorded).
    """
    p0 = Params(start.lam, start.mu)
    direction = 1 if lam_end >= start.lam else -1
    h = abs(dlam) * direction
    if start.leading_eigs is None:
        start = stability(start, n_eigs=n_eigs)
    points = [(start.lam, start)]
    crossing = None
    stop_reason = "reached-end"
    lam = start.lam
    prev, prev2 = start, None
    while (lam_end - lam) * direction > 1e-12:
        lam = lam + h
        if (lam - lam_end) * direction > 0:
            lam = lam_end
        if prev2 is not None:
            pred = prev.state + 1.0 * (prev.state - prev2.state)
        else:
            pred = prev.state
        try:
            s = newton(pred, Params(lam, start.mu))
        except (NoConvergence, SingularJacobian):
            stop_reason = "bifurcation"
            crossing = crossing if crossing is not None else lam
            break
        s = stability(s, n_eigs=n_eigs)
        e_prev, e_new = _top_eig(prev), _top_eig(s)
        crossed = (e_prev > POS_TOL) != (e_new > POS_TOL) or abs(e_new) <= POS_TOL
        points.append((lam, s))
        prev2, prev = prev, s
        if crossed and crossing is None:
            crossing = lam
            if stop_at_crossing:
                stop_reason = "bifurcation"
                break
    return Branch(points, direction, stop_reason, crossing)
