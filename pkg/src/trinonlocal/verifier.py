"""Orthogonality-preserving constraint systems and their null spaces.

A measurement element ``E`` on the joint party of a cut is Hermitian, so it
is fixed by ``n**2`` real numbers (``n`` the joint dimension):

* one per diagonal entry ``m[p,p]``;
* two per upper entry, ``m[p,q] = u + v*w`` for ``p < q``; the lower entry is
  then ``m[q,p] = u + v*w**2 = (u - v) - v*w``.

Every pair of distinct states gives ``<x| I (x) E |y> = 0``.  Expanding in
the unknowns yields ``sum_k z_k t_k = 0`` with ``z_k`` in Q(w) and ``t_k``
real; since {1, w} is a basis of C over R this is the same as the two
rational equations ``sum u(z_k) t_k = 0`` and ``sum v(z_k) t_k = 0``.  The
rank of a rational matrix does not change under field extension, so the
rational kernel dimension equals the real dimension of the space of
Hermitian ``E`` satisfying all constraints.  The identity always lies in
it; nullity 1 means it is the only direction, i.e. only trivial
orthogonality-preserving elements exist.  If the nullity exceeds 1 there is
a Hermitian ``H`` not proportional to the identity in the kernel, and
``I + eps*H`` is positive for small ``eps`` and preserves orthogonality.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bipartition import ALL_CUTS, Bipartition, Col, cells, matched_row_pairs
from .field import ZERO, CycNum
from .linalg import IntEchelon, ModpEchelon, bareiss_rank, clear_denominators, to_dense
from .states import Dims, Ket, StateSet, require_orthogonal

DEFAULT_PRIMES = (2147483647, 2147483629, 2147483587)
PRIMES_ENV = "TRINONLOCAL_PRIMES"

Position = tuple[Col, Col]


def default_primes() -> tuple[int, ...]:
    env = os.environ.get(PRIMES_ENV)
    if env:
        return tuple(int(p) for p in env.replace(" ", "").split(",") if p)
    return DEFAULT_PRIMES


@dataclass(frozen=True)
class UnknownIndex:
    kind: str  # "diagonal" | "upper-real" | "upper-omega"
    position: Position

    def __str__(self):
        (a, b), (c, d) = self.position
        tag = {"diagonal": "", "upper-real": ".u", "upper-omega": ".v"}[self.kind]
        return f"m[{a}{b},{c}{d}]{tag}"


def constraint_row(x: Ket, y: Ket, b: Bipartition) -> dict[Position, CycNum]:
    """Coefficients of the entries ``m[p,q]`` in ``<x| I (x) E |y>``."""
    out: dict[Position, CycNum] = {}
    for cx, cy in matched_row_pairs(x, y, b):
        key = (cx.col, cy.col)
        out[key] = out.get(key, ZERO) + cx.amp.conj() * cy.amp
    return {k: v for k, v in sorted(out.items()) if v}


class UnknownLayout:
    """Column numbering of the ``n**2`` real unknowns for one cut."""

    def __init__(self, dims: Dims, b: Bipartition):
        self.columns = b.columns(dims)
        self.n = len(self.columns)
        self.flat = {c: i for i, c in enumerate(self.columns)}
        n = self.n
        self.unknowns: list[UnknownIndex] = []
        self._upper: dict[tuple[int, int], int] = {}
        for p in range(n):
            for q in range(p + 1, n):
                self._upper[(p, q)] = len(self.unknowns)
                self.unknowns.append(UnknownIndex("upper-real", (self.columns[p], self.columns[q])))
                self.unknowns.append(UnknownIndex("upper-omega", (self.columns[p], self.columns[q])))
        self.diag_offset = len(self.unknowns)
        for p in range(n):
            self.unknowns.append(UnknownIndex("diagonal", (self.columns[p], self.columns[p])))

    @property
    def size(self) -> int:
        return len(self.unknowns)

    def diag(self, p: int) -> int:
        return self.diag_offset + p

    def expand(self, coeffs: dict[Position, CycNum]) -> dict[int, CycNum]:
        """Substitute the Hermitian parameterization into a coefficient map."""
        z: dict[int, CycNum] = {}

        def put(k, c):
            z[k] = z.get(k, ZERO) + c

        for (cp, cq), c in coeffs.items():
            p, q = self.flat[cp], self.flat[cq]
            if p == q:
                put(self.diag(p), c)
            elif p < q:
                k = self._upper[(p, q)]
                put(k, c)
                put(k + 1, c * CycNum(0, 1))
            else:
                k = self._upper[(q, p)]
                put(k, c)
                put(k + 1, c * CycNum(-1, -1))
        return {k: v for k, v in z.items() if v}

    def identity_vector(self) -> list[int]:
        return [0] * self.diag_offset + [1] * self.n

    def hermitian_from_vector(self, vec: Sequence) -> np.ndarray:
        """Complex matrix of ``E`` from a real unknown vector."""
        w = complex(CycNum(0, 1))
        E = np.zeros((self.n, self.n), dtype=complex)
        for p in range(self.n):
            E[p, p] = float(vec[self.diag(p)])
        for (p, q), k in self._upper.items():
            val = float(vec[k]) + float(vec[k + 1]) * w
            E[p, q] = val
            E[q, p] = np.conj(val)
        return E


@dataclass
class ConstraintSystem:
    bipartition: Bipartition
    layout: UnknownLayout
    rows: list[dict[int, int]]
    row_labels: list[tuple[str, str, str]]  # (bra label, ket label, "1"|"w")
    state_set: StateSet = field(repr=False)

    @property
    def unknowns(self) -> list[UnknownIndex]:
        return self.layout.unknowns

    @property
    def ncols(self) -> int:
        return self.layout.size

    def dense(self) -> list[list[int]]:
        return to_dense(self.rows, self.ncols)

    def identity_in_kernel(self) -> bool:
        d0 = self.layout.diag_offset
        return all(sum(x for c, x in r.items() if c >= d0) == 0 for r in self.rows)


def build_system(s: StateSet, b: Bipartition, orientations: str = "single") -> ConstraintSystem:
    """Integer constraint matrix for cut ``b``.

    ``orientations="single"`` takes one ordered pair ``(x, y)`` per unordered
    pair (earlier state as the bra); ``"both"`` also adds the conjugate rows
    from ``(y, x)``, which never change the rank.
    """
    if orientations not in ("single", "both"):
        raise ValueError("orientations must be 'single' or 'both'")
    require_orthogonal(s)
    layout = UnknownLayout(s.dims, b)
    rows, labels = [], []
    pairs = list(itertools.combinations(range(len(s.states)), 2))
    if orientations == "both":
        pairs = pairs + [(j, i) for i, j in pairs]
    for i, j in pairs:
        (lx, x), (ly, y) = s.states[i], s.states[j]
        z = layout.expand(constraint_row(x, y, b))
        rows.append(clear_denominators({k: v.u for k, v in z.items()}))
        rows.append(clear_denominators({k: v.v for k, v in z.items()}))
        labels += [(lx, ly, "1"), (lx, ly, "w")]
    return ConstraintSystem(b, layout, rows, labels, s)


@dataclass
class NullityReport:
    bipartition: str
    mode: str
    nullity: int
    identity_in_kernel: bool
    verdict: str
    primes_used: list | None = None
    per_prime: dict | None = None
    elapsed_ms: float = 0.0
    kernel: list | None = None
    method: str | None = None

    def to_json(self, timings: bool = True) -> dict:
        out = {
            "bipartition": self.bipartition,
            "mode": self.mode,
            "nullity": self.nullity,
            "identity_in_kernel": self.identity_in_kernel,
            "verdict": self.verdict,
        }
        if self.method:
            out["method"] = self.method
        if self.primes_used is not None:
            out["primes_used"] = list(self.primes_used)
            out["per_prime"] = {str(p): n for p, n in self.per_prime.items()}
        if self.kernel is not None:
            out["kernel"] = self.kernel
        if timings:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out


def _exact_verdict(nullity: int) -> str:
    return "trivial" if nullity == 1 else "nontrivial"


def nullity_exact(cs: ConstraintSystem, method: str = "sparse", emit_kernel: bool = False) -> NullityReport:
    """Exact kernel dimension over Q.

    ``method="sparse"`` runs the incremental fraction-free echelon sweep;
    ``method="bareiss"`` runs dense Bareiss (small systems only).
    """
    t0 = time.perf_counter()
    kernel = None
    if method == "sparse":
        ech = IntEchelon(cs.ncols)
        for r in cs.rows:
            ech.add(r)
        nullity = ech.nullity
        if emit_kernel:
            kernel = [_kernel_entry(cs, v) for v in ech.kernel_basis()]
    elif method == "bareiss":
        if emit_kernel:
            raise ValueError("kernel export needs method='sparse'")
        nullity = cs.ncols - bareiss_rank(cs.dense())
    else:
        raise ValueError(f"unknown exact method {method!r}")
    return NullityReport(cs.bipartition.tag, "exact", nullity, cs.identity_in_kernel(),
                         _exact_verdict(nullity), elapsed_ms=1e3 * (time.perf_counter() - t0),
                         kernel=kernel, method=method)


def _kernel_entry(cs: ConstraintSystem, vec: list[Fraction]) -> dict:
    return {str(u): str(x) for u, x in zip(cs.unknowns, vec) if x}


def nullity_modp(cs: ConstraintSystem, primes: Sequence[int] | None = None) -> NullityReport:
    """Kernel dimension mod each prime; a certificate, never a refutation.

    Reducing mod p can only lower the rank, so each modular nullity is an
    upper bound on the exact nullity (itself >= 1 because the identity is a
    solution).  A modular nullity of 1 therefore proves exact nullity 1.
    """
    primes = list(default_primes() if primes is None else primes)
    if not primes:
        raise ValueError("at least one prime required")
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    for p in primes:
        if p <= 3:
            raise ValueError(f"prime {p} rejected: primes must exceed 3")
    t0 = time.perf_counter()
    per = {}
    for p in primes:
        ech = ModpEchelon(cs.ncols, p)
        for r in cs.rows:
            ech.add(r)
        per[p] = ech.nullity
    best = min(per.values())
    verdict = "trivial" if best == 1 else "inconclusive"
    return NullityReport(cs.bipartition.tag, "modp", best, cs.identity_in_kernel(), verdict,
                         primes_used=primes, per_prime=per,
                         elapsed_ms=1e3 * (time.perf_counter() - t0))


# floating-point cross-check -------------------------------------------

def float_system(s: StateSet, b: Bipartition) -> np.ndarray:
    """Real matrix built from complex amplitudes, independent of the integer rows.

    Unknown order matches :class:`UnknownLayout`; each unordered state pair
    contributes its real and imaginary parts.
    """
    layout = UnknownLayout(s.dims, b)
    n = layout.n
    flat = layout.flat
    w = np.exp(2j * np.pi / 3)
    cell_lists = [[(c.row, flat[c.col], complex(c.amp)) for c in cells(k, b)] for _, k in s.states]
    upper_index = {}
    for k, u in enumerate(layout.unknowns):
        if u.kind == "upper-real":
            upper_index[(flat[u.position[0]], flat[u.position[1]])] = k
    rows = []
    for i, j in itertools.combinations(range(len(s.states)), 2):
        z = np.zeros(layout.size, dtype=complex)
        for rx, px, ax in cell_lists[i]:
            for ry, py, ay in cell_lists[j]:
                if rx != ry:
                    continue
                c = np.conj(ax) * ay
                if px == py:
                    z[layout.diag(px)] += c
                elif px < py:
                    k = upper_index[(px, py)]
                    z[k] += c
                    z[k + 1] += c * w
                else:
                    k = upper_index[(py, px)]
                    z[k] += c
                    z[k + 1] += c * np.conj(w)
        rows.append(z.real)
        rows.append(z.imag)
    if not rows:
        return np.zeros((0, layout.size))
    return np.array(rows)


def float_nullity(M: np.ndarray, tol: float = 1e-8) -> int:
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return ncols
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return ncols
    return ncols - int(np.sum(sv > tol * sv[0]))


def nullity_float(cs: ConstraintSystem, tol: float = 1e-8) -> NullityReport:
    """Advisory SVD nullity; ``tol`` is relative to the largest singular value."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    t0 = time.perf_counter()
    M = float_system(cs.state_set, cs.bipartition)
    nullity = float_nullity(M, tol)
    ident = np.array(cs.layout.identity_vector(), dtype=float)
    resid = float(np.max(np.abs(M @ ident))) if M.size else 0.0
    return NullityReport(cs.bipartition.tag, "float", nullity, resid < 1e-9,
                         _exact_verdict(nullity), elapsed_ms=1e3 * (time.perf_counter() - t0))


# top level ------------------------------------------------------------

@dataclass
class StrongestReport:
    reports: dict  # tag -> NullityReport
    overall: str  # "strongest" | "not_strongest" | "inconclusive"

    @property
    def all_trivial(self) -> bool:
        return self.overall == "strongest"


def _run_mode(s: StateSet, b: Bipartition, mode: str, primes, tol, method, emit_kernel) -> NullityReport:
    t0 = time.perf_counter()
    cs = build_system(s, b)
    if mode == "exact":
        rep = nullity_exact(cs, method=method, emit_kernel=emit_kernel)
    elif mode == "modp":
        rep = nullity_modp(cs, primes)
    elif mode == "float":
        rep = nullity_float(cs, tol)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rep.elapsed_ms = 1e3 * (time.perf_counter() - t0)
    return rep


def verify_strongest(s: StateSet, mode: str = "exact", cuts: Sequence[Bipartition] | None = None,
                     primes=None, tol: float = 1e-8, method: str = "sparse",
                     emit_kernel: bool = False, workers: int = 1) -> StrongestReport:
    """Run one nullity mode on each requested cut (all three by default)."""
    require_orthogonal(s)
    cuts = list(ALL_CUTS if cuts is None else cuts)
    args = (mode, primes, tol, method, emit_kernel)
    if workers > 1 and len(cuts) > 1:
        with ThreadPoolExecutor(workers) as ex:
            reps = list(ex.map(lambda b: _run_mode(s, b, *args), cuts))
    else:
        reps = [_run_mode(s, b, *args) for b in cuts]
    verdicts = {r.verdict for r in reps}
    if verdicts == {"trivial"}:
        overall = "strongest"
    elif "nontrivial" in verdicts:
        overall = "not_strongest"
    else:
        overall = "inconclusive"
    return StrongestReport({r.bipartition: r for r in reps}, overall)


def lower_bound(d1: int, d2: int, d3: int) -> int:
    """``max_i (d1*d2*d3 / d_i) + 1``."""
    dims = (d1, d2, d3)
    prod = d1 * d2 * d3
    return max(prod // d for d in dims) + 1


def check_meets_bound(s: StateSet) -> bool:
    return len(s) == lower_bound(*s.dims)
