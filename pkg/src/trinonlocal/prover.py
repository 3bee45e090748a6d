"""Rule-based replay of the hand-written triviality deductions.

The engine works on one cut at a time and tracks two kinds of knowledge
about the Hermitian element ``E = (m[p,q])``:

* zero facts for off-diagonal entries, stored per unordered position pair
  since ``E = E^dagger`` makes ``m[p,q] = 0`` and ``m[q,p] = 0`` equivalent;
* equalities among diagonal entries, kept in a union-find.

Rules run in a fixed order: Obs1, Obs2 to a fixpoint, the even-d rule (with
Obs2 rerun after it fires), then Obs3/Obs4 against the stopper.  The result
is a certificate, never a refutation; the verifier decides.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bipartition import Bipartition, Col, matched_row_pairs
from .field import ONE, CycNum
from .linalg import IntEchelon, clear_denominators
from .states import StateSet, require_orthogonal
from .verifier import constraint_row

TRIVIAL_PROVEN = "TRIVIAL_PROVEN"
INCONCLUSIVE = "INCONCLUSIVE"


def fmt_col(c: Col) -> str:
    a, b = c
    return f"{a}{b}" if a < 10 and b < 10 else f"{a}.{b}"


def fmt_label(label: str) -> str:
    return "phi_" + label[3:] if label.startswith("phi") else label


@dataclass(frozen=True)
class Fact:
    kind: str  # "zero" | "equal" | "antihermitian_pair"
    positions: tuple
    rule: str
    pair: tuple[str, str]

    def text(self) -> str:
        if self.kind == "zero":
            p, q = (fmt_col(c) for c in self.positions)
            return f"m[{p},{q}] = m[{q},{p}] = 0"
        if self.kind == "antihermitian_pair":
            p, q = (fmt_col(c) for c in self.positions)
            return f"m[{p},{q}] + m[{q},{p}] = 0"
        return " = ".join(f"m[{fmt_col(c)},{fmt_col(c)}]" for c in self.positions)

    def to_json(self) -> dict:
        return {"kind": self.kind, "positions": [list(c) for c in self.positions],
                "rule": self.rule, "pair": list(self.pair)}


@dataclass
class Step:
    rule: str
    pair: tuple[str, str]
    facts: list[Fact]

    def text(self) -> str:
        a, b = (fmt_label(x) for x in self.pair)
        return f"{self.rule:<5} ({a}, {b})  =>  " + "; ".join(f.text() for f in self.facts)


@dataclass
class DeductionTrace:
    bipartition: str
    steps: list[Step] = field(default_factory=list)
    verdict: str = INCONCLUSIVE
    open_offdiagonal: list = field(default_factory=list)
    diagonal_classes: int = 0

    def facts(self, kind: str | None = None, rule: str | None = None) -> list[Fact]:
        return [f for s in self.steps for f in s.facts
                if (kind is None or f.kind == kind) and (rule is None or f.rule == rule)]

    def zero_positions(self, rule: str | None = None) -> set[frozenset]:
        return {frozenset(f.positions) for f in self.facts("zero", rule)}

    def count(self, rule: str) -> int:
        return sum(1 for s in self.steps if s.rule == rule)

    def text(self) -> str:
        lines = [f"# bipartition {self.bipartition}"]
        lines += [s.text() for s in self.steps]
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "bipartition": self.bipartition,
            "verdict": self.verdict,
            "steps": [{"rule": s.rule, "pair": list(s.pair), "facts": [f.to_json() for f in s.facts]}
                      for s in self.steps],
            "open_offdiagonal": [[list(p), list(q)] for p, q in self.open_offdiagonal],
            "diagonal_classes": self.diagonal_classes,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def classes(self) -> int:
        return len({self.find(x) for x in self.parent})


def find_stopper(s: StateSet) -> int | None:
    if s.stopper is not None:
        return s.stopper
    full = s.dims.total
    hits = [n for n, (_, k) in enumerate(s.states)
            if len(k) == full and all(a == ONE for _, a in k.items())]
    return hits[0] if len(hits) == 1 else None


class Prover:
    """Fact store plus the individual rules for one (set, cut) run."""

    def __init__(self, s: StateSet, b: Bipartition):
        self.s = s
        self.b = b
        self.columns = b.columns(s.dims)
        self.zero: set[frozenset] = set()
        self.anti: set[frozenset] = set()
        self.uf = _UnionFind(self.columns)
        self.stopper = find_stopper(s)
        self.trace = DeductionTrace(b.tag)
        idx = [n for n in range(len(s.states)) if n != self.stopper]
        self.pairs = [(i, j) for a, i in enumerate(idx) for j in idx[a + 1:]]
        self._rows = {}

    # helpers ---------------------------------------------------------
    def _row(self, i: int, j: int) -> dict:
        key = (i, j)
        if key not in self._rows:
            self._rows[key] = constraint_row(self.s.states[i][1], self.s.states[j][1], self.b)
        return self._rows[key]

    def _labels(self, i, j):
        return self.s.states[i][0], self.s.states[j][0]

    def _known_zero(self, p: Col, q: Col) -> bool:
        return p != q and frozenset((p, q)) in self.zero

    def _residual(self, row: dict) -> dict:
        return {pq: c for pq, c in row.items() if not self._known_zero(*pq)}

    def _emit_zero(self, rule, pair, p, q) -> Fact | None:
        key = frozenset((p, q))
        if key in self.zero:
            return None
        self.zero.add(key)
        return Fact("zero", tuple(sorted((p, q))), rule, pair)

    def _record(self, rule, pair, facts):
        facts = [f for f in facts if f is not None]
        if facts:
            self.trace.steps.append(Step(rule, pair, facts))
        return bool(facts)

    @property
    def all_offdiagonal(self) -> list[frozenset]:
        cols = self.columns
        return [frozenset((cols[a], cols[b])) for a in range(len(cols)) for b in range(a + 1, len(cols))]

    def open_offdiagonal(self) -> list[tuple[Col, Col]]:
        return [tuple(sorted(k)) for k in self.all_offdiagonal if k not in self.zero]

    # rules -----------------------------------------------------------
    def apply_obs1(self) -> int:
        fired = 0
        for i, j in self.pairs:
            mp = matched_row_pairs(self.s.states[i][1], self.s.states[j][1], self.b)
            if len(mp) != 1:
                continue
            cx, cy = mp[0]
            if cx.col == cy.col:
                continue
            fired += self._record("Obs1", self._labels(i, j),
                                  [self._emit_zero("Obs1", self._labels(i, j), cx.col, cy.col)])
        return fired

    def apply_obs2(self) -> int:
        """One pass; call :meth:`obs2_fixpoint` to iterate."""
        fired = 0
        for i, j in self.pairs:
            if len(matched_row_pairs(self.s.states[i][1], self.s.states[j][1], self.b)) < 2:
                continue
            res = self._residual(self._row(i, j))
            if len(res) != 1:
                continue
            (p, q), _ = next(iter(res.items()))
            if p == q:
                continue
            fired += self._record("Obs2", self._labels(i, j),
                                  [self._emit_zero("Obs2", self._labels(i, j), p, q)])
        return fired

    def obs2_fixpoint(self) -> int:
        total = 0
        while True:
            n = self.apply_obs2()
            total += n
            if not n:
                return total

    def apply_evend_rule(self) -> int:
        """Resolve one conjugate pair ``m[p,q]``, ``m[q,p]`` left after Obs1/Obs2.

        A state pair whose residual is ``c*(m[p,q] + m[q,p])`` makes
        ``m[p,q]`` purely imaginary, ``i*r``.  A stopper row whose residual
        has only real-coefficient diagonal terms plus ``a*m[p,q] + b*m[q,p]``
        then has imaginary part ``r * Re(a - b)``, forcing ``r = 0`` when
        ``Re(a - b) != 0``.  Every other entry in that stopper row must
        already be zero, which is the only precondition checked.
        """
        if self.stopper is None:
            return 0
        stop_lab, stop_ket = self.s.states[self.stopper]
        for p, q in self.open_offdiagonal():
            anti_pair = None
            for i, j in self.pairs:
                res = self._residual(self._row(i, j))
                if set(res) == {(p, q), (q, p)} and res[(p, q)] == res[(q, p)]:
                    anti_pair = self._labels(i, j)
                    break
            if anti_pair is None:
                continue
            for n, (lab, ket) in enumerate(self.s.states):
                if n == self.stopper:
                    continue
                res = self._residual(constraint_row(ket, stop_ket, self.b))
                off = {pq: c for pq, c in res.items() if pq[0] != pq[1]}
                if not off or not set(off) <= {(p, q), (q, p)}:
                    continue
                if not all(c.is_real() for pq, c in res.items() if pq[0] == pq[1]):
                    continue
                diff = off.get((p, q), CycNum(0)) - off.get((q, p), CycNum(0))
                if diff.real_part() == 0:
                    continue
                facts = []
                key = frozenset((p, q))
                if key not in self.anti:
                    self.anti.add(key)
                    facts.append(Fact("antihermitian_pair", (p, q), "EvenD", anti_pair))
                pair = (lab, stop_lab)
                facts.append(self._emit_zero("EvenD", pair, p, q))
                return self._record("EvenD", pair, facts)
        return 0

    def apply_obs3_obs4(self) -> int:
        if self.open_offdiagonal():
            raise RuntimeError("Obs3/Obs4 need every off-diagonal entry proven zero")
        if self.stopper is None:
            return 0
        stop_lab, stop_ket = self.s.states[self.stopper]
        fired = 0
        for n, (lab, ket) in enumerate(self.s.states):
            if n == self.stopper:
                continue
            diag = {pq[0]: c for pq, c in constraint_row(ket, stop_ket, self.b).items() if pq[0] == pq[1]}
            positions = sorted(diag, key=lambda c: self.columns.index(c))
            if len(positions) < 2 or not _forces_equal([diag[c] for c in positions]):
                continue
            merged = False
            for c in positions[1:]:
                merged |= self.uf.union(positions[0], c)
            if merged:
                rule = "Obs3" if len(ket) == 2 else "Obs4"
                fired += self._record(rule, (stop_lab, lab),
                                      [Fact("equal", tuple(positions), rule, (stop_lab, lab))])
        return fired

    def run(self) -> DeductionTrace:
        self.apply_obs1()
        self.obs2_fixpoint()
        while self.apply_evend_rule():
            self.obs2_fixpoint()
        tr = self.trace
        tr.open_offdiagonal = self.open_offdiagonal()
        if not tr.open_offdiagonal:
            self.apply_obs3_obs4()
        tr.diagonal_classes = self.uf.classes()
        if not tr.open_offdiagonal and tr.diagonal_classes == 1:
            tr.verdict = TRIVIAL_PROVEN
        return tr


def _forces_equal(coeffs: list[CycNum]) -> bool:
    """Does ``sum c_a t_a = 0`` over real ``t`` force all ``t_a`` equal?"""
    k = len(coeffs)
    if sum(coeffs, CycNum(0)) != 0:
        return False
    ech = IntEchelon(k)
    ech.add(clear_denominators({a: c.u for a, c in enumerate(coeffs)}))
    ech.add(clear_denominators({a: c.v for a, c in enumerate(coeffs)}))
    return ech.rank == k - 1


def apply_obs1(s: StateSet, b: Bipartition) -> list[Fact]:
    pr = Prover(s, b)
    pr.apply_obs1()
    return pr.trace.facts()


def prove(s: StateSet, b: Bipartition) -> DeductionTrace:
    require_orthogonal(s)
    return Prover(s, b).run()
