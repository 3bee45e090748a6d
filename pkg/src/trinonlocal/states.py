"""Tripartite kets, the minimum-size constructions, and entanglement classes.

All kets are unnormalized and sparse: a dict from index triple ``(i, j, k)``
to a nonzero :class:`~trinonlocal.field.CycNum`.  Labels follow the
``phi_jk`` naming where ``jk`` are the B and C indices of the first branch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .field import ONE, ZERO, CycNum
from .linalg import clear_denominators, rank_int

Index = tuple[int, int, int]

CUTS = ("A|BC", "B|CA", "C|AB")


class DimensionError(ValueError):
    """Raised when dimensions fall outside what a construction supports."""


class NonOrthogonalError(ValueError):
    """A set that should be orthogonal has an overlapping pair."""

    def __init__(self, first: str, second: str, overlap: CycNum):
        super().__init__(f"states {first!r} and {second!r} are not orthogonal (overlap {overlap})")
        self.pair = (first, second)
        self.overlap = overlap


@dataclass(frozen=True)
class Dims:
    d1: int
    d2: int
    d3: int

    def __post_init__(self):
        for d in self:
            if not isinstance(d, int) or d < 2:
                raise DimensionError(f"local dimensions must be integers >= 2, got {tuple(self)}")

    def __iter__(self):
        return iter((self.d1, self.d2, self.d3))

    def __getitem__(self, k: int) -> int:
        return (self.d1, self.d2, self.d3)[k]

    @property
    def total(self) -> int:
        return self.d1 * self.d2 * self.d3


class Ket:
    """Immutable sparse tripartite ket."""

    __slots__ = ("dims", "_amps")

    def __init__(self, dims: Dims, amps: Mapping[Index, object]):
        self.dims = dims
        clean = {}
        for idx, a in amps.items():
            idx = tuple(int(x) for x in idx)
            if len(idx) != 3 or not all(0 <= x < d for x, d in zip(idx, dims)):
                raise DimensionError(f"index {idx} out of range for dims {tuple(dims)}")
            a = CycNum.coerce(a)
            if a:
                clean[idx] = clean.get(idx, ZERO) + a
        self._amps = {k: clean[k] for k in sorted(clean) if clean[k]}

    @property
    def amps(self) -> dict[Index, CycNum]:
        return dict(self._amps)

    def items(self):
        return self._amps.items()

    def support(self) -> set[Index]:
        return set(self._amps)

    def __len__(self):
        return len(self._amps)

    def __getitem__(self, idx: Index) -> CycNum:
        return self._amps.get(tuple(idx), ZERO)

    def __eq__(self, other):
        if not isinstance(other, Ket):
            return NotImplemented
        return self.dims == other.dims and self._amps == other._amps

    def __hash__(self):
        return hash((self.dims, tuple(self._amps.items())))

    def is_zero(self) -> bool:
        return not self._amps

    def permuted(self, perms: tuple[list[int], list[int], list[int]]) -> "Ket":
        """Apply an index permutation to each party."""
        pa, pb, pc = perms
        return Ket(self.dims, {(pa[i], pb[j], pc[k]): a for (i, j, k), a in self._amps.items()})

    def __repr__(self):
        terms = " + ".join(f"({a})|{i}{j}{k}>" for (i, j, k), a in self._amps.items())
        return f"Ket({terms or '0'})"


@dataclass(frozen=True)
class StateSet:
    dims: Dims
    states: tuple[tuple[str, Ket], ...]
    stopper: int | None = None
    families: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        labels = [lab for lab, _ in self.states]
        if len(set(labels)) != len(labels):
            raise ValueError("state labels must be unique")
        for lab, ket in self.states:
            if ket.dims != self.dims:
                raise DimensionError(f"state {lab!r} has dims {tuple(ket.dims)}, set has {tuple(self.dims)}")
        if self.stopper is not None and not 0 <= self.stopper < len(self.states):
            raise ValueError("stopper index out of range")

    def __len__(self):
        return len(self.states)

    @property
    def labels(self) -> list[str]:
        return [lab for lab, _ in self.states]

    def ket(self, label: str) -> Ket:
        for lab, k in self.states:
            if lab == label:
                return k
        raise KeyError(label)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @property
    def stopper_label(self) -> str | None:
        return None if self.stopper is None else self.states[self.stopper][0]

    def without(self, label: str) -> "StateSet":
        keep = [(lab, k) for lab, k in self.states if lab != label]
        stop = self.stopper_label
        new_stop = None
        if stop is not None and stop != label:
            new_stop = [lab for lab, _ in keep].index(stop)
        fam = {k: v for k, v in self.families.items() if k != label}
        return StateSet(self.dims, tuple(keep), new_stop, fam)

    def permuted(self, perms) -> "StateSet":
        return StateSet(self.dims, tuple((lab, k.permuted(perms)) for lab, k in self.states),
                        self.stopper, dict(self.families))

    def family_members(self, family: str) -> list[str]:
        return [lab for lab in self.labels if self.families.get(lab) == family]


# constructors ---------------------------------------------------------

W1 = CycNum.omega_power(1)
W2 = CycNum.omega_power(2)


def _label(j: int, k: int) -> str:
    if j < 10 and k < 10:
        return f"phi{j}{k}"
    return f"phi{j},{k}"


def ghz_like(dims: Dims, first: Index, second: Index) -> Ket:
    return Ket(dims, {first: ONE, second: -ONE})


def w_like(dims: Dims, i: int, j: int, k: int) -> Ket:
    return Ket(dims, {(i, j, k): ONE, (j, k, i): W1, (k, i, j): W2})


def stopper(dims: Dims) -> Ket:
    return Ket(dims, {idx: ONE for idx in itertools.product(*(range(d) for d in dims))})


_LEMMA1_GHZ = [
    ("phi22", (2, 2, 2), (1, 1, 1)),
    ("phi20", (2, 2, 0), (1, 0, 2)),
    ("phi21", (2, 2, 1), (0, 1, 2)),
    ("phi02", (2, 0, 2), (0, 2, 1)),
    ("phi12", (2, 1, 2), (1, 2, 0)),
    ("phi10", (2, 1, 0), (0, 2, 2)),
    ("phi01", (2, 0, 1), (1, 2, 2)),
]


def build_lemma1_set() -> StateSet:
    """The ten-state set in C^3 x C^3 x C^3, transcribed literally."""
    dims = Dims(3, 3, 3)
    states = [(lab, ghz_like(dims, a, b)) for lab, a, b in _LEMMA1_GHZ]
    states.append(("phi00", Ket(dims, {(2, 0, 0): ONE, (0, 0, 2): W1, (0, 2, 0): W2})))
    states.append(("phi11", Ket(dims, {(2, 1, 1): ONE, (1, 1, 2): W1, (1, 2, 1): W2})))
    states.append(("S1", stopper(dims)))
    fam = {"phi22": "A0", "phi20": "A1", "phi21": "A1", "phi02": "A2", "phi12": "A2",
           "phi10": "A3", "phi01": "A3", "phi11": "A4", "phi00": "A5", "S1": "stopper"}
    return StateSet(dims, tuple(states), stopper=9, families=fam)


def _cube_families(d: int, dims: Dims) -> list[tuple[str, str, Ket]]:
    """Families A0..A5 built on the d x d x d corner of ``dims``."""
    dh, ds = d - 1, d - 2
    out = []
    out.append(("A0", _label(dh, dh), ghz_like(dims, (dh, dh, dh), (ds, ds, ds))))
    for i in range(dh):
        out.append(("A1", _label(dh, i), ghz_like(dims, (dh, dh, i), (ds - i, i, dh))))
    for i in range(dh):
        out.append(("A2", _label(i, dh), ghz_like(dims, (dh, i, dh), (i, dh, ds - i))))
    for i in range(dh):
        out.append(("A3", _label(ds - i, i), ghz_like(dims, (dh, ds - i, i), (i, dh, dh))))
    for k in range(dh):
        for l in range(dh):
            if k + l >= d - 1:
                out.append(("A4", _label(k, l), w_like(dims, dh, k, l)))
    for s in range(dh):
        for t in range(dh):
            if s + t <= d - 3:
                out.append(("A5", _label(s, t), w_like(dims, dh, s, t)))
    return out


def _assemble(dims: Dims, entries, stopper_label: str) -> StateSet:
    states = [(lab, ket) for _, lab, ket in entries]
    fam = {lab: f for f, lab, _ in entries}
    states.append((stopper_label, stopper(dims)))
    fam[stopper_label] = "stopper"
    return StateSet(dims, tuple(states), stopper=len(states) - 1, families=fam)


def build_theorem1_set(d: int) -> StateSet:
    """Size d**2 + 1 strongest-nonlocal candidate in C^d x C^d x C^d."""
    if not isinstance(d, int) or d < 3:
        raise DimensionError(f"d >= 3 required, got d={d}")
    dims = Dims(d, d, d)
    return _assemble(dims, _cube_families(d, dims), "S2")


def build_theorem2_set(d1: int, d2: int, d3: int) -> StateSet:
    """Size d2*d3 + 1 set in C^d1 x C^d2 x C^d3 for 3 <= d1 <= d2 <= d3."""
    if d1 < 3:
        raise DimensionError(f"d1 >= 3 required, got d1={d1}")
    if not d1 <= d2 <= d3:
        raise DimensionError(f"dims must satisfy d1 <= d2 <= d3, got ({d1}, {d2}, {d3})")
    dims = Dims(d1, d2, d3)
    h = d1 - 1
    e = _cube_families(d1, dims)
    for i in range(h):
        for j in range(d3 - d1):
            e.append(("A6", _label(i, d1 + j), ghz_like(dims, (h, i, d1 + j), (i, h, d1 + j))))
    if d3 > d1:
        e.append(("A7", _label(h, d1), ghz_like(dims, (h, h, d1), (0, 0, 1))))
    for i in range(d3 - d1 - 1):
        e.append(("A8", _label(h, d1 + 1 + i), ghz_like(dims, (h, h, d1 + 1 + i), (0, 0, d1 + i))))
    for j in range(d2 - d1):
        for i in range(h):
            e.append(("A9", _label(d1 + j, i), ghz_like(dims, (h, d1 + j, i), (i, d1 + j, h))))
    if d2 > d1:
        e.append(("A10", _label(d1, h), ghz_like(dims, (h, d1, h), (0, 1, 0))))
    for i in range(d2 - d1 - 1):
        e.append(("A11", _label(d1 + 1 + i, h), ghz_like(dims, (h, d1 + 1 + i, h), (0, d1 + i, 0))))
    if d2 > d1:
        for i in range(d3 - d1):
            e.append(("A12", _label(d1, d1 + i), ghz_like(dims, (h, d1, d1 + i), (0, 1, d1 + i))))
    for i in range(d2 - d1 - 1):
        for j in range(d3 - d1):
            e.append(("A13", _label(d1 + 1 + i, d1 + j),
                      ghz_like(dims, (h, d1 + 1 + i, d1 + j), (0, d1 + i, d1 + j))))
    return _assemble(dims, e, "S")


def build_product_basis(d1: int, d2: int, d3: int) -> StateSet:
    """Full computational basis; a control whose OPLM kernel is nontrivial."""
    dims = Dims(d1, d2, d3)
    states = tuple((f"e{i}{j}{k}", Ket(dims, {(i, j, k): ONE}))
                   for i, j, k in itertools.product(range(d1), range(d2), range(d3)))
    return StateSet(dims, states)


def build_set(d1: int, d2: int, d3: int) -> StateSet:
    """Cube construction for equal dims, otherwise the general construction."""
    if d1 == d2 == d3:
        return build_theorem1_set(d1)
    return build_theorem2_set(d1, d2, d3)


# inner products -------------------------------------------------------

def inner_product(x: Ket, y: Ket) -> CycNum:
    if x.dims != y.dims:
        raise DimensionError(f"dims mismatch {tuple(x.dims)} vs {tuple(y.dims)}")
    if len(x) > len(y):
        small, large, flip = y, x, True
    else:
        small, large, flip = x, y, False
    acc = ZERO
    for idx, a in small.items():
        b = large[idx]
        if b:
            acc = acc + (b.conj() * a if flip else a.conj() * b)
    return acc


def check_pairwise_orthogonal(s: StateSet) -> tuple[bool, tuple[str, str] | None]:
    """Return ``(True, None)`` or ``(False, first_offending_pair)``."""
    for (la, a), (lb, b) in itertools.combinations(s.states, 2):
        if inner_product(a, b):
            return False, (la, lb)
    return True, None


def require_orthogonal(s: StateSet) -> None:
    ok, pair = check_pairwise_orthogonal(s)
    if not ok:
        raise NonOrthogonalError(pair[0], pair[1], inner_product(s.ket(pair[0]), s.ket(pair[1])))


# classification -------------------------------------------------------

@dataclass(frozen=True)
class StateClass:
    ranks: dict
    category: str

    def rank_tuple(self) -> tuple[int, int, int]:
        return tuple(self.ranks[c] for c in CUTS)


def _cut_coords(idx: Index, cut: str) -> tuple[int, tuple[int, int]]:
    i, j, k = idx
    if cut == "A|BC":
        return i, (j, k)
    if cut == "B|CA":
        return j, (k, i)
    if cut == "C|AB":
        return k, (i, j)
    raise ValueError(f"unknown bipartition {cut!r}")


def schmidt_rank(x: Ket, cut: str) -> int:
    """Rank over Q(w) of the single-party x joint-party reshaping.

    Each entry ``u + v*w`` is realified to the 2x2 rational block of
    multiplication by it on the basis {1, w}; the Q-rank of the realified
    matrix is twice the Q(w)-rank.
    """
    rows: dict[int, dict] = {}
    cols: dict[tuple, int] = {}
    for idx, a in x.items():
        r, c = _cut_coords(idx, cut)
        cj = cols.setdefault(c, len(cols))
        rows.setdefault(r, {})[cj] = a
    int_rows = []
    for r in sorted(rows):
        top, bot = {}, {}
        for cj, a in rows[r].items():
            # z*1 = u + v w ; z*w = -v + (u - v) w
            top[2 * cj] = a.u
            top[2 * cj + 1] = -a.v
            bot[2 * cj] = a.v
            bot[2 * cj + 1] = a.u - a.v
        int_rows.append(clear_denominators(top))
        int_rows.append(clear_denominators(bot))
    rk = rank_int(int_rows, 2 * len(cols))
    assert rk % 2 == 0
    return rk // 2


def classify_state(x: Ket) -> StateClass:
    if x.is_zero():
        raise ValueError("cannot classify the zero ket")
    ranks = {cut: schmidt_rank(x, cut) for cut in CUTS}
    vals = list(ranks.values())
    if all(r == 1 for r in vals):
        cat = "product"
    elif all(r >= 2 for r in vals):
        cat = "genuinely_entangled"
    else:
        cat = "entangled"
    return StateClass(ranks, cat)


# JSON -----------------------------------------------------------------

def stateset_to_json(s: StateSet) -> dict:
    return {
        "dims": list(s.dims),
        "stopper": s.stopper_label,
        "states": [
            {"label": lab,
             "amps": [{"idx": list(idx), **a.to_json()} for idx, a in ket.items()]}
            for lab, ket in s.states
        ],
    }


def stateset_from_json(obj: dict) -> StateSet:
    try:
        dims = Dims(*[int(d) for d in obj["dims"]])
        states = []
        for st in obj["states"]:
            amps = {tuple(a["idx"]): CycNum.from_json(a) for a in st["amps"]}
            states.append((str(st["label"]), Ket(dims, amps)))
        labels = [lab for lab, _ in states]
        stop = obj.get("stopper")
        stop_idx = labels.index(stop) if stop is not None else None
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state-set JSON: {exc}") from exc
    return StateSet(dims, tuple(states), stop_idx)


def random_local_permutation(dims: Dims, rng) -> tuple[list[int], list[int], list[int]]:
    perms = []
    for d in dims:
        p = list(range(d))
        rng.shuffle(p)
        perms.append(p)
    return tuple(perms)


def from_amplitudes(dims: Dims, items: Iterable[tuple[Index, object]]) -> Ket:
    return Ket(dims, dict(items))
