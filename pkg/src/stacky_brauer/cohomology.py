"""Group cohomology with trivial coefficients via normalized bar resolutions.

Computes H^n(G, Z), H^n(G, Z/m), and H^n(G, kx) for a finite group G
acting trivially, together with inflation and restriction maps and the
integral Bockstein of a mod-r cocycle.

Multiplicative-group coefficients are handled through the shift
H^n(G, kx) = H^{n+1}(G, Z) for n >= 1, which is valid over an
algebraically closed field whose characteristic does not divide |G|
(the unit group is then divisible with full prime-to-p torsion).  The
characteristic enters only through that tameness check.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from itertools import product
from math import gcd

from . import abelian
from .abelian import (
    AbGroupMap,
    FinAbGroup,
    IntegerMatrix,
    Subquotient,
    check_cap,
    homology_at,
    induced_map,
)
from .errors import (
    InvariantViolationError,
    TamenessError,
    ValidationError,
)
from .groups import Cocycle2, FiniteGroup, GroupHom

__all__ = [
    "Coefficients", "INTEGERS", "UNITS", "mod_coefficients",
    "CochainSlice", "CohomologyGroup", "CohomologyClass",
    "bar_differential", "cochain_slice",
    "cohomology", "cohomology_Z", "cohomology_Zm", "cohomology_units",
    "pullback_matrix", "inflation_map", "restriction_map",
    "inflation_kernel_trivial", "bockstein", "bockstein_r",
    "enumerate_extension_classes", "clear_cache",
]


@dataclass(frozen=True)
class Coefficients:
    """Trivial-action coefficient tag: Z, Z/m, or the unit group kx."""

    kind: str          # "Z" | "Zm" | "units"
    modulus: int = 0   # m for "Zm", otherwise 0

    def __post_init__(self):
        if self.kind not in ("Z", "Zm", "units"):
            raise ValidationError(f"unknown coefficient kind {self.kind!r}")
        if self.kind == "Zm" and self.modulus < 1:
            raise ValidationError("Z/m coefficients need m >= 1")
        if self.kind != "Zm" and self.modulus:
            raise ValidationError("modulus only applies to Z/m coefficients")

    def __str__(self):
        if self.kind == "Z":
            return "Z"
        if self.kind == "Zm":
            return f"Z/{self.modulus}"
        return "units"


INTEGERS = Coefficients("Z")
UNITS = Coefficients("units")


def mod_coefficients(m: int) -> Coefficients:
    return Coefficients("Zm", m)


def validate_tameness(G: FiniteGroup, characteristic: int) -> None:
    if characteristic == 0:
        return
    if characteristic < 2:
        raise ValidationError("characteristic must be 0 or a prime")
    if G.order % characteristic == 0:
        raise TamenessError(
            f"characteristic {characteristic} divides the group order {G.order}")


# ---------------------------------------------------------------------------
# Normalized bar complex


def _tuple_count(G: FiniteGroup, n: int) -> int:
    return (G.order - 1) ** n


def bar_differential(G: FiniteGroup, n: int, coefficients: Coefficients = INTEGERS) -> IntegerMatrix:
    """The normalized bar differential d: C^n -> C^{n+1} (trivial action).

    Rows are (n+1)-tuples and columns are n-tuples of non-identity
    elements, indexed lexicographically.  Faces containing the identity
    are dropped.  The matrix is the same integer matrix for every trivial
    coefficient module (the tag only selects where homology reduces it),
    and its entries stay in {-1, 0, +1} before coincidence-summing, which
    keeps the eliminations well-conditioned.
    """
    if n < 0:
        raise ValidationError("degree must be nonnegative")
    nonid = G.nonidentity()
    k = len(nonid)
    rows_n = k ** (n + 1)
    check_cap(rows_n, f"bar differential rows (|G|-1)^{n + 1}")
    cols_n = k ** n
    pos = {g: i for i, g in enumerate(nonid)}
    e = G.identity
    mul = G.mul
    entries = {}
    for row_idx, tup in enumerate(product(nonid, repeat=n + 1)):
        # face 0 drops the first entry, face n+1 the last, face i multiplies
        faces = []
        faces.append((tup[1:], 1))
        sign = -1
        for i in range(n):
            gh = mul(tup[i], tup[i + 1])
            if gh != e:
                faces.append((tup[:i] + (gh,) + tup[i + 2:], sign))
            sign = -sign
        faces.append((tup[:n], sign))
        for face, s in faces:
            col = 0
            for g in face:
                col = col * k + pos[g]
            key = (row_idx, col)
            nv = entries.get(key, 0) + s
            if nv:
                entries[key] = nv
            elif key in entries:
                del entries[key]
    return IntegerMatrix(rows_n, cols_n, entries)


@dataclass(frozen=True)
class CochainSlice:
    """One degree of the normalized cochain complex with its two differentials."""

    group: FiniteGroup
    degree: int
    coefficients: Coefficients
    d_out: IntegerMatrix
    d_in: IntegerMatrix

    def __post_init__(self):
        k = self.group.order - 1
        n = self.degree
        if self.d_out.rows != k ** (n + 1) or self.d_out.cols != k ** n:
            raise ValidationError("d_out has the wrong shape")
        if self.d_in.rows != k ** n or self.d_in.cols != (k ** (n - 1) if n else 0):
            raise ValidationError("d_in has the wrong shape")


def cochain_slice(G: FiniteGroup, n: int, coefficients: Coefficients = INTEGERS) -> CochainSlice:
    d_out = bar_differential(G, n, coefficients)
    if n == 0:
        d_in = IntegerMatrix(_tuple_count(G, 0), 0)
    else:
        d_in = bar_differential(G, n - 1, coefficients)
    return CochainSlice(G, n, coefficients, d_out, d_in)


# ---------------------------------------------------------------------------
# Cohomology groups


@dataclass(frozen=True)
class CohomologyGroup:
    """H^degree(group, coefficients): canonical value plus cocycle representatives.

    representatives[i] is a sparse cochain vector over the normalized
    tuple basis for the i-th canonical generator; for units coefficients
    these are integral cochains one degree up.
    """

    group: FiniteGroup
    degree: int
    coefficients: Coefficients
    value: FinAbGroup
    representatives: tuple
    subquotient: Subquotient

    def class_of(self, vec: dict) -> "CohomologyClass":
        return CohomologyClass(self, self.subquotient.reduce(vec))

    def zero_class(self) -> "CohomologyClass":
        return CohomologyClass(self, (0,) * self.value.num_generators)

    def all_classes(self):
        """All elements (torsion only; raises if the value has a free part)."""
        if self.value.free_rank:
            raise ValidationError("cannot enumerate an infinite group")
        ranges = [range(d) for d in self.value.invariant_factors]
        return [CohomologyClass(self, tup) for tup in product(*ranges)]


@dataclass(frozen=True)
class CohomologyClass:
    """An element of a computed cohomology group, in generator coordinates."""

    parent: CohomologyGroup
    coords: tuple

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coords)

    def order(self) -> int:
        out = 1
        orders = self.parent.value.relation_orders()
        for v, d in zip(self.coords, orders):
            if d == 0:
                if v:
                    raise ValidationError("element of infinite order")
                continue
            if v % d:
                out = abelian.lcm(out, d // gcd(v % d, d))
        return out

    def representative(self) -> dict:
        return self.parent.subquotient.lift_of(self.coords)

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.coords) + ")"


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def clear_cache() -> None:
    with _CACHE_LOCK:
        _CACHE.clear()


def _integral_degree(n: int, coefficients: Coefficients) -> tuple:
    """Map the requested degree to the integral computation degree and modulus."""
    if coefficients.kind == "units":
        if n < 1:
            raise ValidationError("units cohomology is defined here for degree >= 1")
        return n + 1, 0
    if coefficients.kind == "Zm":
        return n, coefficients.modulus
    return n, 0


def cohomology(G: FiniteGroup, n: int, coefficients: Coefficients = INTEGERS,
               characteristic: int = 0) -> CohomologyGroup:
    """H^n(G, coefficients) with trivial action, via the normalized bar complex."""
    if n < 0:
        raise ValidationError("degree must be nonnegative")
    if coefficients.kind == "units":
        validate_tameness(G, characteristic)
    degree, modulus = _integral_degree(n, coefficients)
    key = (G.table, degree, modulus)
    with _CACHE_LOCK:
        cached = _CACHE.get(key)
    if cached is None:
        slice_ = cochain_slice(G, degree,
                               mod_coefficients(modulus) if modulus else INTEGERS)
        cached = homology_at(slice_.d_out, slice_.d_in, modulus=modulus)
        with _CACHE_LOCK:
            _CACHE.setdefault(key, cached)
            cached = _CACHE[key]
    subq = cached
    reps = []
    for lift in subq.lifts:
        if modulus:
            reps.append({k: v % modulus for k, v in lift.items() if v % modulus})
        else:
            reps.append(dict(lift))
    return CohomologyGroup(G, n, coefficients, subq.quotient, tuple(reps), subq)


def cohomology_Z(G: FiniteGroup, n: int) -> CohomologyGroup:
    return cohomology(G, n, INTEGERS)


def cohomology_Zm(G: FiniteGroup, n: int, m: int) -> CohomologyGroup:
    return cohomology(G, n, mod_coefficients(m))


def cohomology_units(G: FiniteGroup, n: int, characteristic: int = 0) -> CohomologyGroup:
    return cohomology(G, n, UNITS, characteristic)


# ---------------------------------------------------------------------------
# Induced maps


def pullback_matrix(phi: GroupHom, n: int) -> IntegerMatrix:
    """The cochain map C^n(target) -> C^n(source) precomposing with phi.

    Rows are source tuples; the row of a tuple whose image meets the
    identity is zero (normalized complexes).
    """
    src, dst = phi.source, phi.target
    nonid_src = src.nonidentity()
    nonid_dst = dst.nonidentity()
    ks, kd = len(nonid_src), len(nonid_dst)
    rows_n = ks ** n
    check_cap(rows_n, "pullback matrix rows")
    pos_dst = {g: i for i, g in enumerate(nonid_dst)}
    e = dst.identity
    entries = {}
    for row_idx, tup in enumerate(product(nonid_src, repeat=n)):
        col = 0
        dead = False
        for g in tup:
            img = phi(g)
            if img == e:
                dead = True
                break
            col = col * kd + pos_dst[img]
        if not dead:
            entries[(row_idx, col)] = 1
    return IntegerMatrix(rows_n, kd ** n, entries)


def inflation_map(q: GroupHom, n: int, coefficients: Coefficients = INTEGERS,
                  characteristic: int = 0) -> AbGroupMap:
    """Inflation H^n(G, A) -> H^n(E, A) along a surjection q: E -> G."""
    if not q.is_surjective:
        raise ValidationError("inflation needs a surjective homomorphism")
    degree, _ = _integral_degree(n, coefficients)
    src = cohomology(q.target, n, coefficients, characteristic)
    dst = cohomology(q.source, n, coefficients, characteristic)
    F = pullback_matrix(q, degree)
    return induced_map(F, src.subquotient, dst.subquotient)


def restriction_map(i: GroupHom, n: int, coefficients: Coefficients = INTEGERS,
                    characteristic: int = 0) -> AbGroupMap:
    """Restriction H^n(G, A) -> H^n(H, A) along an injection i: H -> G."""
    if not i.is_injective:
        raise ValidationError("restriction needs an injective homomorphism")
    degree, _ = _integral_degree(n, coefficients)
    src = cohomology(i.target, n, coefficients, characteristic)
    dst = cohomology(i.source, n, coefficients, characteristic)
    F = pullback_matrix(i, degree)
    return induced_map(F, src.subquotient, dst.subquotient)


def inflation_kernel_trivial(q: GroupHom, integral_degree: int) -> bool:
    """Is inflation injective on H^degree(G, Z) along the surjection q: E -> G?

    Decided without computing H^degree(E, Z): a class dies iff its pulled
    back cocycle is a coboundary over E, so one elimination of the E-side
    incoming differential answers the question for every class at once.
    """
    if not q.is_surjective:
        raise ValidationError("inflation needs a surjective homomorphism")
    G, E = q.target, q.source
    src = cohomology_Z(G, integral_degree)
    if src.value.is_trivial:
        return True
    if src.value.free_rank:
        raise ValidationError("expected a finite cohomology group")
    F = pullback_matrix(q, integral_degree)
    pulled = [F.apply(rep) for rep in src.representatives]
    d_in_E = bar_differential(E, integral_degree - 1)
    B = IntegerMatrix.from_columns(F.rows, pulled)
    elim = abelian._Elim(d_in_E, rhs=B).diagonalize()
    pivot_rows = {r for r, _ in elim.pivots}
    pivot_list = [(r, c, elim.rows[r][c]) for r, c in elim.pivots]
    nonpivot_rows = [r for r in elim.rhs_rows or {} if r not in pivot_rows]

    def is_coboundary(combo) -> bool:
        # transformed rhs of the combination, checked against the diagonal
        for r, c, d in pivot_list:
            s = 0
            row = elim.rhs_rows.get(r)
            if row:
                s = sum(k * row.get(j, 0) for j, k in enumerate(combo))
            if s % d:
                return False
        for r in nonpivot_rows:
            row = elim.rhs_rows.get(r, {})
            if sum(k * row.get(j, 0) for j, k in enumerate(combo)):
                return False
        return True

    for cls in src.all_classes():
        if cls.is_zero:
            continue
        if is_coboundary(cls.coords):
            return False
    return True


# ---------------------------------------------------------------------------
# Bockstein


def bockstein(G: FiniteGroup, cochain: dict, degree: int, r: int) -> CohomologyClass:
    """Integral Bockstein of a normalized mod-r cocycle of the given degree.

    Lifts the cochain to integers, applies the bar differential, divides
    by r, and returns the class of the result in H^{degree+1}(G, Z).
    """
    if r < 1:
        raise ValidationError("modulus must be >= 1")
    d_here = bar_differential(G, degree)
    image = d_here.apply(cochain)
    for v in image.values():
        if v % r:
            raise InvariantViolationError("input cochain is not a cocycle mod r")
    divided = {k: v // r for k, v in image.items() if v // r}
    target = cohomology_Z(G, degree + 1)
    return target.class_of(divided)


def bockstein_r(G: FiniteGroup, c: Cocycle2) -> CohomologyClass:
    """Bockstein of a 2-cocycle class: an element of H^2(G, kx) = H^3(G, Z)."""
    if c.base != G:
        raise ValidationError("cocycle is not defined over the given group")
    return bockstein(G, c.to_vector(), 2, c.modulus)


# ---------------------------------------------------------------------------
# Extension-class enumeration (lives here to keep groups.py free of cohomology)


def enumerate_extension_classes(G: FiniteGroup, r: int):
    """One normalized 2-cocycle per class of H^2(G, Z/r).

    The list is ordered with the split class first, then all remaining
    coordinate combinations of the canonical generators.
    """
    H2 = cohomology_Zm(G, 2, r)
    if H2.value.free_rank:
        raise InvariantViolationError("H^2 with finite coefficients must be finite")
    out = []
    for cls in H2.all_classes():
        vec = H2.subquotient.lift_of(cls.coords)
        vec = {k: v % r for k, v in vec.items() if v % r}
        out.append(Cocycle2.from_vector(G, r, vec))
    return out
