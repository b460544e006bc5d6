"""Per-stabilizer analysis of a gerbe fiber BE -> BG.

For a central extension 0 -> Z/r -> E -> G -> 0 this module decides the
three questions the curve pipeline needs: is the fiber a root gerbe
(two independent detectors), is inflation injective on degree-3 units
cohomology, and does the degree-2 inflation admit a section.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abelian import FinAbGroup, is_split_injection
from .cohomology import (
    UNITS,
    bockstein_r,
    cohomology_units,
    inflation_kernel_trivial,
    inflation_map,
)
from .errors import InvariantViolationError, ResourceCapError
from .groups import CentralExtension

__all__ = [
    "FiberDiagnostics",
    "fiber_is_root_gerbe",
    "fiber_is_root_gerbe_via_inflation",
    "h3_inflation_injective",
    "h2_section_exists",
    "analyze_fiber",
]


def fiber_is_root_gerbe(ext: CentralExtension) -> bool:
    """Root-gerbe test by pushforward: the Bockstein of the extension class
    must vanish in H^2(G, kx) = H^3(G, Z)."""
    return bockstein_r(ext.base, ext.cocycle).is_zero


def fiber_is_root_gerbe_via_inflation(ext: CentralExtension) -> bool:
    """Root-gerbe test by pullback: inflation H^2(G, kx) -> H^2(E, kx)
    must be injective.  Must agree with the Bockstein detector."""
    return inflation_kernel_trivial(ext.projection, 3)


def h3_inflation_injective(ext: CentralExtension) -> bool:
    """Is inflation injective on degree-3 units cohomology (H^4 integral)?"""
    return inflation_kernel_trivial(ext.projection, 4)


def h2_section_exists(ext: CentralExtension) -> bool:
    """Does inflation on degree-2 units cohomology admit a retraction?

    True iff the induced map H^2(G, kx) -> H^2(E, kx) is a split
    injection.  A trivial source splits vacuously, which avoids any
    E-side computation for cyclic stabilizers.
    """
    if cohomology_units(ext.base, 2).value.is_trivial:
        return True
    return is_split_injection(inflation_map(ext.projection, 2, UNITS))


@dataclass(frozen=True)
class FiberDiagnostics:
    """All per-fiber decision data for one stabilizer point.

    h3_inflation_injective and h2_section_exists are None when they were
    not evaluated (resource cap, or a path whose result does not depend
    on them); root_gerbe_via_inflation is None when only the cheaper
    Bockstein detector was run.
    """

    extension: CentralExtension
    h2_units_base: FinAbGroup
    h2_units_total: FinAbGroup
    is_root_gerbe: bool
    root_gerbe_via_inflation: object
    h3_inflation_injective: object
    h2_section_exists: object
    bockstein_class: tuple

    def __post_init__(self):
        if self.root_gerbe_via_inflation is not None and \
                self.root_gerbe_via_inflation != self.is_root_gerbe:
            raise InvariantViolationError(
                "root-gerbe detectors disagree: Bockstein "
                f"{self.is_root_gerbe}, inflation {self.root_gerbe_via_inflation}")
        if self.h2_section_exists is True and \
                self.root_gerbe_via_inflation is False:
            raise InvariantViolationError(
                "a split injection cannot fail to be injective")


def analyze_fiber(ext: CentralExtension, *, verify: bool = True,
                  with_h3: bool = True, with_sections: bool = True,
                  with_h2_total: bool = True) -> FiberDiagnostics:
    """Run the fiber decision battery for one central extension.

    verify=True additionally runs the pullback root-gerbe detector and
    cross-asserts it against the Bockstein detector.  Expensive parts
    degrade to None on a resource-cap error rather than failing.
    """
    G = ext.base
    beta = bockstein_r(G, ext.cocycle)
    root = beta.is_zero
    h2_base = cohomology_units(G, 2).value

    via_inflation = None
    if verify:
        via_inflation = fiber_is_root_gerbe_via_inflation(ext)

    h2_total = None
    if with_h2_total:
        try:
            h2_total = cohomology_units(ext.total, 2).value
        except ResourceCapError:
            h2_total = None

    h3_inj = None
    if with_h3:
        try:
            h3_inj = h3_inflation_injective(ext)
        except ResourceCapError:
            h3_inj = None

    section = None
    if with_sections:
        try:
            section = h2_section_exists(ext)
        except ResourceCapError:
            section = None

    return FiberDiagnostics(
        extension=ext,
        h2_units_base=h2_base,
        h2_units_total=h2_total,
        is_root_gerbe=root,
        root_gerbe_via_inflation=via_inflation,
        h3_inflation_injective=h3_inj,
        h2_section_exists=section,
        bockstein_class=beta.coords,
    )
