import pytest

from stacky_brauer.groups import (
    Cocycle2,
    central_extension,
    cyclic,
    direct_product,
    semidirect_cyclic_by_z2,
)

QUATERNION_TABLE = [
    [0, 0, 0, 0],
    [0, 1, 1, 0],
    [0, 0, 1, 1],
    [0, 1, 0, 1],
]


def quaternion_cocycle():
    V = direct_product(cyclic(2), cyclic(2))
    return Cocycle2(V, 2, QUATERNION_TABLE)


def quaternion8():
    c = quaternion_cocycle()
    return central_extension(c.base, 2, c).total


def small_family(max_order=8):
    """The built-in test family: cyclic groups, products of two cyclics,
    dihedral-8, and quaternion-8, up to the given order."""
    out = [(f"Z/{n}", cyclic(n)) for n in range(1, max_order + 1)]
    pairs = [(2, 2), (2, 3), (2, 4), (3, 3)]
    for a, b in pairs:
        if a * b <= max_order:
            out.append((f"Z/{a}xZ/{b}", direct_product(cyclic(a), cyclic(b))))
    if max_order >= 8:
        out.append(("D4", semidirect_cyclic_by_z2(4, 3)))
        out.append(("Q8", quaternion8()))
    return out


@pytest.fixture(scope="session")
def family():
    return small_family()
