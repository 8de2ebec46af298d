"""Element data: symbols, atomic numbers, weights and allowed valences."""

from __future__ import annotations

_SYMBOLS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn "
    "Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba La Ce "
    "Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi Po At Rn "
    "Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl "
    "Mc Lv Ts Og"
).split()

ATOMIC_NUMBER: dict[str, int] = {sym: i + 1 for i, sym in enumerate(_SYMBOLS)}
SYMBOL: dict[int, str] = {z: sym for sym, z in ATOMIC_NUMBER.items()}

SUPPORTED = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})
ORGANIC_SUBSET = SUPPORTED
AROMATIC_SYMBOLS = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S"}

# Standard atomic weights (IUPAC abridged, 3 decimals).
ATOMIC_WEIGHT: dict[str, float] = {
    "H": 1.008,
    "B": 10.812,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "P": 30.974,
    "S": 32.067,
    "Cl": 35.453,
    "Br": 79.904,
    "I": 126.904,
}

_NEUTRAL_VALENCES: dict[str, tuple[int, ...]] = {
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}


def allowed_valences(element: str, charge: int = 0) -> tuple[int, ...]:
    """Allowed total valences (bond orders + hydrogens) for a charged atom.

    Charged atoms follow the isoelectronic shift: group 15-17 elements gain
    one valence per positive charge, carbon loses one per unit of either
    sign, boron gains one per negative charge.
    """
    base = _NEUTRAL_VALENCES[element]
    if charge == 0:
        return base
    if element == "C":
        shifted = tuple(v - abs(charge) for v in base)
    elif element == "B":
        shifted = tuple(v - charge for v in base)
    else:
        shifted = tuple(v + charge for v in base)
    return tuple(v for v in shifted if v >= 0)


def max_valence(element: str, charge: int = 0) -> int:
    vals = allowed_valences(element, charge)
    return max(vals) if vals else 0


def default_valence(element: str, charge: int, used: int) -> int | None:
    """Smallest allowed valence that can hold ``used`` bond-order units."""
    for v in allowed_valences(element, charge):
        if v >= used:
            return v
    return None
