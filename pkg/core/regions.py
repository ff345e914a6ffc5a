from enum import Enum


class RegionTag(Enum):
    """Position of the kernel point (s, t) relative to the unit triangle"""
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    OUTSIDE = "OUTSIDE"


def region_classify(s: float, t: float) -> RegionTag:
    """Region of (s, t); boundary points go to the closed region whose formula extends to them.

    s = 1 with t < 1 belongs to IV, t = 1 with s < 1 to III, s + t = 1 to I,
    and the remaining boundary lines (s = 1 or t = 1 with the other >= 1) to II.
    """
    if s <= 0.0 or t <= 0.0:
        return RegionTag.OUTSIDE
    if s >= 1.0 and t >= 1.0:
        return RegionTag.II
    if s >= 1.0:
        return RegionTag.IV
    if t >= 1.0:
        return RegionTag.III
    if s + t <= 1.0:
        return RegionTag.I
    return RegionTag.V
