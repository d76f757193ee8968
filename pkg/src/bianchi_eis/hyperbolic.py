"""Points of hyperbolic 3-space and the quaternion Mobius action."""

from __future__ import annotations

from typing import NamedTuple


class Point3(NamedTuple):
    """u = z + jt with t > 0."""

    z: complex
    t: float


def mobius(M, u: Point3) -> Point3:
    """Action of [[a,b],[c,d]] on z + jt in the upper half-space.

    Entries may be complex numbers or anything accepted by complex().
    """
    a, b, c, d = (complex(x) for x in M)
    z, t = u.z, u.t
    r = c * z + d
    denom = abs(r) ** 2 + abs(c) ** 2 * t * t
    z_new = ((a * z + b) * r.conjugate() + a * c.conjugate() * t * t) / denom
    return Point3(z_new, t / denom)


def mat_embed(M, fld):
    """Embed a 2x2 matrix over O into complex entries."""
    return tuple(fld.embed(x) for x in M)
