"""The orthogonal model: quadrangle of the parabolic quadric in PG(4, q).

Points are the quadric points, lines its totally isotropic lines; the
order is (q, q).  The model keeps the geometric layer alongside, so
hyperplane sections, tangent hyperplanes and antipode partners across a
hyperbolic section stay available on quadrangle point indices.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from ovoid.geometry import (
    GeometryError,
    Quadric,
    Section,
    SectionType,
    parabolic_quadric,
)
from ovoid.gf import Field
from ovoid.gq import GQ, GQError, PartialOvoid, uncovered_subquadrangle

HYPERBOLIC_SEED = (1, 0, 0, 0, 0)  # X0 = 0 cuts the split form hyperbolically


class Q4Model:
    """Quadrangle plus geometry for the parabolic quadric."""

    name = "Q4"

    def __init__(self, field: Field):
        self.field = field
        self.quadric: Quadric = parabolic_quadric(field)
        self.gq = GQ(
            self.quadric.lines(),
            num_points=len(self.quadric),
            labels=self.quadric.points,
        )
        if (self.gq.s, self.gq.t) != (field.q, field.q):
            raise GQError(
                f"expected order ({field.q}, {field.q}), got {(self.gq.s, self.gq.t)}"
            )
        self.hyperbolic_seed: Section = self.quadric.classify_section(HYPERBOLIC_SEED)

    # -- member codec (JSON) -------------------------------------------

    def encode_member(self, i: int) -> list[int]:
        return [int(c) for c in self.quadric.points[i]]

    def decode_member(self, obj: object) -> int:
        if not isinstance(obj, (list, tuple)) or len(obj) != 5:
            raise GeometryError(f"bad member encoding for model Q4: {obj!r}")
        return self.quadric.local_index(tuple(int(c) for c in obj))

    # -- masks and sections ---------------------------------------------

    def section_point_mask(self, section: Section) -> int:
        return sum(1 << i for i in section.point_local)

    def subquadrangle_section(self, members: Iterable[int]) -> Section:
        """The hyperbolic section carried by the uncovered-line structure.

        Verifies the uncovered lines form a quadrangle of order (q, 1)
        whose points are exactly one hyperplane section of the quadric.
        """
        members = tuple(members)
        sub = uncovered_subquadrangle(self.gq, members)
        q = self.field.q
        if sub.order != (q, 1):
            raise GQError(f"subquadrangle order {sub.order}, expected ({q}, 1)")
        coeffs = self.quadric.hyperplane_through(sub.point_indices)
        section = self.quadric.classify_section(coeffs)
        if section.kind is not SectionType.HYPERBOLIC:
            raise GeometryError(f"uncovered points lie on a {section.kind.value} section")
        if section.point_local != sub.point_indices:
            raise GeometryError("uncovered points are not the full hyperplane section")
        return section

    def antipode_index_map(self, section: Section) -> np.ndarray:
        return self.quadric.antipode_map(section)


def build_q4_model(field: Field) -> Q4Model:
    return Q4Model(field)
