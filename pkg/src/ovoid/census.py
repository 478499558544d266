"""Hyperplane-section census of a partial ovoid in the orthogonal model.

Every hyperplane of PG(4,q) cuts the quadric in an elliptic quadric
(q^2 + 1 points), a hyperbolic quadric ((q+1)^2 points) or a cone
(q^2 + q + 1 points).  The census walks all (q^5 - 1)/(q - 1) hyperplanes,
classifies each section, counts how many members of the point set it
contains, and tags sections holding both a member and that member's
antipode with respect to the set's own uncovered grid section.

The counting is vectorized: hyperplane-coefficient rows times quadric
point coordinates through the field's addition/multiplication tables,
processed in row chunks.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from ovoid.geometry import GeometryError, Section, SectionType
from ovoid.gq import check_partial_ovoid
from ovoid.q4 import Q4Model
from ovoid.redei import residue_set

# distinct |elliptic section ∩ K| values for the size-(q^2 - 1) examples,
# and the two values realizing the antipode-pair residue -3 mod q
EXPECTED_DISTINCT_ELLIPTIC = {
    5: frozenset({0, 2, 3, 5, 8, 12}),
    7: frozenset({2, 3, 4, 6, 9, 10, 18}),
    11: frozenset({0, 4, 5, 8, 9, 10, 11, 15, 16, 20, 30}),
}
EXPECTED_MINUS3_VALUES = {
    5: frozenset({2, 12}),
    7: frozenset({4, 18}),
    11: frozenset({8, 30}),
}


class CensusError(ValueError):
    """Raised for malformed census inputs."""


@dataclass
class CensusReport:
    q: int
    k_size: int
    histograms: dict[SectionType, dict[int, int]]
    # per (section type, |section ∩ K|, contains pair) counts; the
    # contains-a-member split is recoverable as size > 0
    pair_histograms: dict[SectionType, dict[int, int]]
    num_hyperplanes: int

    def type_total(self, kind: SectionType) -> int:
        return sum(self.histograms.get(kind, {}).values())

    @property
    def distinct_elliptic(self) -> frozenset[int]:
        return frozenset(self.histograms.get(SectionType.ELLIPTIC, {}))

    @property
    def distinct_elliptic_meeting(self) -> frozenset[int]:
        return frozenset(
            v for v in self.histograms.get(SectionType.ELLIPTIC, {}) if v > 0
        )

    @property
    def minus3_values(self) -> frozenset[int]:
        """Distinct |section ∩ K| over elliptic sections with an antipode pair."""
        return frozenset(self.pair_histograms.get(SectionType.ELLIPTIC, {}))

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "k_size": self.k_size,
            "num_hyperplanes": self.num_hyperplanes,
            "histograms": {
                kind.name.lower(): {str(k): v for k, v in sorted(hist.items())}
                for kind, hist in self.histograms.items()
            },
            "pair_histograms": {
                kind.name.lower(): {str(k): v for k, v in sorted(hist.items())}
                for kind, hist in self.pair_histograms.items()
            },
            "distinct_elliptic": sorted(self.distinct_elliptic),
            "minus3_values": sorted(self.minus3_values),
        }


def _antipode_pairs_within(
    model: Q4Model, section: Section, members: tuple[int, ...]
) -> list[tuple[int, int]]:
    """Unordered member pairs (i, j), i < j, that are antipodal partners."""
    partner = model.antipode_index_map(section)
    member_set = set(members)
    pairs = []
    for i in members:
        j = int(partner[i])
        if j > i and j in member_set:
            pairs.append((i, j))
    return pairs


def run_census(
    model: Q4Model,
    members: Iterable[int],
    section: Optional[Section] = None,
    chunk_rows: int = 2048,
) -> CensusReport:
    """Classify every hyperplane section and histogram its member count.

    When no grid section is supplied and the set has the critical size
    q^2 - 1, the section is recovered from the set's uncovered lines.
    Without a section (e.g. for an ovoid) the pair histograms are empty.
    """
    members = tuple(sorted(int(i) for i in members))
    gq = model.gq
    if not check_partial_ovoid(gq, members):
        raise CensusError("input is not a partial ovoid")
    f = model.field
    q = f.q
    quadric = model.quadric
    space = quadric.space

    if section is None and len(members) == q * q - 1:
        section = model.subquadrangle_section(members)

    pair_rows: Optional[np.ndarray] = None
    pair_cols: Optional[np.ndarray] = None
    if section is not None:
        pairs = _antipode_pairs_within(model, section, members)
        if pairs:
            pair_rows = np.array([p[0] for p in pairs], dtype=np.int64)
            pair_cols = np.array([p[1] for p in pairs], dtype=np.int64)

    coords = quadric.coords.astype(np.int16)  # (num_points, 5)
    hyper = space.coords.astype(np.int16)  # (num_hyperplanes, 5) dual vectors
    add_t, mul_t = f._add_np, f._mul_np
    member_idx = np.array(members, dtype=np.int64)

    size_by_kind = {
        q * q + 1: SectionType.ELLIPTIC,
        (q + 1) * (q + 1): SectionType.HYPERBOLIC,
        q * q + q + 1: SectionType.CONE,
    }
    histograms: dict[SectionType, dict[int, int]] = {
        kind: {} for kind in SectionType
    }
    pair_histograms: dict[SectionType, dict[int, int]] = {
        kind: {} for kind in SectionType
    }

    for start in range(0, hyper.shape[0], chunk_rows):
        rows = hyper[start : start + chunk_rows]
        vals = np.zeros((rows.shape[0], coords.shape[0]), dtype=np.int16)
        for c in range(5):
            prod = mul_t[rows[:, c][:, None], coords[:, c][None, :]]
            vals = add_t[vals, prod]
        on = vals == 0
        sizes = on.sum(axis=1)
        k_counts = on[:, member_idx].sum(axis=1)
        if pair_rows is not None:
            has_pair = (on[:, pair_rows] & on[:, pair_cols]).any(axis=1)
        else:
            has_pair = np.zeros(rows.shape[0], dtype=bool)
        for r in range(rows.shape[0]):
            size = int(sizes[r])
            kind = size_by_kind.get(size)
            if kind is None:
                raise GeometryError(
                    f"hyperplane {tuple(int(v) for v in rows[r])} cuts {size} "
                    "quadric points, not a valid section size"
                )
            kc = int(k_counts[r])
            hist = histograms[kind]
            hist[kc] = hist.get(kc, 0) + 1
            if has_pair[r]:
                ph = pair_histograms[kind]
                ph[kc] = ph.get(kc, 0) + 1

    return CensusReport(
        q=q,
        k_size=len(members),
        histograms=histograms,
        pair_histograms=pair_histograms,
        num_hyperplanes=hyper.shape[0],
    )


# ----------------------------------------------------------------------
# derived checks
# ----------------------------------------------------------------------

@dataclass
class CheckResult:
    ok: bool
    detail: str

    def __bool__(self) -> bool:  # pragma: no cover - convenience
        return self.ok


def check_mass_conservation(report: CensusReport) -> CheckResult:
    q = report.q
    expected = {
        SectionType.ELLIPTIC: q * q * (q * q - 1) // 2,
        SectionType.HYPERBOLIC: q * q * (q * q + 1) // 2,
        SectionType.CONE: q * q * q + q * q + q + 1,
    }
    total = 0
    for kind, want in expected.items():
        got = report.type_total(kind)
        if got != want:
            return CheckResult(False, f"{kind.name}: {got} sections, expected {want}")
        total += got
    if total != report.num_hyperplanes:
        return CheckResult(
            False, f"type totals {total} != hyperplane count {report.num_hyperplanes}"
        )
    return CheckResult(True, f"{total} hyperplanes split as expected")


def check_double_count(report: CensusReport, model: Q4Model) -> CheckResult:
    """sum over elliptic sections of |section ∩ K| must equal |K| times the
    per-point number of elliptic sections, which is the same for every
    quadric point.  The per-point constant is counted directly at quadric
    point 0 rather than taken from a formula."""
    f = model.field
    q = f.q
    quadric = model.quadric
    point = quadric.coords[0]
    through = 0
    for h in range(len(quadric.space)):
        coeffs = tuple(int(v) for v in quadric.space.coords[h])
        val = 0
        for c in range(5):
            val = f.add(val, f.mul(coeffs[c], int(point[c])))
        if val != 0:
            continue
        if int(quadric.section_mask(coeffs).sum()) == q * q + 1:
            through += 1
    lhs = sum(
        size * count
        for size, count in report.histograms.get(SectionType.ELLIPTIC, {}).items()
    )
    rhs = report.k_size * through
    if lhs != rhs:
        return CheckResult(
            False,
            f"sum of elliptic member counts {lhs} != |K| * {through} = {rhs}",
        )
    return CheckResult(True, f"{lhs} member incidences, {through} elliptic per point")


def check_residues(report: CensusReport, f) -> CheckResult:
    """Every elliptic section meeting the set has member count mod p in the
    admissible residue set; empty sections are exempt."""
    allowed = residue_set(f)
    bad = sorted(
        size
        for size in report.distinct_elliptic_meeting
        if size % f.p not in allowed
    )
    if bad:
        return CheckResult(False, f"counts {bad} have residues outside {sorted(allowed)}")
    return CheckResult(
        True,
        f"residues of {sorted(report.distinct_elliptic_meeting)} within {sorted(allowed)}",
    )


def check_antipode_minus3(report: CensusReport) -> CheckResult:
    """Elliptic sections holding an antipodal member pair meet the set in
    -3 mod q points; for q with a reference list, exactly two distinct
    counts realize that residue (q=3 realizes only one)."""
    q = report.q
    values = report.minus3_values
    bad = sorted(v for v in values if v % q != (-3) % q)
    if bad:
        return CheckResult(False, f"pair-section counts {bad} are not -3 mod {q}")
    expected = EXPECTED_MINUS3_VALUES.get(q)
    if expected is not None and values != expected:
        return CheckResult(
            False, f"pair-section counts {sorted(values)} != expected {sorted(expected)}"
        )
    return CheckResult(True, f"pair sections realize {sorted(values)}")


def check_antipode_closure(model: Q4Model, section: Section, members) -> CheckResult:
    members = set(int(i) for i in members)
    partner = model.antipode_index_map(section)
    for i in sorted(members):
        j = int(partner[i])
        if j < 0:
            return CheckResult(False, f"member {i} lies on the grid section")
        if j not in members:
            return CheckResult(False, f"antipode {j} of member {i} is missing")
    return CheckResult(True, f"all {len(members)} members antipode-paired within the set")


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def write_census_csv(report: CensusReport, path) -> None:
    """One row per (section type, member count): total sections and how
    many of them contain an antipodal member pair."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "section_type",
                "intersection_size",
                "count",
                "contains_k_point",
                "contains_antipode_pair",
            ]
        )
        for kind in SectionType:
            hist = report.histograms.get(kind, {})
            pair_hist = report.pair_histograms.get(kind, {})
            for size in sorted(hist):
                pair_count = pair_hist.get(size, 0)
                plain = hist[size] - pair_count
                if plain:
                    writer.writerow(
                        [kind.name.lower(), size, plain, int(size > 0), 0]
                    )
                if pair_count:
                    writer.writerow(
                        [kind.name.lower(), size, pair_count, int(size > 0), 1]
                    )


def write_census_json(report: CensusReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_json(), indent=2) + "\n")
