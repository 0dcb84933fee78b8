"""Averaged bias scores by identity sub-dimension, method, and family.

Every contributing document weighs equally in a mean: averages are plain
arithmetic means over the bias scores of the matching cells.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import Iterable, Sequence

from .identities import (
    ApplicationKind,
    Children,
    Gender,
    Identity,
    LanguageFamily,
    MaritalStatus,
    PromptMethod,
    Religion,
)
from .scoring import ScoreCell


class NoMatchingCellsError(Exception):
    """An average was requested over an empty slice."""


class Dimension(enum.Enum):
    RELIGION = "religion"
    GENDER = "gender"
    MARITAL_STATUS = "marital_status"
    CHILDREN = "children"


_DIMENSION_ENUMS = {
    Dimension.RELIGION: Religion,
    Dimension.GENDER: Gender,
    Dimension.MARITAL_STATUS: MaritalStatus,
    Dimension.CHILDREN: Children,
}


def subdimension_value(identity: Identity, dimension: Dimension):
    if dimension is Dimension.RELIGION:
        return identity.religion
    if dimension is Dimension.GENDER:
        return identity.gender
    if dimension is Dimension.MARITAL_STATUS:
        return identity.marital_status
    return identity.children


@dataclass(frozen=True)
class AverageQuery:
    """One slice of the score cells.

    ``application=None`` pools all applications and ``family=None`` pools
    both language families. ``dimension`` and ``subdimension`` must be
    given together or not at all.
    """

    method: PromptMethod
    application: ApplicationKind | None = None
    family: LanguageFamily | None = None
    dimension: Dimension | None = None
    subdimension: Religion | Gender | MaritalStatus | Children | None = None

    def __post_init__(self) -> None:
        if (self.dimension is None) != (self.subdimension is None):
            raise ValueError("dimension and subdimension must be given together")
        if self.dimension is not None and not isinstance(
            self.subdimension, _DIMENSION_ENUMS[self.dimension]
        ):
            raise ValueError(
                f"subdimension {self.subdimension!r} does not belong to "
                f"dimension {self.dimension.value!r}"
            )

    def matches(self, cell: ScoreCell) -> bool:
        key = cell.key
        if key.method is not self.method:
            return False
        if self.application is not None and key.application is not self.application:
            return False
        if self.family is not None and key.language.family is not self.family:
            return False
        if self.dimension is not None:
            return subdimension_value(key.identity, self.dimension) is self.subdimension
        return True


@dataclass(frozen=True)
class AverageResult:
    query: AverageQuery
    mean: float
    n: int


def _average(cells: Iterable[ScoreCell], query: AverageQuery) -> AverageResult:
    matched = [cell.bias_score for cell in cells if query.matches(cell)]
    if not matched:
        raise NoMatchingCellsError(f"no cells match {query}")
    return AverageResult(query=query, mean=fmean(matched), n=len(matched))


def average_by_subdimension(
    cells: Sequence[ScoreCell], query: AverageQuery
) -> AverageResult:
    """Mean bias score over cells whose identity has the queried sub-dimension."""
    if query.dimension is None:
        raise ValueError("average_by_subdimension requires a dimension")
    return _average(cells, query)


def average_by_method(cells: Sequence[ScoreCell], query: AverageQuery) -> AverageResult:
    """Mean bias score over all cells for one (application, method, family)."""
    if query.dimension is not None:
        raise ValueError("average_by_method takes a query without a dimension")
    return _average(cells, query)


class SeriesAxis(enum.Enum):
    GENDER_BY_FAMILY = "gender_by_family"
    RELIGION_BY_FAMILY = "religion_by_family"
    MARITAL_BY_FAMILY = "marital_by_family"
    CHILDREN_BY_FAMILY = "children_by_family"
    METHOD_BY_FAMILY = "method_by_family"


_AXIS_DIMENSIONS = {
    SeriesAxis.GENDER_BY_FAMILY: Dimension.GENDER,
    SeriesAxis.RELIGION_BY_FAMILY: Dimension.RELIGION,
    SeriesAxis.MARITAL_BY_FAMILY: Dimension.MARITAL_STATUS,
    SeriesAxis.CHILDREN_BY_FAMILY: Dimension.CHILDREN,
}


def series(
    cells: Sequence[ScoreCell],
    axis: SeriesAxis,
    application: ApplicationKind | None = None,
) -> list[AverageResult]:
    """One mean per (axis value, family, method) combination present.

    Results are ordered by axis value, then family, then method, each in
    canonical declaration order; empty combinations are omitted.
    """
    results: list[AverageResult] = []
    methods = [m for m in PromptMethod if any(c.key.method is m for c in cells)]
    if axis is SeriesAxis.METHOD_BY_FAMILY:
        for method in methods:
            for family in LanguageFamily:
                query = AverageQuery(
                    method=method, application=application, family=family
                )
                try:
                    results.append(average_by_method(cells, query))
                except NoMatchingCellsError:
                    continue
        return results

    dimension = _AXIS_DIMENSIONS[axis]
    for value in _DIMENSION_ENUMS[dimension]:
        for family in LanguageFamily:
            for method in methods:
                query = AverageQuery(
                    method=method,
                    application=application,
                    family=family,
                    dimension=dimension,
                    subdimension=value,
                )
                try:
                    results.append(average_by_subdimension(cells, query))
                except NoMatchingCellsError:
                    continue
    return results


def axis_value_of(result: AverageResult) -> str:
    query = result.query
    if query.subdimension is not None:
        return query.subdimension.value
    return query.method.value


def write_averages_csv(results: Iterable[AverageResult], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["axis_value", "family", "method", "application", "mean", "n"])
        for result in results:
            query = result.query
            writer.writerow(
                [
                    axis_value_of(result),
                    query.family.value if query.family else "both",
                    query.method.value,
                    query.application.value if query.application else "all",
                    repr(result.mean),
                    result.n,
                ]
            )
            count += 1
    return count
