"""
Univariate continuous piecewise-linear functions on [0,1] with exact
rational breakpoints, kept in minimal form (no collinear interior points).
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple

Point = Tuple[Fraction, Fraction]


def _collinear(a: Point, b: Point, c: Point) -> bool:
    return (b[1] - a[1]) * (c[0] - b[0]) == (c[1] - b[1]) * (b[0] - a[0])


def minimal_points(points: Iterable[Point]) -> Tuple[Point, ...]:
    """Drop interior points lying on the line through their neighbours"""
    kept: List[Point] = []
    for point in points:
        while len(kept) >= 2 and _collinear(kept[-2], kept[-1], point):
            kept.pop()
        kept.append(point)
    return tuple(kept)


@dataclass(frozen=True)
class Pwl1D:
    """Sorted breakpoints (x, f(x)) including x = 0 and x = 1"""
    points: Tuple[Point, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("A piecewise-linear function needs at least two points")
        xs = [x for x, _ in self.points]
        if xs[0] != 0 or xs[-1] != 1:
            raise ValueError("Breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("Breakpoints must be strictly increasing")
        if any(not 0 <= y <= 1 for _, y in self.points):
            raise ValueError("Function values must lie in [0,1]")
        if minimal_points(self.points) != self.points:
            raise ValueError("Representation is not minimal")

    @classmethod
    def from_points(cls, points: Iterable[Tuple]) -> 'Pwl1D':
        exact = sorted((Fraction(x), Fraction(y)) for x, y in points)
        return cls(minimal_points(exact))

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        xs = [px for px, _ in self.points]
        index = min(max(bisect_right(xs, x), 1), len(xs) - 1)
        (x0, y0), (x1, y1) = self.points[index - 1], self.points[index]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    @property
    def interior(self) -> List[Fraction]:
        return [x for x, _ in self.points[1:-1]]

    @property
    def interior_count(self) -> int:
        return len(self.points) - 2

    @property
    def slopes(self) -> List[Fraction]:
        return [
            (y1 - y0) / (x1 - x0)
            for (x0, y0), (x1, y1) in zip(self.points, self.points[1:])
        ]
