"""Two-solution basis values shared by the region solvers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BasisPair:
    """Two independent solutions and their x-derivatives at one point."""

    f1: complex
    df1: complex
    f2: complex
    df2: complex

    @property
    def wronskian(self) -> complex:
        return self.f1 * self.df2 - self.df1 * self.f2

    def combine(self, c1: complex, c2: complex) -> tuple[complex, complex]:
        """Value and derivative of ``c1 f1 + c2 f2``."""
        return c1 * self.f1 + c2 * self.f2, c1 * self.df1 + c2 * self.df2
