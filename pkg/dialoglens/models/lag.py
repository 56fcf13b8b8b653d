from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SequenceLevel(str, Enum):
    TOP = "top"
    DISCUSS = "discuss"
    DIALOG = "dialog"


class CategorySequence(BaseModel):
    model_config = ConfigDict(frozen=True)

    labels: tuple[str, ...]
    alphabet: tuple[str, ...]

    @model_validator(mode="after")
    def _labels_in_alphabet(self):
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet has repeated labels")
        stray = set(self.labels) - set(self.alphabet)
        if stray:
            raise ValueError(f"labels outside the alphabet: {sorted(stray)}")
        return self

    @classmethod
    def from_labels(cls, labels: Sequence[str], alphabet: Optional[Sequence[str]] = None) -> "CategorySequence":
        """Build a sequence; the alphabet defaults to the sorted distinct labels"""
        labels = tuple(labels)
        return cls(labels=labels, alphabet=tuple(alphabet) if alphabet is not None else tuple(sorted(set(labels))))

    def __len__(self) -> int:
        return len(self.labels)


class LagTable(BaseModel):
    """
    Transition counts at lag k

    Matrices are indexed [given][target] in alphabet order. `given_counts`
    counts each label over positions 1..N-k and `target_counts` over
    positions k+1..N. Expected counts and residuals are None until filled
    by lag_table; a residual is None where it is undefined.
    """
    model_config = ConfigDict(frozen=True)

    lag: int = Field(ge=1)
    alphabet: tuple[str, ...]
    observed: tuple[tuple[int, ...], ...]
    given_counts: tuple[int, ...]
    target_counts: tuple[int, ...]
    valid_positions: int
    expected: Optional[tuple[tuple[float, ...], ...]] = None
    residual: Optional[tuple[tuple[Optional[float], ...], ...]] = None

    def index(self, label: str) -> int:
        return self.alphabet.index(label)

    def count(self, given: str, target: str) -> int:
        return self.observed[self.index(given)][self.index(target)]

    def expected_fraction(self, given: str, target: str) -> Fraction:
        """Exact expected count under independence"""
        if not self.valid_positions:
            return Fraction(0)
        return Fraction(
            self.given_counts[self.index(given)] * self.target_counts[self.index(target)],
            self.valid_positions,
        )


class LsaFinding(BaseModel):
    model_config = ConfigDict(frozen=True)

    given: str
    target: str
    lag: int
    observed: int
    expected: float
    z: Optional[float] = None
    significant: bool = False
    degenerate: bool = False
    sparse: bool = False  # expected count below the minimum for a reliable z

    @model_validator(mode="after")
    def _degenerate_is_not_significant(self):
        if self.significant and self.degenerate:
            raise ValueError("a degenerate finding cannot be significant")
        return self


class PermutationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    given: str
    target: str
    lag: int
    observed: int
    p_value: float = Field(ge=0.0, le=1.0)
    exact: bool
    arrangements: int  # distinct arrangements of the sequence
    iterations: int    # arrangements actually scored


class PatternGraph(BaseModel):
    model_config = ConfigDict(frozen=True)

    nodes: tuple[str, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    chains: tuple[tuple[str, ...], ...] = ()
