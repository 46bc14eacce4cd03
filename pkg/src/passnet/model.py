"""Core value types: rosters, alphabets, HMM parameters and game sequences."""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

# Tolerances used across the package.
STORED_TOL = 1e-9
FRESH_TOL = 1e-12

ZeroRowPolicy = Literal["uniform", "self-loop"]
ZERO_ROW_POLICIES = ("uniform", "self-loop")

DEFAULT_SYMBOLS = ("0", "1", "2", "3")


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Player:
    id: str
    name: str


@dataclass(frozen=True)
class Roster:
    """Ordered player labels. Matrix rows and columns follow this order."""

    players: tuple[Player, ...]

    def __post_init__(self):
        players = tuple(
            p if isinstance(p, Player) else Player(*p) for p in self.players
        )
        object.__setattr__(self, "players", players)
        if not players:
            raise ValueError("roster must contain at least one player")
        seen = set()
        for i, p in enumerate(players):
            if not p.id:
                raise ValueError(f"player {i} has an empty id")
            if p.id in seen:
                raise ValueError(f"duplicate player id {p.id!r} at position {i}")
            seen.add(p.id)

    @classmethod
    def from_ids(cls, ids: Sequence[str]) -> Roster:
        return cls(tuple(Player(i, i) for i in ids))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.players)

    def __len__(self) -> int:
        return len(self.players)

    def index(self, player_id: str) -> int:
        for i, p in enumerate(self.players):
            if p.id == player_id:
                return i
        raise KeyError(f"unknown player {player_id!r}")


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...] = DEFAULT_SYMBOLS

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet symbols must be unique")

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True, eq=False)
class HmmParams:
    """Transition matrix ``A`` (m x m), emission matrix ``B`` (m x n), initial ``pi``.

    Arrays are copied and made read-only. Construction does not validate
    stochasticity; use :func:`validate_params` or :meth:`check`.
    """

    A: np.ndarray
    B: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen_array(self.A))
        object.__setattr__(self, "B", _frozen_array(self.B))
        object.__setattr__(self, "pi", _frozen_array(self.pi))

    @property
    def m(self) -> int:
        return self.pi.shape[0]

    @property
    def n(self) -> int:
        return self.B.shape[1] if self.B.ndim == 2 else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, HmmParams):
            return NotImplemented
        return (
            np.array_equal(self.A, other.A)
            and np.array_equal(self.B, other.B)
            and np.array_equal(self.pi, other.pi)
        )

    __hash__ = None

    def check(self, m: int | None = None, n: int | None = None) -> HmmParams:
        """Raise :class:`InvalidParamsError` unless the invariants hold."""
        result = validate_params(self, self.m if m is None else m, self.n if n is None else n)
        if not result.ok:
            raise InvalidParamsError(result)
        return self


@dataclass(frozen=True)
class GameSequence:
    """One game's round outcomes as alphabet indices."""

    game_id: str
    date: _dt.date
    result: Literal["W", "L"]
    outcomes: tuple[int, ...]
    declared_ratios: tuple[float, ...] | None = None

    def __post_init__(self):
        outcomes = tuple(int(o) for o in self.outcomes)
        object.__setattr__(self, "outcomes", outcomes)
        if self.declared_ratios is not None:
            object.__setattr__(
                self, "declared_ratios", tuple(float(r) for r in self.declared_ratios)
            )
        if not outcomes:
            raise ValueError(f"game {self.game_id!r} has no outcomes")
        if min(outcomes) < 0:
            raise ValueError(f"game {self.game_id!r} has a negative outcome index")
        if self.result not in ("W", "L"):
            raise ValueError(f"game {self.game_id!r}: result must be 'W' or 'L'")

    def __len__(self) -> int:
        return len(self.outcomes)

    def check_alphabet(self, n: int) -> None:
        for t, o in enumerate(self.outcomes):
            if o >= n:
                raise ValueError(
                    f"game {self.game_id!r}: outcome {o} at position {t} "
                    f"outside alphabet of size {n}"
                )


def as_sequence(seq, game_id: str = "seq") -> GameSequence:
    """Accept a GameSequence or a bare list of outcome indices."""
    if isinstance(seq, GameSequence):
        return seq
    return GameSequence(game_id, _dt.date(2000, 1, 1), "W", tuple(seq))


# --- validation ----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: Literal["dimension", "range", "row_sum", "non_finite"]
    target: Literal["A", "B", "pi"]
    row: int | None
    residual: float
    message: str


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]


class InvalidParamsError(ValueError):
    def __init__(self, result: ValidationResult):
        self.result = result
        super().__init__("; ".join(v.message for v in result.violations))


def validate_params(params: HmmParams, m: int, n: int, tol: float = STORED_TOL) -> ValidationResult:
    """Check shapes against ``(m, n)`` and that every row is a probability vector.

    Dimension problems are reported with kind ``"dimension"`` and stop the
    stochasticity checks for that array.
    """
    violations: list[Violation] = []
    expected = {"A": (m, m), "B": (m, n), "pi": (m,)}
    for name, shape in expected.items():
        arr = getattr(params, name)
        if arr.shape != shape:
            violations.append(
                Violation("dimension", name, None, float("nan"),
                          f"{name} has shape {arr.shape}, expected {shape}")
            )
            continue
        rows = arr.reshape(1, -1) if name == "pi" else arr
        for i, row in enumerate(rows):
            label = None if name == "pi" else i
            where = name if name == "pi" else f"row {i} of {name}"
            if not np.all(np.isfinite(row)):
                violations.append(
                    Violation("non_finite", name, label, float("nan"),
                              f"{where} contains non-finite values")
                )
                continue
            lo, hi = row.min(), row.max()
            if lo < 0.0 or hi > 1.0:
                bad = lo if lo < 0.0 else hi - 1.0
                violations.append(
                    Violation("range", name, label, float(bad),
                              f"{where} has entries outside [0, 1]")
                )
            total = float(row.sum())
            if abs(total - 1.0) > tol:
                violations.append(
                    Violation("row_sum", name, label, total - 1.0,
                              f"{where} sums to {total:.12g}")
                )
    return ValidationResult(tuple(violations))


# --- normalisation -------------------------------------------------------


class NegativeEntryError(ValueError):
    def __init__(self, row: int, col: int, value: float):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"negative entry {value!r} at row {row}, column {col}")


@dataclass(frozen=True, eq=False)
class Normalized:
    """Row-stochastic matrix plus the rows that needed the fallback policy."""

    matrix: np.ndarray
    policy: ZeroRowPolicy
    fallback_rows: tuple[int, ...]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def _fallback_row(width: int, row: int, policy: str) -> np.ndarray:
    if policy == "uniform":
        return np.full(width, 1.0 / width)
    if policy == "self-loop":
        if row >= width:
            raise ValueError("self-loop fallback needs a square matrix")
        out = np.zeros(width)
        out[row] = 1.0
        return out
    raise ValueError(f"unknown zero-row policy {policy!r}")


def renormalize_rows(matrix, policy: ZeroRowPolicy = "uniform") -> Normalized:
    """Divide each row by its sum. All-zero rows get the fallback ``policy``."""
    x = np.array(matrix, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if policy not in ZERO_ROW_POLICIES:
        raise ValueError(f"unknown zero-row policy {policy!r}")
    neg = np.argwhere(x < 0)
    if neg.size:
        r, c = (int(v) for v in neg[0])
        raise NegativeEntryError(r, c, float(x[r, c]))
    out = np.empty_like(x)
    fallback = []
    totals = x.sum(axis=1)
    for i, total in enumerate(totals):
        if total > 0:
            out[i] = x[i] / total
        else:
            out[i] = _fallback_row(x.shape[1], i, policy)
            fallback.append(i)
    out.setflags(write=False)
    return Normalized(out, policy, tuple(fallback))
