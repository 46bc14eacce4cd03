"""Readers and writers for rosters, pass matrices, game files and parameters.

Parsers reject malformed input; they never renormalise or truncate.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import (
    STORED_TOL,
    Alphabet,
    GameSequence,
    HmmParams,
    Player,
    Roster,
    validate_params,
)
from .network import PassCountMatrix

RATIO_TOLERANCE_PP = 0.5


class IngestError(ValueError):
    """Base class; ``location`` is a human-readable position in the input."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class MalformedInputError(IngestError):
    pass


class EmptyRosterError(IngestError):
    pass


class DuplicateIdError(IngestError):
    pass


class NonIntegerCellError(IngestError):
    pass


class UnknownPlayerError(IngestError):
    pass


class MissingPlayerError(IngestError):
    pass


class NonSquareError(IngestError):
    pass


class OutcomeRangeError(IngestError):
    pass


class EmptyGameError(IngestError):
    pass


class RowSumError(IngestError):
    pass


# --- roster / alphabet ---------------------------------------------------


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"malformed JSON in {what}: {exc.msg}",
                                  f"line {exc.lineno} column {exc.colno}") from exc


def parse_roster(text: str) -> Roster:
    data = _load_json(text, "roster")
    if not isinstance(data, dict) or not isinstance(data.get("players"), list):
        raise MalformedInputError('roster must be an object with a "players" list')
    players = data["players"]
    if not players:
        raise EmptyRosterError("roster has no players")
    seen: dict[str, int] = {}
    out = []
    for i, entry in enumerate(players):
        loc = f"players[{i}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str) or not entry["id"]:
            raise MalformedInputError('each player needs a non-empty string "id"', loc)
        pid = entry["id"]
        if pid in seen:
            raise DuplicateIdError(f"duplicate player id {pid!r} (first at players[{seen[pid]}])", loc)
        seen[pid] = i
        name = entry.get("name", pid)
        if not isinstance(name, str):
            raise MalformedInputError('"name" must be a string', loc)
        out.append(Player(pid, name))
    return Roster(tuple(out))


def write_roster(roster: Roster) -> str:
    data = {"players": [{"id": p.id, "name": p.name} for p in roster.players]}
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def parse_alphabet(text: str) -> Alphabet:
    data = _load_json(text, "alphabet")
    if not isinstance(data, dict) or not isinstance(data.get("symbols"), list) or not data["symbols"]:
        raise MalformedInputError('alphabet must be an object with a non-empty "symbols" list')
    try:
        return Alphabet(tuple(str(s) for s in data["symbols"]))
    except ValueError as exc:
        raise MalformedInputError(str(exc)) from exc


def write_alphabet(alphabet: Alphabet) -> str:
    return json.dumps({"symbols": list(alphabet.symbols)}) + "\n"


# --- pass counts ---------------------------------------------------------


def parse_pass_counts(text: str, roster: Roster) -> PassCountMatrix:
    """CSV with a header of receiver ids and one row per passer, row id first.

    Rows and columns are reordered to the roster's order.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if not rows:
        raise MalformedInputError("empty pass-count file")
    header = [c.strip() for c in rows[0][1:]]
    body = rows[1:]
    m = len(roster)
    if len(body) != len(header):
        raise NonSquareError(f"{len(body)} data rows but {len(header)} columns", "line 1")
    for k, row in enumerate(body):
        if len(row) - 1 != len(header):
            raise NonSquareError(f"row has {len(row) - 1} cells, expected {len(header)}",
                                 f"line {k + 2}")
    known = set(roster.ids)
    for c, pid in enumerate(header):
        if pid not in known:
            raise UnknownPlayerError(f"unknown player {pid!r} in header", f"line 1 column {c + 2}")
    if len(set(header)) != len(header):
        raise DuplicateIdError("duplicate player id in header", "line 1")
    row_ids = [r[0].strip() for r in body]
    for k, pid in enumerate(row_ids):
        if pid not in known:
            raise UnknownPlayerError(f"unknown player {pid!r}", f"line {k + 2} column 1")
    if len(set(row_ids)) != len(row_ids):
        raise DuplicateIdError("duplicate row id", "column 1")
    missing = [p for p in roster.ids if p not in set(header)]
    if missing:
        raise MissingPlayerError(f"players missing from matrix: {', '.join(missing)}", "line 1")
    missing_rows = [p for p in roster.ids if p not in set(row_ids)]
    if missing_rows:
        raise MissingPlayerError(f"players without a row: {', '.join(missing_rows)}")
    counts = np.zeros((m, m), dtype=np.int64)
    col_index = [roster.index(p) for p in header]
    for k, row in enumerate(body):
        i = roster.index(row_ids[k])
        for c, cell in enumerate(row[1:]):
            cell = cell.strip()
            try:
                value = int(cell)
            except ValueError:
                raise NonIntegerCellError(f"non-integer cell {cell!r}",
                                          f"line {k + 2} column {c + 2}") from None
            if value < 0:
                raise NonIntegerCellError(f"negative count {value}", f"line {k + 2} column {c + 2}")
            counts[i, col_index[c]] = value
    return PassCountMatrix(roster, counts)


def write_pass_counts(counts: PassCountMatrix) -> str:
    ids = counts.roster.ids
    lines = ["," + ",".join(ids)]
    for pid, row in zip(ids, counts.counts):
        lines.append(pid + "," + ",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


# --- games ---------------------------------------------------------------


def outcome_ratios(seq: GameSequence, n: int) -> np.ndarray:
    """Share of rounds per symbol, in percent."""
    counts = np.bincount(np.asarray(seq.outcomes), minlength=n)[:n]
    return 100.0 * counts / len(seq)


def ratio_check(seq: GameSequence, n: int, tol_pp: float = RATIO_TOLERANCE_PP) -> bool | None:
    """Compare observed outcome shares with the declared ratios.

    Returns None when the game declares no ratios.
    """
    if seq.declared_ratios is None:
        return None
    if len(seq.declared_ratios) != n:
        return False
    diff = np.abs(outcome_ratios(seq, n) - np.asarray(seq.declared_ratios))
    return bool(diff.max() <= tol_pp)


@dataclass(frozen=True)
class ParsedGame:
    sequence: GameSequence
    ratios_consistent: bool | None


def parse_games(text: str, alphabet: Alphabet = Alphabet()) -> list[GameSequence]:
    return [g.sequence for g in parse_games_checked(text, alphabet)]


def parse_games_checked(text: str, alphabet: Alphabet = Alphabet()) -> list[ParsedGame]:
    """JSON-lines games, each with its ratio-consistency flag."""
    n = len(alphabet)
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        loc = f"line {lineno}"
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"malformed JSON: {exc.msg}", loc) from exc
        if not isinstance(obj, dict):
            raise MalformedInputError("expected a JSON object", loc)
        for key in ("game_id", "date", "result", "outcomes"):
            if key not in obj:
                raise MalformedInputError(f"missing field {key!r}", loc)
        outcomes = obj["outcomes"]
        if not isinstance(outcomes, list):
            raise MalformedInputError('"outcomes" must be a list', loc)
        if not outcomes:
            raise EmptyGameError("game has no outcomes", loc)
        for t, o in enumerate(outcomes):
            if not isinstance(o, int) or isinstance(o, bool):
                raise MalformedInputError(f"outcome {o!r} at position {t} is not an integer", loc)
            if not 0 <= o < n:
                raise OutcomeRangeError(
                    f"outcome {o} at position {t} outside alphabet of size {n}", loc)
        if obj["result"] not in ("W", "L"):
            raise MalformedInputError('"result" must be "W" or "L"', loc)
        try:
            date = _dt.date.fromisoformat(obj["date"])
        except (TypeError, ValueError):
            raise MalformedInputError(f"invalid ISO date {obj['date']!r}", loc) from None
        ratios = obj.get("ratios")
        if ratios is not None and (not isinstance(ratios, list)
                                   or not all(isinstance(r, (int, float)) for r in ratios)):
            raise MalformedInputError('"ratios" must be a list of numbers', loc)
        seq = GameSequence(str(obj["game_id"]), date, obj["result"], tuple(outcomes),
                           None if ratios is None else tuple(ratios))
        out.append(ParsedGame(seq, ratio_check(seq, n)))
    return out


def write_games(games: Sequence[GameSequence]) -> str:
    lines = []
    for g in games:
        obj = {"game_id": g.game_id, "date": g.date.isoformat(), "result": g.result,
               "outcomes": list(g.outcomes)}
        if g.declared_ratios is not None:
            obj["ratios"] = list(g.declared_ratios)
        lines.append(json.dumps(obj, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


# --- parameters ----------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _vector(v) -> str:
    return "[" + ", ".join(_fmt(x) for x in v) + "]"


def _matrix(rows) -> str:
    return "[\n    " + ",\n    ".join(_vector(r) for r in rows) + "\n  ]"


def write_params(params: HmmParams, roster: Roster, alphabet: Alphabet) -> str:
    params.check(len(roster), len(alphabet))
    return (
        "{\n"
        f'  "states": {json.dumps(list(roster.ids))},\n'
        f'  "names": {json.dumps([p.name for p in roster.players], ensure_ascii=False)},\n'
        f'  "alphabet": {json.dumps(list(alphabet.symbols))},\n'
        f'  "A": {_matrix(params.A)},\n'
        f'  "B": {_matrix(params.B)},\n'
        f'  "pi": {_vector(params.pi)}\n'
        "}\n"
    )


def read_params(text: str) -> tuple[HmmParams, Roster, Alphabet]:
    data = _load_json(text, "params")
    if not isinstance(data, dict):
        raise MalformedInputError("params file must be a JSON object")
    for key in ("states", "alphabet", "A", "B", "pi"):
        if key not in data:
            raise MalformedInputError(f"missing field {key!r}")
    states = data["states"]
    names = data.get("names", states)
    if not isinstance(states, list) or not states:
        raise MalformedInputError('"states" must be a non-empty list')
    if len(names) != len(states):
        raise MalformedInputError('"names" and "states" differ in length')
    try:
        roster = Roster(tuple(Player(str(s), str(nm)) for s, nm in zip(states, names)))
        alphabet = Alphabet(tuple(data["alphabet"]))
        params = HmmParams(data["A"], data["B"], data["pi"])
    except (ValueError, TypeError) as exc:
        raise MalformedInputError(str(exc)) from exc
    result = validate_params(params, len(roster), len(alphabet), STORED_TOL)
    if not result.ok:
        v = result.violations[0]
        where = v.target if v.row is None else f"{v.target} row {v.row}"
        cls = RowSumError if v.kind == "row_sum" else MalformedInputError
        raise cls(v.message, where)
    return params, roster, alphabet
