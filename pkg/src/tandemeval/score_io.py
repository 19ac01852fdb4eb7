"""Score/key file parsing and the joined trial table.

Canonical formats, one record per line, LF endings, '#' comments:

    score file:  <trial_id> <score>
    key file:    <trial_id> <class>         class in {target, nontarget, spoof}
    table dump:  <trial_id> <class> <cm_score> <asv_score>

Reads are whitespace-agnostic (any run of spaces/tabs); writes use a
single space. Parsing is pure and a TrialTable is immutable after
construction, so both are safe to use from concurrent readers.
"""

import enum
import math

import numpy as np

from .errors import (
    DuplicateIdError,
    EmptyClassError,
    EmptyTableError,
    JoinError,
    ParseError,
)


class TrialClass(enum.Enum):
    TARGET = "target"
    NONTARGET = "nontarget"
    SPOOF = "spoof"

    @property
    def is_bonafide(self):
        return self is not TrialClass.SPOOF


_CLASS_BY_TOKEN = {c.value: c for c in TrialClass}

# integer codes used inside TrialTable arrays
_CODE = {TrialClass.TARGET: 0, TrialClass.NONTARGET: 1, TrialClass.SPOOF: 2}
_CLASS_BY_CODE = {v: k for k, v in _CODE.items()}


class ScoreRecord:
    """One (trial_id, score) pair; scores are finite, higher = more positive-class-like."""

    __slots__ = ("trial_id", "score")

    def __init__(self, trial_id, score):
        self.trial_id = trial_id
        self.score = score

    def __eq__(self, other):
        return (
            isinstance(other, ScoreRecord)
            and self.trial_id == other.trial_id
            and self.score == other.score
        )

    def __repr__(self):
        return f"ScoreRecord({self.trial_id!r}, {self.score!r})"


def _data_lines(stream):
    """Yield (line_number, fields) skipping blanks and '#' comments."""
    for lineno, raw in enumerate(stream, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped.split()


def _parse_float(token, lineno, path):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"unparseable number {token!r}", line=lineno, path=path)
    if not math.isfinite(value):
        raise ParseError(f"non-finite score {token!r}", line=lineno, path=path)
    return value


def parse_scores(stream, path=None):
    """Parse a canonical score file into a list of ScoreRecord (input order)."""
    records = []
    seen = set()
    for lineno, fields in _data_lines(stream):
        if len(fields) != 2:
            raise ParseError(
                f"expected 2 fields, got {len(fields)}", line=lineno, path=path
            )
        trial_id, token = fields
        if trial_id in seen:
            raise DuplicateIdError(
                f"duplicate trial id {trial_id!r}", line=lineno, path=path
            )
        seen.add(trial_id)
        records.append(ScoreRecord(trial_id, _parse_float(token, lineno, path)))
    return records


def parse_keys(stream, path=None):
    """Parse a canonical key file into {trial_id: TrialClass}."""
    keys = {}
    for lineno, fields in _data_lines(stream):
        if len(fields) != 2:
            raise ParseError(
                f"expected 2 fields, got {len(fields)}", line=lineno, path=path
            )
        trial_id, token = fields
        if token not in _CLASS_BY_TOKEN:
            raise ParseError(
                f"unknown class token {token!r} (expected target|nontarget|spoof)",
                line=lineno,
                path=path,
            )
        if trial_id in keys:
            raise DuplicateIdError(
                f"duplicate trial id {trial_id!r}", line=lineno, path=path
            )
        keys[trial_id] = _CLASS_BY_TOKEN[token]
    return keys


def parse_asvspoof_cm_scores(stream, path=None):
    """Adapter for 5-column ASVspoof-2019-style CM files.

    Columns: speaker, utterance, system, key, score. The utterance id becomes
    the trial id; trial classes still come from the canonical key file. Only
    used behind an explicit flag; the canonical 2-column format is the
    supported path.
    """
    records = []
    seen = set()
    for lineno, fields in _data_lines(stream):
        if len(fields) != 5:
            raise ParseError(
                f"expected 5 fields, got {len(fields)}", line=lineno, path=path
            )
        trial_id = fields[1]
        if trial_id in seen:
            raise DuplicateIdError(
                f"duplicate trial id {trial_id!r}", line=lineno, path=path
            )
        seen.add(trial_id)
        records.append(ScoreRecord(trial_id, _parse_float(fields[4], lineno, path)))
    return records


def serialize_scores(records):
    return "".join(f"{r.trial_id} {r.score!r}\n" for r in records)


def serialize_keys(keys):
    return "".join(f"{tid} {cls.value}\n" for tid, cls in keys.items())


class TrialTable:
    """Immutable join of CM scores, ASV scores, and class labels.

    Rows keep the CM-file order; all arrays are read-only float64/int8.
    """

    def __init__(self, trial_ids, classes, cm_scores, asv_scores):
        self.trial_ids = tuple(trial_ids)
        codes = np.asarray([_CODE[c] for c in classes], dtype=np.int8)
        self._codes = codes
        self.cm_scores = np.asarray(cm_scores, dtype=np.float64)
        self.asv_scores = np.asarray(asv_scores, dtype=np.float64)
        if not (
            len(self.trial_ids)
            == codes.size
            == self.cm_scores.size
            == self.asv_scores.size
        ):
            raise ValueError("mismatched column lengths")
        for arr in (self._codes, self.cm_scores, self.asv_scores):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.trial_ids)

    def class_of(self, i):
        return _CLASS_BY_CODE[int(self._codes[i])]

    @property
    def classes(self):
        return tuple(_CLASS_BY_CODE[int(c)] for c in self._codes)

    def mask(self, cls):
        return self._codes == _CODE[cls]

    @property
    def n_target(self):
        return int(np.count_nonzero(self.mask(TrialClass.TARGET)))

    @property
    def n_nontarget(self):
        return int(np.count_nonzero(self.mask(TrialClass.NONTARGET)))

    @property
    def n_spoof(self):
        return int(np.count_nonzero(self.mask(TrialClass.SPOOF)))

    @property
    def bonafide_mask(self):
        return self._codes != _CODE[TrialClass.SPOOF]

    def cm_bonafide(self):
        return self.cm_scores[self.bonafide_mask]

    def cm_spoof(self):
        return self.cm_scores[self.mask(TrialClass.SPOOF)]

    def asv_target(self):
        return self.asv_scores[self.mask(TrialClass.TARGET)]

    def asv_nontarget(self):
        return self.asv_scores[self.mask(TrialClass.NONTARGET)]

    def asv_spoof(self):
        return self.asv_scores[self.mask(TrialClass.SPOOF)]

    def subset(self, cls):
        """New table containing only rows of the given class."""
        m = self.mask(cls)
        ids = [tid for tid, keep in zip(self.trial_ids, m) if keep]
        return TrialTable(
            ids, [cls] * len(ids), self.cm_scores[m], self.asv_scores[m]
        )

    def require_classes(self, *, spoof=False):
        """Raise EmptyClassError unless target+nontarget (and optionally spoof) rows exist."""
        missing = []
        if self.n_target == 0:
            missing.append("target")
        if self.n_nontarget == 0:
            missing.append("nontarget")
        if spoof and self.n_spoof == 0:
            missing.append("spoof")
        if missing:
            raise EmptyClassError(
                "trial table has no rows of class: " + ", ".join(missing)
            )


def serialize_table(table):
    lines = []
    for i, tid in enumerate(table.trial_ids):
        cls = table.class_of(i).value
        lines.append(
            f"{tid} {cls} {float(table.cm_scores[i])!r} {float(table.asv_scores[i])!r}\n"
        )
    return "".join(lines)


def _missing(sample, universe, limit=10):
    gone = sorted(universe - set(sample))
    return gone[:limit]


def join(cm_records, asv_records, keys, strict=True):
    """Join CM scores, ASV scores, and keys on trial id.

    Strict mode (default) requires the three id sets to be identical and
    names missing ids; silent trial loss would skew the class priors every
    downstream metric depends on. Non-strict keeps the intersection.
    """
    cm_by_id = {r.trial_id: r.score for r in cm_records}
    asv_by_id = {r.trial_id: r.score for r in asv_records}
    id_sets = {
        "cm scores": set(cm_by_id),
        "asv scores": set(asv_by_id),
        "keys": set(keys),
    }
    if strict:
        union = set().union(*id_sets.values())
        problems = []
        for name, ids in id_sets.items():
            if ids != union:
                problems.append(f"{name} missing {_missing(ids, union)}")
        if problems:
            raise JoinError("strict join failed: " + "; ".join(problems))
        joined = union
    else:
        joined = id_sets["cm scores"] & id_sets["asv scores"] & id_sets["keys"]
    if not joined:
        raise EmptyTableError("no trial ids common to all three inputs")

    ids = [r.trial_id for r in cm_records if r.trial_id in joined]
    return TrialTable(
        ids,
        [keys[t] for t in ids],
        [cm_by_id[t] for t in ids],
        [asv_by_id[t] for t in ids],
    )
