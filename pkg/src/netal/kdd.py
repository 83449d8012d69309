"""KDD-Cup-1999 connection-record schema and parser.

A record is one comma-separated line of 41 features followed by a label
("normal." or an attack name with a trailing dot). Features 1-3
(protocol_type, service, flag) are categorical, the rest numeric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

FEATURE_NAMES = [
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
]

N_FEATURES = len(FEATURE_NAMES)  # 41
N_FIELDS = N_FEATURES + 1  # + label

CATEGORICAL_IDX = (1, 2, 3)  # protocol_type, service, flag
CONTINUOUS_IDX = tuple(i for i in range(N_FEATURES) if i not in CATEGORICAL_IDX)
CATEGORICAL_NAMES = tuple(FEATURE_NAMES[i] for i in CATEGORICAL_IDX)
CONTINUOUS_NAMES = tuple(FEATURE_NAMES[i] for i in CONTINUOUS_IDX)

NORMAL_LABEL = "normal."

# column of a continuous feature inside the numeric block
_CONT_COL = {name: j for j, name in enumerate(CONTINUOUS_NAMES)}
_CAT_COL = {name: j for j, name in enumerate(CATEGORICAL_NAMES)}


class ParseError(ValueError):
    """Malformed KDD input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class RawRecord:
    """One connection record: 41 features plus its label string."""

    duration: float
    protocol_type: str
    service: str
    flag: str
    src_bytes: float
    dst_bytes: float
    land: float
    wrong_fragment: float
    urgent: float
    hot: float
    num_failed_logins: float
    logged_in: float
    num_compromised: float
    root_shell: float
    su_attempted: float
    num_root: float
    num_file_creations: float
    num_shells: float
    num_access_files: float
    num_outbound_cmds: float
    is_host_login: float
    is_guest_login: float
    count: float
    srv_count: float
    serror_rate: float
    srv_serror_rate: float
    rerror_rate: float
    srv_rerror_rate: float
    same_srv_rate: float
    diff_srv_rate: float
    srv_diff_host_rate: float
    dst_host_count: float
    dst_host_srv_count: float
    dst_host_same_srv_rate: float
    dst_host_diff_srv_rate: float
    dst_host_same_src_port_rate: float
    dst_host_srv_diff_host_rate: float
    dst_host_serror_rate: float
    dst_host_srv_serror_rate: float
    dst_host_rerror_rate: float
    dst_host_srv_rerror_rate: float
    label: str


class KddRecords:
    """Columnar store of parsed records.

    Continuous features sit in a float64 matrix (NaN marks a blank field),
    the three categorical features and the label in string arrays. Behaves
    as a sequence of RawRecord.
    """

    def __init__(self, continuous: np.ndarray, categorical: np.ndarray, labels: np.ndarray):
        assert continuous.shape[1] == len(CONTINUOUS_IDX)
        assert categorical.shape[1] == len(CATEGORICAL_IDX)
        assert continuous.shape[0] == categorical.shape[0] == labels.shape[0]
        self.continuous = continuous
        self.categorical = categorical
        self.labels = labels

    def __len__(self) -> int:
        return self.continuous.shape[0]

    def __getitem__(self, i: int) -> RawRecord:
        fields = {}
        for name, j in _CONT_COL.items():
            fields[name] = float(self.continuous[i, j])
        for name, j in _CAT_COL.items():
            fields[name] = str(self.categorical[i, j])
        return RawRecord(label=str(self.labels[i]), **fields)

    def __iter__(self) -> Iterator[RawRecord]:
        for i in range(len(self)):
            yield self[i]

    def take(self, indices: np.ndarray) -> "KddRecords":
        return KddRecords(
            self.continuous[indices], self.categorical[indices], self.labels[indices]
        )

    def continuous_column(self, name: str) -> np.ndarray:
        return self.continuous[:, _CONT_COL[name]]

    def categorical_column(self, name: str) -> np.ndarray:
        return self.categorical[:, _CAT_COL[name]]

    def to_lines(self) -> Iterator[str]:
        """Rows back in KDD CSV form (integers without trailing .0)."""
        cont_idx = {i: _CONT_COL[FEATURE_NAMES[i]] for i in CONTINUOUS_IDX}
        cat_idx = {i: _CAT_COL[FEATURE_NAMES[i]] for i in CATEGORICAL_IDX}
        for r in range(len(self)):
            parts = []
            for i in range(N_FEATURES):
                if i in cat_idx:
                    parts.append(str(self.categorical[r, cat_idx[i]]))
                else:
                    parts.append(_format_number(self.continuous[r, cont_idx[i]]))
            parts.append(str(self.labels[r]))
            yield ",".join(parts)


def _format_number(x: float) -> str:
    if np.isnan(x):
        return ""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def parse_kdd(stream: Iterable[str] | Iterable[bytes]) -> KddRecords:
    """Parse KDD CSV lines into columnar records.

    Blank numeric fields parse as NaN (filled with zero at encoding time);
    anything else non-numeric in a numeric slot is an error. Empty lines
    are skipped.
    """
    cont_rows: list[list[float]] = []
    cat_rows: list[list[str]] = []
    labels: list[str] = []
    for line_no, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != N_FIELDS:
            raise ParseError(line_no, f"expected {N_FIELDS} fields, got {len(fields)}")
        cont = []
        for i in CONTINUOUS_IDX:
            f = fields[i].strip()
            if f == "":
                cont.append(np.nan)
                continue
            try:
                cont.append(float(f))
            except ValueError:
                raise ParseError(
                    line_no, f"non-numeric value {f!r} for feature {FEATURE_NAMES[i]!r}"
                ) from None
        label = fields[-1].strip()
        if not label:
            raise ParseError(line_no, "empty label")
        cont_rows.append(cont)
        cat_rows.append([fields[i].strip() for i in CATEGORICAL_IDX])
        labels.append(label)

    if not cont_rows:
        return KddRecords(
            np.empty((0, len(CONTINUOUS_IDX))),
            np.empty((0, len(CATEGORICAL_IDX)), dtype="<U24"),
            np.empty((0,), dtype="<U24"),
        )
    return KddRecords(
        np.asarray(cont_rows, dtype=np.float64),
        np.asarray(cat_rows, dtype="<U24"),
        np.asarray(labels, dtype="<U24"),
    )


def parse_kdd_file(path) -> KddRecords:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kdd(fh)
