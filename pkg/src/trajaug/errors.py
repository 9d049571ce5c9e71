"""Exception hierarchy.

Every error caused by bad input data derives from :class:`DataError`; the CLI
maps those to exit code 2. Bad parameter values raise plain ``ValueError``.
"""

from __future__ import annotations


class TrajAugError(Exception):
    """Base class for all package errors."""


class DataError(TrajAugError):
    """Input data violates a dataset or file contract."""


class DuplicateTimestamp(DataError):
    def __init__(self, traj_id: str, timestamp: object):
        super().__init__(f"trajectory {traj_id!r} has duplicate timestamp {timestamp}")
        self.traj_id = traj_id
        self.timestamp = timestamp


class TooFewPoints(DataError):
    def __init__(self, traj_id: str, count: int = 0):
        super().__init__(f"trajectory {traj_id!r} has {count} point(s); at least 2 required")
        self.traj_id = traj_id


class InvalidCoordinate(DataError):
    def __init__(self, traj_id: str, index: int):
        super().__init__(f"trajectory {traj_id!r} has an invalid coordinate at point {index}")
        self.traj_id = traj_id
        self.index = index


class MissingLabel(DataError):
    def __init__(self, traj_id: str):
        super().__init__(f"trajectory {traj_id!r} has no label")
        self.traj_id = traj_id


class MissingLabelColumn(DataError):
    def __init__(self, message: str = "operation requires a labelled dataset"):
        super().__init__(message)


class DuplicateId(DataError):
    def __init__(self, traj_id: str):
        super().__init__(f"duplicate trajectory id {traj_id!r}")
        self.traj_id = traj_id


class ReservedColumn(DataError):
    def __init__(self, name: str):
        super().__init__(f"extra column {name!r} collides with a reserved column name")
        self.name = name


class EmptyDataset(DataError):
    def __init__(self):
        super().__init__("dataset is empty")


class UnknownCandidate(DataError):
    def __init__(self, traj_id: str):
        super().__init__(f"candidate {traj_id!r} is not in the dataset")
        self.traj_id = traj_id


class IdCollision(DataError):
    def __init__(self, traj_id: str):
        super().__init__(f"synthetic id {traj_id!r} already exists in the dataset")
        self.traj_id = traj_id


class MultiplierBelowOne(DataError):
    def __init__(self, multiplier: float):
        super().__init__(f"balance multiplier must be >= 1, got {multiplier}")
        self.multiplier = multiplier


class ClassTooSmall(DataError):
    def __init__(self, label: str, count: int):
        super().__init__(f"class {label!r} has {count} trajectory(ies); at least 2 needed to split")
        self.label = label


class LengthMismatch(DataError):
    def __init__(self, n_true: int, n_pred: int):
        super().__init__(f"label sequences differ in length ({n_true} vs {n_pred})")


class EmptyInput(DataError):
    def __init__(self):
        super().__init__("label sequences are empty")


class EmptyTrainingSet(DataError):
    def __init__(self):
        super().__init__("no training rows")


class ColumnMismatch(DataError):
    def __init__(self, message: str = "train and test feature columns differ"):
        super().__init__(message)


class MissingColumn(DataError):
    def __init__(self, name: str):
        super().__init__(f"missing required column {name!r}")
        self.name = name


class ParseError(DataError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}: cannot parse {column}={value!r}")
        self.row = row
        self.column = column


class InconsistentLabel(DataError):
    def __init__(self, traj_id: str):
        super().__init__(f"trajectory {traj_id!r} has more than one label value")
        self.traj_id = traj_id


class NOutOfRange(TrajAugError, ValueError):
    def __init__(self, n: int, limit: int):
        super().__init__(f"n must be in [1, {limit}], got {n}")


class DegenerateBearing(TrajAugError, ValueError):
    def __init__(self):
        super().__init__("bearing is undefined between identical points")
