"""Exceptions shared across modules."""


class ClassViolationError(ValueError):
    """Input operator/connection is outside the class a construction needs.

    Carries a witness describing the offending entry, suitable for reports.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PotentialError(ValueError):
    """No volume potential exists (the trace one-form is not closed)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
