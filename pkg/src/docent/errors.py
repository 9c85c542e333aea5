"""Shared exception types. ``exit_code`` drives the CLI exit status."""

from __future__ import annotations


class DocentError(Exception):
    """Base class for package errors (CLI exit code 3 unless overridden)."""

    exit_code = 3


class ValidationFailure(DocentError):
    """Bad input content: parse errors, invariant violations, lint gates."""

    exit_code = 2


class PlanParseError(ValidationFailure):
    pass


class PlanValidationError(ValidationFailure):
    def __init__(self, offenses: list[str]):
        self.offenses = list(offenses)
        msg = "plan validation failed:\n" + "\n".join(f"  - {o}" for o in self.offenses)
        super().__init__(msg)


class WorldFileError(ValidationFailure):
    pass


class ScriptError(ValidationFailure):
    pass


class UnresolvedReferenceError(ValidationFailure):
    pass


class PatternLintError(ValidationFailure):
    def __init__(self, findings):
        self.findings = list(findings)
        msg = "action-pattern lint failed:\n" + "\n".join(f"  - {f}" for f in self.findings)
        super().__init__(msg)


class MetricsMismatchError(ValidationFailure):
    pass


class TimeBaseError(ValidationFailure):
    pass


class UnrepairableExhibitError(DocentError):
    pass


class DegenerateTargetError(DocentError):
    pass


class DegeneratePatchError(DocentError):
    pass


class NoDepthError(DocentError):
    pass


class UnreachableGoalError(DocentError):
    pass


class NavigationError(DocentError):
    """Raised when the tour cannot reach a navigation point.

    ``partial`` carries the run result accumulated up to the abort so the
    caller can still persist a partial event log.
    """

    def __init__(self, msg: str, partial=None):
        super().__init__(msg)
        self.partial = partial


class BackendError(DocentError):
    pass
