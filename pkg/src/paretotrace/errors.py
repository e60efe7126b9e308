"""Exception hierarchy for the pipeline.

Everything raised intentionally by this package derives from
:class:`ParetoTraceError`, so callers can catch one type.  Configuration
problems (bad CLI input, malformed artifact files) are kept separate from
numerical failures because the command line maps them to different exit
codes.
"""

from __future__ import annotations


class ParetoTraceError(Exception):
    """Base class for all package errors."""


class ConfigError(ParetoTraceError):
    """Invalid configuration: unknown objective set, bad flag combination."""


class SchemaError(ConfigError):
    """An artifact file is missing or does not match its expected schema."""

    def __init__(self, path, expected, found):
        self.path = str(path)
        self.expected = expected
        self.found = found
        super().__init__(
            f"{self.path}: expected {expected!r}, found {found!r}"
        )


class DomainError(ParetoTraceError):
    """A parameter value lies outside the box the space was built from."""


class EvaluationError(ParetoTraceError):
    """An objective returned a non-finite value or raised during sampling."""

    def __init__(self, message, sample_index=None, coordinate=None):
        self.sample_index = sample_index
        self.coordinate = coordinate
        detail = []
        if sample_index is not None:
            detail.append(f"sample {sample_index}")
        if coordinate is not None:
            detail.append(f"coordinate {coordinate}")
        if detail:
            message = f"{message} ({', '.join(detail)})"
        super().__init__(message)


class DegenerateSpectrumError(ParetoTraceError):
    """All eigenvalues are zero; no active subspace exists."""


class FitError(ParetoTraceError):
    """Least-squares design matrix is rank deficient."""


class OrthogonalSubspaceError(ParetoTraceError):
    """Geodesic endpoints contain a pair of orthogonal directions."""


class TraceSingularityError(ParetoTraceError):
    """The blended quadratic form is singular at some trace parameter."""

    def __init__(self, message, t=None):
        self.t = t
        super().__init__(message)


class ContinuationError(ParetoTraceError):
    """The predictor ODE hit an ill-conditioned or indefinite Hessian."""

    def __init__(self, message, t=None):
        self.t = t
        super().__init__(message)


class InfeasibleFiberError(ParetoTraceError):
    """No point of the box projects onto the requested active coordinates."""
