from typing import Any, Optional


class ZetaLabError(Exception):
    """Base error; exit_code is what the CLI returns for it"""
    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class DomainError(ZetaLabError):
    """Argument outside the domain of the operation"""


class RangeError(ZetaLabError):
    """x beyond the sieve table"""


class CapacityError(ZetaLabError):
    """Request exceeds the configured memory budget"""


class SingularError(ZetaLabError):
    """Dirichlet inverse requested for f(1) = 0"""


class PoleError(DomainError):
    """Gamma evaluated at a non-positive integer"""


class UsageError(ZetaLabError):
    """Bad command line or configuration"""


class CheckFailedError(ZetaLabError):
    """A mathematical inequality or tolerance check failed"""
    exit_code = 2

    def __init__(self, detail: str, report: Any = None):
        super().__init__(detail)
        self.report = report
