from typing import (
    TYPE_CHECKING,
)

if TYPE_CHECKING:
    from sdpkit.problem import ValidationReport


class SdpError(ValueError):
    """
    Base class of every error raised by sdpkit
    """


class KindMismatch(SdpError):
    pass


class EmptyContainer(SdpError):
    pass


class InvalidDistribution(SdpError):
    pass


class InvalidState(SdpError):
    pass


class TableMiss(SdpError):
    pass


class EmptyChoice(SdpError):
    pass


class DomainMiss(SdpError):
    pass


class InfeasibleCtrl(SdpError):
    pass


class NotDeterministic(SdpError):
    pass


class NotViable(SdpError):
    pass


class InvalidSlip(SdpError):
    pass


class UncheckedMeasure(SdpError):
    pass


class NonMonotoneMeasure(SdpError):
    pass


class InvalidProblemFile(SdpError):
    pass


class TooLarge(SdpError):
    """
    Raised when an exhaustive enumeration would exceed its cap

    :param int count: number of items the enumeration would produce
    :param int cap: the cap in force
    """
    def __init__(self, count: int, cap: int) -> None:
        self.count = count
        self.cap = cap
        super().__init__(f"Enumeration too large: expected at most {cap} items, "
                         f"receives a request for {count}. Lower the number of steps or raise the cap")


class IllPosedProblem(SdpError):
    """
    Raised when a problem fails validation; carries the full report
    """
    def __init__(self, report: "ValidationReport") -> None:
        self.report = report
        super().__init__(f"Problem is not well-posed: {len(report.violations)} violation(s)\n{report}")
