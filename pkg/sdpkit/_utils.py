from typing import (
    Any,
)
from typing_extensions import (
    Literal,
    get_args,
)

from sdpkit.exceptions import (
    InvalidSlip,
    SdpError,
)
from sdpkit.types import (
    UncertaintyKind,
)


def validate_natural(value: Any, name: str = "value") -> Literal[True]:
    """
    Checks if the given value is a non-negative integer.

    :param Any value: value to validate
    :param str name: name of the argument, used in the error message
    :raises SdpError: raised if not valid
    :return Literal[True]: returns True if valid

    >>> validate_natural(3)
    True
    """
    if isinstance(value, int) and not isinstance(value, bool) and value >= 0:
        return True
    raise SdpError(f"Expected {name} to be a non-negative integer. "
                   f"Receives {value} of type {type(value)}")


def validate_cap(cap: Any) -> Literal[True]:
    """
    Checks if the given value is a positive integer usable as an enumeration cap.

    :param Any cap: value to validate
    :raises SdpError: raised if not valid
    :return Literal[True]: returns True if valid
    """
    if isinstance(cap, int) and not isinstance(cap, bool) and cap > 0:
        return True
    raise SdpError("Expected cap to be a positive integer. "
                   f"Receives {cap} of type {type(cap)}")


def validate_slip(slip: Any) -> Literal[True]:
    """
    Checks if the given value is a slip probability in [0, 1).

    :param Any slip: value to validate
    :raises InvalidSlip: raised if not valid
    :return Literal[True]: returns True if valid
    """
    if isinstance(slip, (int, float)) and not isinstance(slip, bool) and 0 <= slip < 1:
        return True
    raise InvalidSlip("Expected slip to be a real number in [0, 1). "
                      f"Receives {slip} of type {type(slip)}")


def validate_kind(kind: Any) -> Literal[True]:
    if kind in get_args(UncertaintyKind):
        return True
    raise SdpError(f"Expected kind to be one of {get_args(UncertaintyKind)}. "
                   f"Receives {kind}")
