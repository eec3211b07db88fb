"""
Containers of possible next states: the identity, finite non-deterministic
sets and finite probability distributions, together with the monadic
operations the solver is written against.

Every value stored in a container must be hashable and totally ordered, since
canonicalization merges duplicates and sorts the support.
"""
from dataclasses import (
    dataclass,
)
from typing import (
    Any,
    Callable,
    Dict,
    Generic,
    Iterable,
    List,
    Tuple,
    TypeVar,
    cast,
)

from sdpkit._utils import (
    validate_kind,
)
from sdpkit.consts import (
    DETERMINISTIC,
    NON_DETERMINISTIC,
    PROB_DIGITS,
    PROB_TOLERANCE,
    STOCHASTIC,
)
from sdpkit.exceptions import (
    InvalidDistribution,
    KindMismatch,
)
from sdpkit.types import (
    UncertaintyKind,
)

A = TypeVar("A")
B = TypeVar("B")


@dataclass(frozen=True)
class SimpleProb(Generic[A]):
    """
    A probability distribution with finite support.

    :param Tuple[Tuple[A,float],...] entries: (value, probability) pairs
    :param bool canonical: whether entries are sorted, duplicate-free and strictly positive
    """
    entries: Tuple[Tuple[A, float], ...]
    canonical: bool = False

    @property
    def total(self) -> float:
        return sum(p for _, p in self.entries)

    def is_normalized(self) -> bool:
        """
        :return bool: True if every probability is non-negative and they sum to one within :data:`PROB_TOLERANCE`
        """
        return all(p >= 0 for _, p in self.entries) and abs(self.total - 1.0) <= PROB_TOLERANCE


@dataclass(frozen=True)
class NonDetSet(Generic[A]):
    """
    A finite, duplicate-free, sorted set of possible values.
    """
    members: Tuple[A, ...]


@dataclass(frozen=True, order=True)
class Membership:
    """
    Evidence that a value is contained in a container. ``mass`` is the
    probability of the value for stochastic containers and 1.0 otherwise.
    """
    mass: float = 1.0


@dataclass(frozen=True, eq=False)
class Container(Generic[A]):
    """
    A monadic structure of values. ``payload`` is a bare value for
    deterministic containers, a :class:`NonDetSet` for non-deterministic
    ones and a :class:`SimpleProb` for stochastic ones.

    Equality compares canonical forms; probabilities are compared with an
    absolute tolerance of :data:`~sdpkit.consts.PROB_TOLERANCE`.

    :examples:

    >>> ret(STOCHASTIC, "a") == distribution([("a", 1.0)])
    True
    >>> nondet([2, 1, 2]) == nondet([1, 2])
    True
    """
    kind: UncertaintyKind
    payload: Any

    def __post_init__(self) -> None:
        validate_kind(self.kind)
        if self.kind == NON_DETERMINISTIC and not isinstance(self.payload, NonDetSet):
            raise KindMismatch(f"Expected a NonDetSet payload for a {self.kind} container, "
                               f"receives {type(self.payload)}")
        if self.kind == STOCHASTIC and not isinstance(self.payload, SimpleProb):
            raise KindMismatch(f"Expected a SimpleProb payload for a {self.kind} container, "
                               f"receives {type(self.payload)}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Container):
            return False
        left = canonicalize(self)
        right = canonicalize(cast(Container[Any], other))
        if left.kind != right.kind:
            return False
        if left.kind == STOCHASTIC:
            lentries = left.payload.entries
            rentries = right.payload.entries
            return len(lentries) == len(rentries) and all(
                lv == rv and abs(lp - rp) <= PROB_TOLERANCE
                for (lv, lp), (rv, rp) in zip(lentries, rentries)
            )
        return left.payload == right.payload

    def __ne__(self, other: object) -> bool:
        return not (self == other)

    __hash__ = None  # type: ignore

    def __repr__(self) -> str:
        return f"Container({render(self)})"

    def support(self) -> Tuple[A, ...]:
        """
        :return Tuple[A,...]: the contained values; for stochastic containers the strictly positive ones
        """
        return support(self)


def single(x: A) -> Container[A]:
    return Container(DETERMINISTIC, x)


def nondet(values: Iterable[A]) -> Container[A]:
    """
    Build a canonical non-deterministic container, duplicates are dropped.

    >>> render(nondet(["b", "a", "b"]))
    '{a,b}'
    """
    return Container(NON_DETERMINISTIC, NonDetSet(_sorted_unique(values)))


def distribution(pairs: Iterable[Tuple[A, float]], *, check: bool = True) -> Container[A]:
    """
    Build a canonical stochastic container from (value, probability) pairs.

    :param Iterable[Tuple[A,float]] pairs: masses; repeated values are summed
    :param bool check: whether non-negativity and normalization are enforced, defaults to True.
        An unchecked container with a negative mass is not canonical and its support skips that value;
        :meth:`SimpleProb.is_normalized` tells if it is valid
    :raises InvalidDistribution: a probability is negative or the masses do not sum to one
    :return Container[A]: the distribution in canonical form

    >>> render(distribution([("b", 0.25), ("a", 0.5), ("b", 0.25)]))
    '{a:0.500000000,b:0.500000000}'
    """
    raw = SimpleProb(tuple((v, float(p)) for v, p in pairs))
    if check and not raw.is_normalized():
        raise InvalidDistribution("Expected non-negative probabilities summing to 1.0, "
                                  f"receives {[p for _, p in raw.entries]} with sum {raw.total}")
    return Container(STOCHASTIC, _canonical_prob(raw.entries))


def ret(kind: UncertaintyKind, x: A) -> Container[A]:
    """
    Wrap a value in the trivial container of the given kind.

    >>> render(ret(DETERMINISTIC, 5))
    '=5'
    >>> render(ret(STOCHASTIC, "a"))
    '{a:1.000000000}'
    """
    if kind == DETERMINISTIC:
        return single(x)
    if kind == NON_DETERMINISTIC:
        return Container(NON_DETERMINISTIC, NonDetSet((x,)))
    validate_kind(kind)
    return Container(STOCHASTIC, SimpleProb(((x, 1.0),), canonical=True))


def fmap(f: Callable[[A], B], m: Container[A]) -> Container[B]:
    """
    Apply ``f`` to every contained value. Values mapped together are merged:
    set union for non-deterministic containers, summed mass for stochastic ones.

    >>> render(fmap(lambda v: v + 1, nondet([1, 2])))
    '{2,3}'
    >>> render(fmap(lambda v: "c", distribution([("a", 0.5), ("b", 0.5)])))
    '{c:1.000000000}'
    """
    if m.kind == DETERMINISTIC:
        return single(f(m.payload))
    if m.kind == NON_DETERMINISTIC:
        return nondet(f(v) for v in m.payload.members)
    return Container(STOCHASTIC, _canonical_prob((f(v), p) for v, p in m.payload.entries))


def bind(m: Container[A], f: Callable[[A], Container[B]]) -> Container[B]:
    """
    Monadic bind. Stochastic containers are mixed with the weights of ``m``
    (the total probability law), non-deterministic ones are united.

    :raises KindMismatch: ``f`` returned a container of another kind

    >>> render(bind(nondet([1, 2]), lambda v: nondet([v, v + 1])))
    '{1,2,3}'
    >>> half = distribution([("x", 0.5), ("y", 0.5)])
    >>> render(bind(distribution([("a", 0.5), ("b", 0.5)]), lambda v: ret(STOCHASTIC, "x") if v == "a" else half))
    '{x:0.750000000,y:0.250000000}'
    """
    if m.kind == DETERMINISTIC:
        return _same_kind(m.kind, f(m.payload))
    if m.kind == NON_DETERMINISTIC:
        members: List[B] = []
        for v in m.payload.members:
            members.extend(_same_kind(m.kind, f(v)).payload.members)
        return nondet(members)
    mixed: List[Tuple[B, float]] = []
    for v, p in m.payload.entries:
        for w, q in _same_kind(m.kind, f(v)).payload.entries:
            mixed.append((w, p * q))
    return Container(STOCHASTIC, _canonical_prob(mixed))


def contains(x: A, m: Container[A]) -> bool:
    """
    Membership test; for stochastic containers only strictly positive mass counts.

    >>> contains("b", distribution([("a", 1.0), ("b", 0.0)]))
    False
    """
    if m.kind == DETERMINISTIC:
        return bool(m.payload == x)
    return x in support(m)


def all_true(mb: Container[bool]) -> bool:
    """
    Conjunction over the contained booleans. Vacuously True on an empty set.

    >>> all_true(distribution([(True, 0.9), (False, 0.1)]))
    False
    """
    return all(support(mb))


def tag_members(m: Container[A]) -> Container[Tuple[A, Membership]]:
    """
    Pair every contained value with the evidence of its own membership.
    Projecting the first component gives back ``m``.

    >>> m = distribution([("a", 0.3), ("b", 0.7)])
    >>> fmap(first, tag_members(m)) == m
    True
    """
    if m.kind == DETERMINISTIC:
        return single((m.payload, Membership()))
    if m.kind == NON_DETERMINISTIC:
        return Container(NON_DETERMINISTIC, NonDetSet(tuple((v, Membership()) for v in canonicalize(m).payload.members)))
    entries = canonicalize(m).payload.entries
    return Container(STOCHASTIC, SimpleProb(tuple(((v, Membership(p)), p) for v, p in entries), canonical=True))


def canonicalize(m: Container[A]) -> Container[A]:
    """
    Sort the support, merge duplicates and drop zero-probability entries.
    Idempotent; already canonical containers are returned as they are.
    """
    if m.kind == DETERMINISTIC:
        return m
    if m.kind == NON_DETERMINISTIC:
        return nondet(m.payload.members)
    if m.payload.canonical:
        return m
    return Container(STOCHASTIC, _canonical_prob(m.payload.entries))


def support(m: Container[A]) -> Tuple[A, ...]:
    if m.kind == DETERMINISTIC:
        return (m.payload,)
    m = canonicalize(m)
    if m.kind == NON_DETERMINISTIC:
        return cast(Tuple[A, ...], m.payload.members)
    return tuple(v for v, p in m.payload.entries if p > 0.0)


def weighted(m: Container[A]) -> Tuple[Tuple[A, float], ...]:
    """
    :return Tuple[Tuple[A,float],...]: canonical (value, probability) pairs of a
        stochastic container; deterministic containers count as a point mass
    :raises KindMismatch: ``m`` is non-deterministic
    """
    if m.kind == DETERMINISTIC:
        return ((m.payload, 1.0),)
    if m.kind == NON_DETERMINISTIC:
        raise KindMismatch("Expected a stochastic or deterministic container, "
                           "receives a nondeterministic one")
    return canonicalize(m).payload.entries


def is_empty(m: Container[Any]) -> bool:
    return m.kind != DETERMINISTIC and len(support(m)) == 0


def is_normalized(m: Container[Any]) -> bool:
    return m.kind != STOCHASTIC or cast(SimpleProb[Any], m.payload).is_normalized()


def first(pair: Tuple[A, Any]) -> A:
    return pair[0]


def render(m: Container[A], key: Callable[[A], str] = str) -> str:
    """
    Canonical text form: ``=v`` for deterministic, ``{v1,v2}`` for
    non-deterministic and ``{v1:p1,v2:p2}`` for stochastic containers,
    probabilities with 9 decimal digits.

    :param Container[A] m: container to render
    :param Callable[[A],str] key: renders a single value, defaults to str
    """
    if m.kind == DETERMINISTIC:
        return f"={key(m.payload)}"
    m = canonicalize(m)
    if m.kind == NON_DETERMINISTIC:
        return "{" + ",".join(key(v) for v in m.payload.members) + "}"
    return "{" + ",".join(f"{key(v)}:{p:.{PROB_DIGITS}f}" for v, p in m.payload.entries) + "}"


def _same_kind(kind: UncertaintyKind, m: Container[B]) -> Container[B]:
    if m.kind != kind:
        raise KindMismatch(f"Expected bind to produce a {kind} container, "
                           f"receives a {m.kind} container")
    return m


def _sorted_unique(values: Iterable[A]) -> Tuple[A, ...]:
    return tuple(sorted(set(values)))  # type: ignore


def _canonical_prob(entries: Iterable[Tuple[A, float]]) -> SimpleProb[A]:
    masses: Dict[A, float] = {}
    for v, p in entries:
        masses[v] = masses.get(v, 0.0) + p
    ordered = sorted(masses)  # type: ignore
    kept = tuple((v, masses[v]) for v in ordered if masses[v] != 0.0)
    # a negative mass is kept and leaves the result out of canonical form
    return SimpleProb(kept, canonical=all(p > 0.0 for _, p in kept))


__all__ = [
    "SimpleProb",
    "NonDetSet",
    "Membership",
    "Container",
    "single",
    "nondet",
    "distribution",
    "ret",
    "fmap",
    "bind",
    "contains",
    "all_true",
    "tag_members",
    "canonicalize",
    "support",
    "weighted",
    "is_empty",
    "is_normalized",
    "first",
    "render",
]
