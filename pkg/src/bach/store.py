"""The shared space: a multiset of ground si-terms.

Stores are values.  Every primitive returns a new store and leaves the
receiver untouched, so a search branch can keep its snapshot around
without copying defensively.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .errors import NonGroundTermError
from .term import SiTerm, render


def _check_ground(t: SiTerm) -> None:
    if not t.ground:
        raise NonGroundTermError(f"store operations need ground terms, got {render(t)}")


class Store:
    """Immutable multiset of ground terms (term -> positive count)."""

    __slots__ = ("_counts", "_hash")

    def __init__(self, terms: Iterable[SiTerm] = ()):
        counts: dict = {}
        for t in terms:
            _check_ground(t)
            counts[t] = counts.get(t, 0) + 1
        self._counts = counts
        self._hash = None

    @classmethod
    def _from_counts(cls, counts: dict) -> "Store":
        s = cls.__new__(cls)
        s._counts = counts
        s._hash = None
        return s

    @classmethod
    def from_counts(cls, counts) -> "Store":
        clean = {}
        for t, n in dict(counts).items():
            _check_ground(t)
            if n < 0:
                raise ValueError(f"negative count for {render(t)}")
            if n:
                clean[t] = n
        return cls._from_counts(clean)

    # -- primitives ---------------------------------------------------------

    def tell(self, t: SiTerm) -> "Store":
        _check_ground(t)
        counts = dict(self._counts)
        counts[t] = counts.get(t, 0) + 1
        return Store._from_counts(counts)

    def ask(self, t: SiTerm) -> bool:
        _check_ground(t)
        return t in self._counts

    def get(self, t: SiTerm) -> Optional["Store"]:
        """Remove one occurrence; ``None`` when *t* is absent (blocked)."""
        _check_ground(t)
        n = self._counts.get(t, 0)
        if n == 0:
            return None
        counts = dict(self._counts)
        if n == 1:
            del counts[t]
        else:
            counts[t] = n - 1
        return Store._from_counts(counts)

    def nask(self, t: SiTerm) -> bool:
        _check_ground(t)
        return t not in self._counts

    def count(self, t: SiTerm) -> int:
        _check_ground(t)
        return self._counts.get(t, 0)

    # -- value protocol -----------------------------------------------------

    def items(self):
        return self._counts.items()

    def __iter__(self) -> Iterator[SiTerm]:
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def __contains__(self, t):
        return t in self._counts

    def size(self) -> int:
        """Total number of occurrences."""
        return sum(self._counts.values())

    def __eq__(self, other):
        if not isinstance(other, Store):
            return NotImplemented
        return self._counts == other._counts

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def sorted_entries(self) -> list[tuple[str, int]]:
        return sorted((render(t), n) for t, n in self._counts.items())

    def dump(self) -> str:
        """One ``term : count`` line per entry, sorted by rendering."""
        return "\n".join(f"{r} : {n}" for r, n in self.sorted_entries())

    def __repr__(self):
        inner = ", ".join(f"{r}: {n}" for r, n in self.sorted_entries())
        return f"Store({{{inner}}})"


EMPTY_STORE = Store()


def tell(s: Store, t: SiTerm) -> Store:
    return s.tell(t)


def ask(s: Store, t: SiTerm) -> bool:
    return s.ask(t)


def get(s: Store, t: SiTerm) -> Optional[Store]:
    return s.get(t)


def nask(s: Store, t: SiTerm) -> bool:
    return s.nask(t)


def count(s: Store, t: SiTerm) -> int:
    return s.count(t)
