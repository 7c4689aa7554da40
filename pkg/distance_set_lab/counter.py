from __future__ import annotations


class Tally:
    __slots__ = ("_failed", "_passed")

    def __init__(self) -> None:
        self._passed = 0
        self._failed = 0

    @property
    def passed(self) -> int:
        return self._passed

    @property
    def failed(self) -> int:
        return self._failed

    @property
    def total(self) -> int:
        return self._passed + self._failed

    def record(self, *, ok: bool) -> None:
        if ok:
            self._passed += 1
        else:
            self._failed += 1
