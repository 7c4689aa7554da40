"""Finite sets in Q-linear spaces and their sumsets.

Elements are stored as integer rows ``coords / denominator`` over a basis
frame of a ring, or as plain rational vectors when ``frame`` is ``None``.
The decomposition routines work on the values ``p*x - q*y`` so that no
division by a dilation factor is ever needed; every certificate has the
cross-multiplied form ``q * (y - root) == p * sum(c * (x_i - x_j))``.
"""

from __future__ import annotations

import functools
import logging
import math
from collections import Counter, defaultdict, deque
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Union

import attrs
import numpy as np
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from distance_set_lab import exactnum
from distance_set_lab.exactnum import (
    RingElement,
    RingMismatchError,
    SymbolicRing,
)
from distance_set_lab.modelset import enumerate_T
from distance_set_lab.pointsets import (
    INT64_SAFE,
    Budget,
    int_dtype,
    max_abs,
)

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping, Sequence

    from numpy.typing import NDArray

    from distance_set_lab.exactnum import Frame, Ring, Scalar
    from distance_set_lab.modelset import ModelSetSpec

_logger = logging.getLogger(__name__)

Coefficient = Union[RingElement, int, Fraction]
Element = Union[RingElement, tuple[Fraction, ...]]
Terms = dict[tuple[int, int], int]

_HEADROOM = 8
DEFAULT_CHUNK = 1 << 20


class PreconditionError(ValueError):
    """A size hypothesis of a decomposition does not hold."""


class InvariantError(AssertionError):
    """A guaranteed property failed exact verification."""


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class FiniteSet:
    """Distinct elements as integer rows ``coords / denominator``.

    Rows are kept in lexicographic order, which is the element order used
    by every index in this module. ``frame`` is ``None`` for sets of
    rational vectors.
    """

    frame: Frame | None
    denominator: int
    coords: NDArray[Any]

    def __repr__(self) -> str:
        where = f"Q^{self.width}" if self.frame is None else repr(self.frame)
        return f"FiniteSet({len(self)} elements in {where})"

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def width(self) -> int:
        return int(self.coords.shape[1])

    @property
    def ring(self) -> Ring | None:
        return None if self.frame is None else self.frame.ring

    def element(self, i: int, /) -> Element:
        values = [Fraction(int(c), self.denominator) for c in self.coords[i]]
        if self.frame is None:
            return tuple(values)
        return self.frame.element(values)

    def elements(self) -> list[Element]:
        return [self.element(i) for i in range(len(self))]

    def __iter__(self) -> Iterator[Element]:
        return (self.element(i) for i in range(len(self)))

    def value_set(self) -> set[Element]:
        return set(self)

    def to_json(self) -> list[Any]:
        if self.frame is None:
            return [[str(c) for c in v] for v in self.elements()]
        return [
            a.to_json()  # type: ignore[union-attr]
            for a in self.elements()
        ]


def _unique_rows(rows: NDArray[Any], /) -> NDArray[Any]:
    if rows.dtype == object:
        unique = sorted(set(map(tuple, rows.tolist())))
        return np.array(unique, dtype=object).reshape(-1, rows.shape[1])
    return np.unique(rows, axis=0)


def _labels(rows: NDArray[Any], /) -> NDArray[np.int64]:
    """One integer label per row, equal exactly for equal rows."""
    if rows.dtype == object:
        seen: dict[tuple[Any, ...], int] = {}
        return np.array(
            [seen.setdefault(tuple(r), len(seen)) for r in rows.tolist()],
            dtype=np.int64,
        )
    _, inverse = np.unique(rows, axis=0, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64)


def _make(
    frame: Frame | None, denominator: int, coords: NDArray[Any], /
) -> FiniteSet:
    rows = _unique_rows(coords) if len(coords) else coords
    if rows.dtype == object:
        common = functools.reduce(
            math.gcd, rows.ravel().tolist(), denominator
        )
    else:
        common = math.gcd(int(np.gcd.reduce(rows.ravel())), denominator)
    if common > 1:
        rows = rows // common
        denominator //= common
    if rows.dtype == object and _HEADROOM * max_abs(rows) < INT64_SAFE:
        rows = rows.astype(np.int64)
    return FiniteSet(frame=frame, denominator=denominator, coords=rows)


def finite_set(
    elements: Iterable[RingElement | Scalar], /, *, ring: Ring | None = None
) -> FiniteSet:
    """Build a set from ring elements; bare rationals join ``ring``."""
    items = list(elements)
    if ring is None:
        ring = next(
            (a.ring for a in items if isinstance(a, RingElement)),
            exactnum.rationals(),
        )
    values: list[RingElement] = []
    for a in items:
        if not isinstance(a, RingElement):
            a = ring.constant(Fraction(a))  # noqa: PLW2901
        elif a.ring.key != ring.key:
            msg = f"{a} is not an element of {ring!r}"
            raise RingMismatchError(msg)
        values.append(a)
    frame = exactnum.frame_for(ring, values)
    rows = [frame.coords_of(a) for a in values]
    denominator = math.lcm(1, *(c.denominator for row in rows for c in row))
    numerators = [[int(c * denominator) for c in row] for row in rows]
    bound = max((abs(c) for row in numerators for c in row), default=0)
    coords = np.array(numerators, dtype=int_dtype(_HEADROOM * bound))
    return _make(frame, denominator, coords.reshape(len(rows), frame.size))


def vector_set(vectors: Iterable[Sequence[Scalar]], /) -> FiniteSet:
    rows = [[Fraction(c) for c in v] for v in vectors]
    widths = {len(row) for row in rows}
    if len(widths) > 1:
        msg = f"vectors of different lengths: {sorted(widths)}"
        raise ValueError(msg)
    width = widths.pop() if widths else 0
    denominator = math.lcm(1, *(c.denominator for row in rows for c in row))
    numerators = [[int(c * denominator) for c in row] for row in rows]
    bound = max((abs(c) for row in numerators for c in row), default=0)
    coords = np.array(numerators, dtype=int_dtype(_HEADROOM * bound))
    return _make(None, denominator, coords.reshape(len(rows), width))


def from_windowed(T: Any, /) -> FiniteSet:
    """A :class:`~distance_set_lab.modelset.WindowedSet` as a finite set."""
    return _make(T.frame, 1, np.asarray(T.coords))


def _check_same(A: FiniteSet, B: FiniteSet, /) -> None:
    if (A.frame is None) != (B.frame is None):
        msg = "cannot combine ring elements with rational vectors"
        raise RingMismatchError(msg)
    if A.frame is None:
        if A.width != B.width:
            msg = f"vector lengths differ: {A.width} and {B.width}"
            raise RingMismatchError(msg)
    elif A.frame.ring.key != B.frame.ring.key:  # type: ignore[union-attr]
        msg = f"sets live in different rings: {A.ring!r} and {B.ring!r}"
        raise RingMismatchError(msg)


def _align(
    sets: Sequence[FiniteSet], /
) -> tuple[Frame | None, int, list[NDArray[Any]]]:
    """Common frame, denominator and coordinate arrays for ``sets``."""
    frame = sets[0].frame
    if frame is not None:
        frame = functools.reduce(
            lambda a, b: a.union(b),
            (s.frame for s in sets),  # type: ignore[misc]
        )
    denominator = math.lcm(*(s.denominator for s in sets))
    bound = max(
        max_abs(s.coords) * (denominator // s.denominator) for s in sets
    )
    dtype = int_dtype(_HEADROOM * bound)
    arrays = []
    for s in sets:
        block = s.coords.astype(dtype) * (denominator // s.denominator)
        if frame is not None and s.frame is not None:
            shift = s.frame.low - frame.low
            if shift or s.width != frame.size:
                wide = np.zeros((len(s), frame.size), dtype=dtype)
                wide[:, shift : shift + s.width] = block
                block = wide
        arrays.append(block)
    return frame, denominator, arrays


def _as_element(ring: Ring, u: Coefficient, /) -> RingElement:
    if not isinstance(u, RingElement):
        return ring.constant(Fraction(u))
    if u.ring.key != ring.key:
        msg = f"{u} is not an element of {ring!r}"
        raise RingMismatchError(msg)
    return u


def _scaled(S: FiniteSet, u: Coefficient, /) -> FiniteSet:
    """``u * S`` row by row, order preserved and not deduplicated."""
    if S.frame is None:
        if isinstance(u, RingElement):
            msg = "rational vectors can only be scaled by rationals"
            raise RingMismatchError(msg)
        factor = Fraction(u)
        dtype = int_dtype(
            _HEADROOM * max_abs(S.coords) * abs(factor.numerator)
        )
        return FiniteSet(
            frame=None,
            denominator=S.denominator * factor.denominator,
            coords=S.coords.astype(dtype) * factor.numerator,
        )
    u = _as_element(S.frame.ring, u)
    rows, out = exactnum.multiplication_matrix(u, S.frame)
    scale = math.lcm(1, *(c.denominator for row in rows for c in row))
    entries = [[int(c * scale) for c in row] for row in rows]
    largest = max((abs(e) for row in entries for e in row), default=0)
    dtype = int_dtype(_HEADROOM * max_abs(S.coords) * largest * S.width)
    matrix = np.array(entries, dtype=dtype).reshape(out.size, S.width)
    return FiniteSet(
        frame=out,
        denominator=S.denominator * scale,
        coords=S.coords.astype(dtype) @ matrix.T,
    )


def _pair_rows(
    xs: NDArray[Any], ys: NDArray[Any], sign: int, /, *, chunk_size: int
) -> Iterator[NDArray[Any]]:
    """Distinct rows of ``x + sign*y`` over all pairs, block by block."""
    width = xs.shape[1]
    step = max(1, chunk_size // max(1, len(ys)))
    for start in range(0, len(xs), step):
        block = xs[start : start + step, None, :] + sign * ys[None, :, :]
        yield _unique_rows(block.reshape(-1, width))


def _collect(blocks: Iterable[NDArray[Any]], width: int, /) -> NDArray[Any]:
    parts = list(blocks)
    if not parts:
        return np.zeros((0, width), dtype=np.int64)
    if len(parts) == 1:
        return parts[0]
    dtype = object if any(p.dtype == object for p in parts) else np.int64
    return _unique_rows(np.concatenate([p.astype(dtype) for p in parts]))


def _pairwise(
    A: FiniteSet,
    B: FiniteSet,
    sign: int,
    /,
    *,
    budget: Budget | None,
    chunk_size: int,
    what: str,
) -> FiniteSet:
    _check_same(A, B)
    (budget or Budget()).check_pairs(len(A) * len(B), what=what)
    frame, denominator, (xs, ys) = _align([A, B])
    rows = _collect(
        _pair_rows(xs, ys, sign, chunk_size=chunk_size), xs.shape[1]
    )
    return _make(frame, denominator, rows)


def sum_set(
    A: FiniteSet,
    B: FiniteSet,
    /,
    *,
    budget: Budget | None = None,
    chunk_size: int = DEFAULT_CHUNK,
) -> FiniteSet:
    return _pairwise(
        A, B, 1, budget=budget, chunk_size=chunk_size, what="sumset"
    )


def diff_set(
    A: FiniteSet,
    B: FiniteSet,
    /,
    *,
    budget: Budget | None = None,
    chunk_size: int = DEFAULT_CHUNK,
) -> FiniteSet:
    return _pairwise(
        A, B, -1, budget=budget, chunk_size=chunk_size, what="difference set"
    )


def dilate(alpha: Coefficient, A: FiniteSet, /) -> FiniteSet:
    scaled = _scaled(A, alpha)
    return _make(scaled.frame, scaled.denominator, scaled.coords)


def combination_size(
    A: FiniteSet,
    alpha: Coefficient,
    B: FiniteSet,
    /,
    *,
    budget: Budget | None = None,
) -> int:
    """``|A - alpha*B|``."""
    return len(diff_set(A, dilate(alpha, B), budget=budget))


def _rank(rows: NDArray[Any], /) -> int:
    if not rows.size:
        return 0
    matrix = DomainMatrix(
        [[ZZ(int(c)) for c in row] for row in rows.tolist()],
        rows.shape,
        ZZ,
    )
    return int(matrix.convert_to(QQ).rank())


def qdim(A: FiniteSet, /) -> int:
    """Affine dimension of ``A`` over Q."""
    if not len(A):
        msg = "the dimension of an empty set is undefined"
        raise ValueError(msg)
    return _rank(A.coords[1:].astype(object) - A.coords[0].astype(object))


def element_rank(elements: Sequence[RingElement], /) -> int:
    """Linear rank over Q of ring elements, zero included or not."""
    S = finite_set(elements)
    return _rank(S.coords.astype(object))


# ---------------------------------------------------------------------------
# dimension bounds


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class RuzsaReport:
    small: int
    large: int
    sumset: int
    dimension: int
    bound: Fraction

    @property
    def passed(self) -> bool:
        return self.sumset >= self.bound

    @property
    def tight(self) -> bool:
        return self.sumset == self.bound


def ruzsa_bound(small: int, large: int, d: int, /) -> Fraction:
    return Fraction(large + d * small) - Fraction(d * (d + 1), 2)


def ruzsa_check(
    A: FiniteSet, B: FiniteSet, /, *, budget: Budget | None = None
) -> RuzsaReport:
    """``|A+B| >= |B| + d|A| - d(d+1)/2`` with ``d`` the dimension of A+B."""
    if len(A) > len(B):
        A, B = B, A
    total = sum_set(A, B, budget=budget)
    d = qdim(total)
    return RuzsaReport(
        small=len(A),
        large=len(B),
        sumset=len(total),
        dimension=d,
        bound=ruzsa_bound(len(A), len(B), d),
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class BoundReport:
    """One implication ``hypothesis => conclusion`` on one instance."""

    name: str
    doubling: Fraction
    hypothesis_met: bool
    conclusion: bool

    @property
    def passed(self) -> bool:
        return self.conclusion or not self.hypothesis_met


def doubling_dimension_check(
    A: FiniteSet, /, *, budget: Budget | None = None
) -> BoundReport:
    """Small doubling ``K <= sqrt|A|`` caps the dimension of A at K."""
    K = Fraction(len(sum_set(A, A, budget=budget)), len(A))
    return BoundReport(
        name="doubling-dimension",
        doubling=K,
        hypothesis_met=K * K <= len(A),
        conclusion=qdim(A) <= K,
    )


def _sum_constant(
    A: FiniteSet, B: FiniteSet, /, *, budget: Budget | None
) -> tuple[int, Fraction, FiniteSet]:
    N = min(len(A), len(B))
    total = sum_set(A, B, budget=budget)
    return N, Fraction(len(total), N), total


def plunnecke_check(
    A: FiniteSet, B: FiniteSet, /, *, budget: Budget | None = None
) -> BoundReport:
    """``|A+B| <= KN`` with ``N = min(|A|, |B|)`` gives ``|A+A| <= K^2|A|``."""
    _, K, _ = _sum_constant(A, B, budget=budget)
    doubled = len(sum_set(A, A, budget=budget))
    return BoundReport(
        name="plunnecke",
        doubling=K,
        hypothesis_met=K > 1,
        conclusion=doubled <= K * K * len(A),
    )


def sum_dimension_check(
    A: FiniteSet, B: FiniteSet, /, *, budget: Budget | None = None
) -> BoundReport:
    """``K^2(2K^2+1) < N`` forces the dimension of A+B down to K."""
    N, K, total = _sum_constant(A, B, budget=budget)
    return BoundReport(
        name="sum-dimension",
        doubling=K,
        hypothesis_met=K > 1 and K * K * (2 * K * K + 1) < N,
        conclusion=qdim(total) <= K,
    )


# ---------------------------------------------------------------------------
# coordinate transport


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class FreimanMap:
    """Linear coordinate transport onto the columns the sets actually use."""

    frame: Frame | None
    width: int
    denominator: int
    columns: tuple[int, ...]

    def __repr__(self) -> str:
        return f"FreimanMap({self.frame!r} -> Q^{len(self.columns)})"

    def apply(self, S: FiniteSet, /) -> FiniteSet:
        """Transport ``S``; it must live in the span the map was built on."""
        template = FiniteSet(
            frame=self.frame,
            denominator=self.denominator,
            coords=np.zeros((0, self.width), dtype=np.int64),
        )
        _check_same(template, S)
        frame, denominator, (_, rows) = _align([template, S])
        if frame is not None and frame != self.frame:
            msg = f"{S!r} reaches outside {self.frame!r}"
            raise ValueError(msg)
        dropped = [c for c in range(self.width) if c not in self.columns]
        if len(rows) and (rows[:, dropped] != 0).any():
            msg = f"{S!r} uses coordinates outside the transported span"
            raise ValueError(msg)
        return _make(None, denominator, rows[:, list(self.columns)])


def freiman_map(*sets: FiniteSet) -> FreimanMap:
    if not sets:
        msg = "at least one set is required"
        raise ValueError(msg)
    for other in sets[1:]:
        _check_same(sets[0], other)
    frame, denominator, arrays = _align(sets)
    used = np.zeros(arrays[0].shape[1], dtype=bool)
    for rows in arrays:
        if len(rows):
            used |= (rows != 0).any(axis=0).astype(bool)
    return FreimanMap(
        frame=frame,
        width=arrays[0].shape[1],
        denominator=denominator,
        columns=tuple(int(c) for c in np.flatnonzero(used)),
    )


def freiman_embed(A: FiniteSet, /) -> FiniteSet:
    return freiman_map(A).apply(A)


# ---------------------------------------------------------------------------
# decompositions


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class Certificate:
    """``q * (target - root) == p * sum(c * (source[i] - source[j]))``.

    ``target`` and ``root`` index the decomposed set; every ``(i, j, c)``
    in ``terms`` indexes the source set.
    """

    target: int
    root: int
    terms: tuple[tuple[int, int, int], ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "target": self.target,
            "root": self.root,
            "terms": [list(t) for t in self.terms],
        }


def _add_terms(
    into: Terms, terms: Iterable[tuple[int, int, int]], sign: int, /
) -> None:
    for i, j, c in terms:
        if i == j or not c:
            continue
        key, value = ((i, j), c) if i < j else ((j, i), -c)
        total = into.get(key, 0) + sign * value
        if total:
            into[key] = total
        else:
            into.pop(key, None)


def _frozen(terms: Terms, /) -> tuple[tuple[int, int, int], ...]:
    return tuple(sorted((i, j, c) for (i, j), c in terms.items()))


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class _Split:
    kept: tuple[int, ...]
    root: int
    components: int
    image_size: int
    total_image: int
    certificates: dict[int, Terms]


def _split(
    X: FiniteSet,
    p: Coefficient,
    Y: FiniteSet,
    q: Coefficient,
    /,
    *,
    budget: Budget | None,
) -> _Split:
    """Best component of the graph joining ``y1, y2`` on equal ``p*x - q*y``.

    Components minimize ``|S_j| / |Y_j|``, where ``S_j`` is the set of
    values ``p*x - q*y`` over ``y`` in the component; ties go to the larger
    component and then to the smaller first index.
    """
    _check_same(X, Y)
    if not len(X) or not len(Y):
        msg = "decomposition needs two nonempty sets"
        raise ValueError(msg)
    (budget or Budget()).check_pairs(len(X) * len(Y), what="decomposition")
    _, _, (xs, ys) = _align([_scaled(X, p), _scaled(Y, q)])
    values = (xs[:, None, :] - ys[None, :, :]).reshape(-1, xs.shape[1])
    labels = _labels(values)
    xi = np.repeat(np.arange(len(X)), len(Y))
    yi = np.tile(np.arange(len(Y)), len(X))
    order = np.argsort(labels, kind="stable")
    labels, xi, yi = labels[order], xi[order], yi[order]

    parent = list(range(len(Y)))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    adjacency: defaultdict[int, list[tuple[int, int, int]]] = defaultdict(
        list
    )
    same = labels[1:] == labels[:-1]
    for k in np.flatnonzero(same).tolist():
        y0, y1 = int(yi[k]), int(yi[k + 1])
        r0, r1 = find(y0), find(y1)
        if r0 == r1:
            continue
        parent[r1] = r0
        x0, x1 = int(xi[k]), int(xi[k + 1])
        # q * (y1 - y0) == p * (x1 - x0)
        adjacency[y0].append((y1, x1, x0))
        adjacency[y1].append((y0, x0, x1))

    roots = [find(y) for y in range(len(Y))]
    members: defaultdict[int, list[int]] = defaultdict(list)
    for y, r in enumerate(roots):
        members[r].append(y)
    starts = np.flatnonzero(np.concatenate(([True], ~same)))
    image = Counter(roots[int(yi[s])] for s in starts.tolist())
    best = min(
        members,
        key=lambda r: (
            Fraction(image[r], len(members[r])),
            -len(members[r]),
            members[r][0],
        ),
    )
    kept = members[best]
    root = kept[0]
    certificates: dict[int, Terms] = {root: {}}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w, plus, minus in adjacency[u]:
            if w in certificates:
                continue
            terms = dict(certificates[u])
            _add_terms(terms, [(plus, minus, 1)], 1)
            certificates[w] = terms
            queue.append(w)
    _logger.debug(
        "Graph on %d elements: %d components, kept %d with %d values",
        len(Y),
        len(members),
        len(kept),
        image[best],
    )
    return _Split(
        kept=tuple(kept),
        root=root,
        components=len(members),
        image_size=image[best],
        total_image=len(starts),
        certificates=certificates,
    )


def _subset(S: FiniteSet, indices: Sequence[int], /) -> FiniteSet:
    return FiniteSet(
        frame=S.frame,
        denominator=S.denominator,
        coords=S.coords[list(indices)],
    )


def _verify(
    certificate: Certificate,
    target: Sequence[Element],
    source: Sequence[Element],
    q: RingElement,
    p: RingElement,
    /,
) -> bool:
    head, tail = target[certificate.target], target[certificate.root]
    lhs = (head - tail) * q  # type: ignore[operator]
    total = q.ring.zero
    for i, j, c in certificate.terms:
        total = total + (source[i] - source[j]) * c  # type: ignore[operator]
    return bool(lhs == total * p)


def _ring_of(*sets: FiniteSet) -> Ring:
    for other in sets[1:]:
        _check_same(sets[0], other)
    ring = sets[0].ring
    if ring is None:
        msg = "decompositions need sets of ring elements"
        raise ValueError(msg)
    return ring


def _require(condition: bool, message: str, /) -> None:  # noqa: FBT001
    if not condition:
        raise InvariantError(message)


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class DecompositionResult:
    """A component ``B'`` of ``B`` with small ``|A - alpha*B'|``.

    Certificates read ``alpha * (b - root) == sum(c * (a_i - a_j))`` with
    ``b`` and ``root`` indexing ``kept`` and ``a_i, a_j`` indexing ``A``.
    """

    kept: FiniteSet
    kept_indices: tuple[int, ...]
    """Positions of ``kept`` inside ``B``."""
    bound: Fraction
    source_size: int
    image_size: int
    components: int
    certificates: tuple[Certificate, ...]

    def __repr__(self) -> str:
        return (
            f"DecompositionResult(|B'|={len(self.kept)},"
            f" |A-aB'|={self.image_size}, K={self.bound})"
        )

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.image_size, len(self.kept))

    def to_json(self) -> dict[str, Any]:
        return {
            "kept": self.kept.to_json(),
            "kept_indices": list(self.kept_indices),
            "bound": str(self.bound),
            "source_size": self.source_size,
            "image_size": self.image_size,
            "components": self.components,
            "certificates": [c.to_json() for c in self.certificates],
        }


def _check_hypothesis(
    size: int, bound: Fraction, scale: int, label: str, /
) -> None:
    if size > bound * scale:
        msg = f"{label} = {size} exceeds {bound} * {scale}"
        raise PreconditionError(msg)


def dilation_extract(
    A: FiniteSet,
    B: FiniteSet,
    alpha: Coefficient,
    K: Fraction | int,
    /,
    *,
    budget: Budget | None = None,
) -> DecompositionResult:
    """Component ``B'`` of ``B`` with ``|A - aB'| <= K|B'|, |B'| >= |A|/K``.

    Raises:
        PreconditionError: ``|A - alpha*B| > K|B|``.
        InvariantError: a guarantee failed exact verification.
    """
    K = Fraction(K)
    ring = _ring_of(A, B)
    alpha = _as_element(ring, alpha)
    _check_hypothesis(
        combination_size(A, alpha, B, budget=budget), K, len(B), "|A - aB|"
    )
    split = _split(A, 1, B, alpha, budget=budget)
    kept = _subset(B, split.kept)
    image = combination_size(A, alpha, kept, budget=budget)
    _require(image == split.image_size, "component image size mismatch")
    _require(image <= K * len(kept), f"|A - aB'| = {image} > K|B'|")
    _require(len(kept) * K >= len(A), f"|B'| = {len(kept)} < |A|/K")

    local = {y: i for i, y in enumerate(split.kept)}
    certificates = tuple(
        Certificate(
            target=local[y],
            root=local[split.root],
            terms=_frozen(split.certificates[y]),
        )
        for y in split.kept
    )
    kept_elements, source = kept.elements(), A.elements()
    for certificate in certificates:
        _require(
            _verify(certificate, kept_elements, source, alpha, ring.one),
            f"certificate for element {certificate.target} does not verify",
        )
    return DecompositionResult(
        kept=kept,
        kept_indices=split.kept,
        bound=K,
        source_size=len(A),
        image_size=image,
        components=split.components,
        certificates=certificates,
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class _PairStep:
    a_kept: tuple[int, ...]
    b_kept: tuple[int, ...]
    a_root: int
    certificates: dict[int, Terms]
    """``alpha1 * (a - a_root) == alpha2 * sum(c * (a_i - a_j))``."""


def _pair_step(
    A: FiniteSet,
    B: FiniteSet,
    alpha1: RingElement,
    alpha2: RingElement,
    /,
    *,
    budget: Budget | None,
) -> _PairStep:
    first = _split(A, 1, B, alpha1, budget=budget)
    b_kept = _subset(B, first.kept)
    # a1 - a2 == alpha2 * (b1 - b2) joins a1 and a2
    second = _split(b_kept, alpha2, A, 1, budget=budget)
    certificates: dict[int, Terms] = {}
    for a, terms in second.certificates.items():
        combined: Terms = {}
        for (i, j), c in terms.items():
            _add_terms(combined, _expand(first, first.kept[i]), c)
            _add_terms(combined, _expand(first, first.kept[j]), -c)
        certificates[a] = combined
    return _PairStep(
        a_kept=second.kept,
        b_kept=first.kept,
        a_root=second.root,
        certificates=certificates,
    )


def _expand(split: _Split, y: int, /) -> list[tuple[int, int, int]]:
    return [(i, j, c) for (i, j), c in split.certificates[y].items()]


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class ChainLevel:
    """``A_j`` and ``B_j`` with certificates over the original ``A``.

    Each certificate reads
    ``alpha1**j * (a - root) == alpha2**j * sum(c * (a_i - a_j))``.
    """

    depth: int
    a_set: FiniteSet
    b_set: FiniteSet
    a_indices: tuple[int, ...]
    """Positions of ``a_set`` inside the original ``A``."""
    b_indices: tuple[int, ...]
    root: int
    first_image: int
    """``|A_j - alpha1*B_j|``."""
    second_image: int
    """``|A_j - alpha2*B_j|``."""
    certificates: tuple[Certificate, ...]

    def __repr__(self) -> str:
        return (
            f"ChainLevel(j={self.depth}, |A_j|={len(self.a_set)},"
            f" |B_j|={len(self.b_set)})"
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "depth": self.depth,
            "a_indices": list(self.a_indices),
            "b_indices": list(self.b_indices),
            "root": self.root,
            "first_image": self.first_image,
            "second_image": self.second_image,
            "certificates": [c.to_json() for c in self.certificates],
        }


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class ChainResult:
    bound: Fraction
    source_size: int
    levels: tuple[ChainLevel, ...]

    def __repr__(self) -> str:
        sizes = [len(level.a_set) for level in self.levels]
        return f"ChainResult(K={self.bound}, sizes={sizes})"

    @property
    def last(self) -> ChainLevel:
        return self.levels[-1]

    def to_json(self) -> dict[str, Any]:
        return {
            "bound": str(self.bound),
            "source_size": self.source_size,
            "levels": [level.to_json() for level in self.levels],
        }


def _check_pair_hypotheses(
    A: FiniteSet,
    B: FiniteSet,
    alpha1: RingElement,
    alpha2: RingElement,
    K: Fraction,
    /,
    *,
    budget: Budget | None,
) -> tuple[int, int]:
    first = combination_size(A, alpha1, B, budget=budget)
    second = combination_size(A, alpha2, B, budget=budget)
    _check_hypothesis(first, K, len(B), "|A - a1*B|")
    _check_hypothesis(second, K, len(A), "|A - a2*B|")
    return first, second


def _level(
    depth: int,
    A: FiniteSet,
    B: FiniteSet,
    a_indices: Sequence[int],
    b_indices: Sequence[int],
    root: int,
    certificates: Mapping[int, Terms],
    factors: tuple[RingElement, RingElement, Fraction],
    /,
    *,
    budget: Budget | None,
) -> ChainLevel:
    alpha1, alpha2, K = factors
    a_set, b_set = _subset(A, a_indices), _subset(B, b_indices)
    first = combination_size(a_set, alpha1, b_set, budget=budget)
    second = combination_size(a_set, alpha2, b_set, budget=budget)
    _require(
        first <= K * len(b_set),
        f"level {depth}: |A_j - a1*B_j| = {first} > K|B_j|",
    )
    _require(
        second <= K * len(a_set),
        f"level {depth}: |A_j - a2*B_j| = {second} > K|A_j|",
    )
    _require(
        len(a_set) * K ** (2 * depth) >= len(A),
        f"level {depth}: |A_j| = {len(a_set)} below |A|/K^(2j)",
    )
    local = {a: i for i, a in enumerate(a_indices)}
    result = tuple(
        Certificate(
            target=local[a], root=local[root], terms=_frozen(certificates[a])
        )
        for a in a_indices
    )
    source = A.elements()
    target = a_set.elements()
    q, p = alpha1**depth, alpha2**depth
    for certificate in result:
        _require(
            _verify(certificate, target, source, q, p),
            f"level {depth}: certificate for element"
            f" {certificate.target} does not verify",
        )
    return ChainLevel(
        depth=depth,
        a_set=a_set,
        b_set=b_set,
        a_indices=tuple(a_indices),
        b_indices=tuple(b_indices),
        root=local[root],
        first_image=first,
        second_image=second,
        certificates=result,
    )


def iterate_decompose(
    A: FiniteSet,
    B: FiniteSet,
    alpha1: Coefficient,
    alpha2: Coefficient,
    K: Fraction | int,
    depth: int,
    /,
    *,
    budget: Budget | None = None,
) -> ChainResult:
    """Nested ``A_j, B_j`` with ``|A_j| >= |A|/K^(2j)`` for ``j <= depth``.

    Raises:
        PreconditionError: ``|A - a1*B| > K|B|`` or ``|A - a2*B| > K|A|``.
        InvariantError: a level failed exact verification.
    """
    if depth < 0:
        msg = f"depth must be nonnegative, got {depth}"
        raise ValueError(msg)
    K = Fraction(K)
    ring = _ring_of(A, B)
    alpha1, alpha2 = _as_element(ring, alpha1), _as_element(ring, alpha2)
    _check_pair_hypotheses(A, B, alpha1, alpha2, K, budget=budget)

    a_indices = tuple(range(len(A)))
    b_indices = tuple(range(len(B)))
    root = 0
    certificates: dict[int, Terms] = {}
    for a in a_indices:
        certificates[a] = {}
        _add_terms(certificates[a], [(a, root, 1)], 1)
    levels = [
        _level(
            0,
            A,
            B,
            a_indices,
            b_indices,
            root,
            certificates,
            (alpha1, alpha2, K),
            budget=budget,
        )
    ]
    for j in range(1, depth + 1):
        previous = levels[-1]
        step = _pair_step(
            previous.a_set, previous.b_set, alpha1, alpha2, budget=budget
        )
        composed: dict[int, Terms] = {}
        for local_a, terms in step.certificates.items():
            merged: Terms = {}
            for (i, k), c in terms.items():
                for index, sign in ((i, c), (k, -c)):
                    _add_terms(
                        merged,
                        [
                            (u, v, w)
                            for (u, v), w in certificates[
                                a_indices[index]
                            ].items()
                        ],
                        sign,
                    )
            composed[a_indices[local_a]] = merged
        root = a_indices[step.a_root]
        a_indices = tuple(a_indices[i] for i in step.a_kept)
        b_indices = tuple(b_indices[i] for i in step.b_kept)
        certificates = composed
        levels.append(
            _level(
                j,
                A,
                B,
                a_indices,
                b_indices,
                root,
                certificates,
                (alpha1, alpha2, K),
                budget=budget,
            )
        )
        _logger.info(
            "Chain level %d: |A_j| = %d, |B_j| = %d",
            j,
            len(a_indices),
            len(b_indices),
        )
    return ChainResult(bound=K, source_size=len(A), levels=tuple(levels))


def pair_decompose(
    A: FiniteSet,
    B: FiniteSet,
    alpha1: Coefficient,
    alpha2: Coefficient,
    K: Fraction | int,
    /,
    *,
    budget: Budget | None = None,
) -> ChainLevel:
    """Subsets ``A' of A``, ``B' of B`` after one refinement step.

    ``|A - a1*B'| <= K|B'|``, ``|A' - a2*B'| <= K|A'|`` and
    ``|A'| >= |A|/K^2`` all hold on return.
    """
    K = Fraction(K)
    level = iterate_decompose(A, B, alpha1, alpha2, K, 1, budget=budget).last
    ring = _ring_of(A, B)
    b_kept = _subset(B, level.b_indices)
    image = combination_size(A, _as_element(ring, alpha1), b_kept)
    _require(image <= K * len(b_kept), f"|A - a1*B'| = {image} > K|B'|")
    return level


# ---------------------------------------------------------------------------
# transcendental dilations


def proportional(u: RingElement, v: RingElement, /) -> bool:
    """Whether ``u / v`` is rational."""
    if u.is_zero or v.is_zero:
        return u.is_zero and v.is_zero
    if isinstance(u.ring, SymbolicRing):
        if u.valuation != v.valuation:
            return False
        return bool(u == v * (u.coords[0] / v.coords[0]))
    return not any((u / v).coords[1:])


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class DimensionReport:
    size: int
    bound: Fraction
    depth: int
    hypothesis_met: bool
    dimension: int
    witness_rank: int | None = None
    """Rank of ``a1**j * a2**(d-j) * (x - y)`` for two chain survivors."""
    chain: ChainResult | None = None

    def __repr__(self) -> str:
        return (
            f"DimensionReport(|A|={self.size}, d={self.depth},"
            f" dim={self.dimension}, passed={self.passed})"
        )

    @property
    def passed(self) -> bool:
        if not self.hypothesis_met:
            return True
        return self.dimension > self.depth and (
            self.witness_rank is None or self.witness_rank == self.depth + 1
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "size": self.size,
            "bound": str(self.bound),
            "depth": self.depth,
            "hypothesis_met": self.hypothesis_met,
            "dimension": self.dimension,
            "witness_rank": self.witness_rank,
            "passed": self.passed,
        }


def dilation_dimension_check(
    A: FiniteSet,
    B: FiniteSet,
    alpha1: RingElement,
    alpha2: RingElement,
    K: Fraction | int,
    d: int,
    /,
    *,
    budget: Budget | None = None,
) -> DimensionReport:
    """Large ``A`` under both dilation hypotheses has dimension above d.

    The ratio ``alpha1 / alpha2`` must be transcendental, which in the
    symbolic ring means the two factors are not proportional.
    """
    K = Fraction(K)
    ring = _ring_of(A, B)
    if not isinstance(ring, SymbolicRing):
        msg = "a transcendental ratio needs the symbolic ring"
        raise ValueError(msg)
    alpha1, alpha2 = _as_element(ring, alpha1), _as_element(ring, alpha2)
    if proportional(alpha1, alpha2):
        msg = f"{alpha1} / {alpha2} is rational"
        raise ValueError(msg)
    _check_pair_hypotheses(A, B, alpha1, alpha2, K, budget=budget)
    dimension = qdim(A)
    hypothesis_met = len(A) > K ** (2 * d)
    if not hypothesis_met:
        return DimensionReport(
            size=len(A),
            bound=K,
            depth=d,
            hypothesis_met=False,
            dimension=dimension,
        )
    chain = iterate_decompose(A, B, alpha1, alpha2, K, d, budget=budget)
    survivors = chain.last.a_set
    _require(len(survivors) > 1, "chain ended with a single element")
    gap = survivors.element(1) - survivors.element(0)  # type: ignore[operator]
    witness = [alpha1**j * alpha2 ** (d - j) * gap for j in range(d + 1)]
    return DimensionReport(
        size=len(A),
        bound=K,
        depth=d,
        hypothesis_met=True,
        dimension=dimension,
        witness_rank=element_rank(witness),
        chain=chain,
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class GrowthRow:
    family: str
    size: int
    difference: int
    """``|A - alpha*A|``."""

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.difference, self.size)


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class GrowthScan:
    rows: tuple[GrowthRow, ...]
    warmup: int

    def minima(self) -> list[tuple[int, Fraction]]:
        """Smallest ratio at each size, by increasing size."""
        best: dict[int, Fraction] = {}
        for row in self.rows:
            if row.size not in best or row.ratio < best[row.size]:
                best[row.size] = row.ratio
        return sorted(best.items())

    @property
    def nondecreasing(self) -> bool:
        ratios = [r for size, r in self.minima() if size > self.warmup]
        return all(a <= b for a, b in zip(ratios, ratios[1:]))


def progression(n: int, /, *, ring: Ring | None = None) -> FiniteSet:
    """``{0, 1, ..., n}``."""
    return finite_set(range(n + 1), ring=ring or exactnum.symbolic_ring())


def digit_set(
    digits: int, terms: int, /, *, ring: SymbolicRing | None = None
) -> FiniteSet:
    """``{e_0 + e_1*x + ... : 0 <= e_i < digits}`` with ``terms`` powers."""
    ring = ring or exactnum.symbolic_ring()
    grid = np.indices((digits,) * terms).reshape(terms, -1).T
    return _make(exactnum.Frame(ring=ring, low=0, size=terms), 1, grid)


def dilation_growth_scan(
    families: Mapping[str, Iterable[FiniteSet]],
    alpha: Coefficient | None = None,
    /,
    *,
    warmup: int = 4,
    budget: Budget | None = None,
) -> GrowthScan:
    """``|A - alpha*A|`` over set families; ``alpha`` defaults to ``x``."""
    rows = []
    for name, sets in families.items():
        for A in sets:
            factor = alpha
            if factor is None:
                ring = A.ring
                if not isinstance(ring, SymbolicRing):
                    msg = "the default dilation needs the symbolic ring"
                    raise ValueError(msg)
                factor = ring.gen
            rows.append(
                GrowthRow(
                    family=name,
                    size=len(A),
                    difference=combination_size(
                        A, factor, A, budget=budget
                    ),
                )
            )
            _logger.debug(
                "%s: |A| = %d, |A - aA| = %d",
                name,
                rows[-1].size,
                rows[-1].difference,
            )
    return GrowthScan(rows=tuple(rows), warmup=warmup)


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class ContrastReport:
    radii: tuple[Fraction, ...]
    rows: tuple[GrowthRow, ...]
    tolerance: float

    @property
    def constants(self) -> list[float]:
        return [float(row.ratio) for row in self.rows]

    @property
    def stable(self) -> bool:
        values = self.constants
        if not values or min(values) <= 0:
            return False
        return max(values) <= (1 + self.tolerance) * min(values)


def algebraic_contrast(
    spec: ModelSetSpec,
    alpha: RingElement,
    radii: Iterable[Fraction | int],
    /,
    *,
    tolerance: float = 0.25,
    budget: Budget | None = None,
) -> ContrastReport:
    """``|T - alpha*T| / |T|`` on windows of a model set."""
    radii = tuple(Fraction(r) for r in radii)
    rows = []
    for R in radii:
        A = from_windowed(enumerate_T(spec, R, budget=budget))
        rows.append(
            GrowthRow(
                family=f"T(R={R})",
                size=len(A),
                difference=combination_size(A, alpha, A, budget=budget),
            )
        )
        _logger.info(
            "Window R=%s: |A| = %d, |A - aA| = %d",
            R,
            rows[-1].size,
            rows[-1].difference,
        )
    return ContrastReport(radii=radii, rows=tuple(rows), tolerance=tolerance)


# ---------------------------------------------------------------------------
# randomized suites


def random_set(
    rng: np.random.Generator,
    /,
    *,
    size: int,
    dim: int,
    spread: int = 2,
    ring: SymbolicRing | None = None,
) -> FiniteSet:
    """At most ``size`` polynomials of degree below ``dim``."""
    ring = ring or exactnum.symbolic_ring()
    rows = rng.integers(-spread, spread + 1, size=(size, dim))
    return _make(
        exactnum.Frame(ring=ring, low=0, size=dim), 1, rows.astype(np.int64)
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class SuiteReport:
    name: str
    trials: int
    applicable: int
    """Trials whose hypothesis held."""
    failures: tuple[str, ...]

    def __repr__(self) -> str:
        return (
            f"SuiteReport({self.name}: {self.trials} trials,"
            f" {len(self.failures)} failures)"
        )

    @property
    def passed(self) -> bool:
        return not self.failures

    def merge(self, other: SuiteReport, /) -> SuiteReport:
        return SuiteReport(
            name=self.name,
            trials=self.trials + other.trials,
            applicable=self.applicable + other.applicable,
            failures=self.failures + other.failures,
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "trials": self.trials,
            "applicable": self.applicable,
            "failures": list(self.failures),
            "passed": self.passed,
        }


def _sizes(rng: np.random.Generator, high: int, /) -> tuple[int, int]:
    return int(rng.integers(1, high + 1)), int(rng.integers(1, high + 1))


def ruzsa_suite(
    trials: int,
    /,
    *,
    seed: int = 0,
    max_size: int = 12,
    dim: int = 3,
) -> SuiteReport:
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        m, n = _sizes(rng, max_size)
        A = random_set(rng, size=m, dim=dim)
        B = random_set(rng, size=n, dim=dim)
        report = ruzsa_check(A, B)
        if not report.passed:
            failures.append(
                f"seed {seed} trial {trial}: |A+B| = {report.sumset}"
                f" < {report.bound}"
            )
    return SuiteReport(
        name="ruzsa",
        trials=trials,
        applicable=trials,
        failures=tuple(failures),
    )


def freiman_suite(
    trials: int, /, *, seed: int = 0, max_size: int = 10
) -> SuiteReport:
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        m, n = _sizes(rng, max_size)
        dim = int(rng.integers(1, 5))
        A = random_set(rng, size=m, dim=dim, spread=3)
        B = random_set(rng, size=n, dim=dim, spread=3)
        transport = freiman_map(A, B)
        A2, B2 = transport.apply(A), transport.apply(B)
        pairs = {
            "A+B": (len(sum_set(A, B)), len(sum_set(A2, B2))),
            "A-B": (len(diff_set(A, B)), len(diff_set(A2, B2))),
            "A+A+A": (
                len(sum_set(sum_set(A, A), A)),
                len(sum_set(sum_set(A2, A2), A2)),
            ),
        }
        failures.extend(
            f"seed {seed} trial {trial}: {name} {before} -> {after}"
            for name, (before, after) in pairs.items()
            if before != after
        )
    return SuiteReport(
        name="freiman",
        trials=trials,
        applicable=trials,
        failures=tuple(failures),
    )


def consequence_suite(
    trials: int, /, *, seed: int = 0, max_size: int = 40
) -> SuiteReport:
    """Dimension caps implied by small doubling on random structured sets."""
    rng = np.random.default_rng(seed)
    failures = []
    applicable = 0
    for trial in range(trials):
        dim = int(rng.integers(1, 4))
        spread = int(rng.integers(1, 4))
        size = int(rng.integers(2, max_size + 1))
        A = random_set(rng, size=size, dim=dim, spread=spread)
        B = random_set(rng, size=size, dim=dim, spread=spread)
        for report in (
            doubling_dimension_check(A),
            plunnecke_check(A, B),
            sum_dimension_check(A, B),
        ):
            applicable += report.hypothesis_met
            if not report.passed:
                failures.append(
                    f"seed {seed} trial {trial}: {report.name} fails"
                    f" at K = {report.doubling}"
                )
    return SuiteReport(
        name="consequences",
        trials=trials,
        applicable=applicable,
        failures=tuple(failures),
    )


def _measured(
    A: FiniteSet, B: FiniteSet, alpha1: RingElement, alpha2: RingElement, /
) -> Fraction:
    """Smallest K satisfying both dilation hypotheses."""
    return max(
        Fraction(combination_size(A, alpha1, B), len(B)),
        Fraction(combination_size(A, alpha2, B), len(A)),
    )


def decomposition_suite(
    trials: int, /, *, seed: int = 0, max_size: int = 10
) -> SuiteReport:
    """Decompositions and chains on random sets with measured K."""
    rng = np.random.default_rng(seed)
    ring = exactnum.symbolic_ring()
    x = ring.gen
    factors = (x, x + 1, ring.constant(2), x * x, x ** (-1))
    failures = []
    for trial in range(trials):
        m, n = _sizes(rng, max_size)
        A = random_set(rng, size=m, dim=2, spread=1)
        B = random_set(rng, size=n, dim=2, spread=1)
        i, j = rng.choice(len(factors), size=2, replace=False)
        alpha1, alpha2 = factors[int(i)], factors[int(j)]
        K = _measured(A, B, alpha1, alpha2)
        try:
            dilation_extract(
                A, B, alpha1, Fraction(combination_size(A, alpha1, B), len(B))
            )
            iterate_decompose(A, B, alpha1, alpha2, K, 2)
            if not proportional(alpha1, alpha2):
                d = _largest_depth(len(A), K)
                report = dilation_dimension_check(A, B, alpha1, alpha2, K, d)
                if not report.passed:
                    failures.append(f"seed {seed} trial {trial}: {report!r}")
        except InvariantError as e:
            failures.append(f"seed {seed} trial {trial}: {e}")
    return SuiteReport(
        name="decomposition",
        trials=trials,
        applicable=trials,
        failures=tuple(failures),
    )


def _largest_depth(size: int, K: Fraction, /) -> int:
    """Largest ``d`` with ``size > K**(2d)``, capped at 3."""
    d = 0
    while d < 3 and size > K ** (2 * (d + 1)):  # noqa: PLR2004
        d += 1
    return d


SUITES = {
    "ruzsa": ruzsa_suite,
    "freiman": freiman_suite,
    "consequences": consequence_suite,
    "decomposition": decomposition_suite,
}
