"""Set systems over a ground set [n] and their twist/complementation calculus.

A set system is a ground size ``n`` together with a family of feasible
subsets of ``{1, .., n}``.  Subsets are encoded as bit masks (element ``i``
is bit ``i - 1``), so every operation below is a handful of integer ops on
small sets of masks.  Ground sizes are capped at 16; the exhaustive
routines elsewhere in the package are exponential in ``n`` and 16 already
exceeds every scale they are meant for.

Operations:

* ``twist(D, I)`` replaces every feasible ``X`` by ``X symdiff I``.
* ``loop_complement(D, I)`` keeps ``X`` feasible iff the number of feasible
  ``Y`` with ``X \\ I <= Y <= X`` is odd.
* ``dual_twist(D, I)`` keeps ``X`` feasible iff the number of feasible
  ``Y`` with ``X <= Y <= X | I`` is odd.

The two parity rules are implemented directly (not by iterating the
single-element operations); agreement with sequential single-element
application is a tested property, not an implementation shortcut.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .errors import BudgetError, ValidationError

MAX_GROUND = 16

#: default cap on the ground size of the vf-safe closure search
VF_SAFE_DEFAULT_CAP = 10

# relabel-quotient cache keys are only worth computing for tiny n
_RELABEL_KEY_CAP = 4


def mask_of(members: Iterable[int], n: int) -> int:
    """Encode a subset of [n] as a bit mask, rejecting junk and duplicates."""
    mask = 0
    for i in members:
        if not isinstance(i, int) or isinstance(i, bool):
            raise ValidationError(f"element {i!r} is not an integer")
        if not 1 <= i <= n:
            raise ValidationError(f"element {i} out of range 1..{n}")
        bit = 1 << (i - 1)
        if mask & bit:
            raise ValidationError(f"duplicate element {i}")
        mask |= bit
    return mask


def members_of(mask: int) -> tuple[int, ...]:
    """Decode a bit mask into the ascending tuple of its elements."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def shortlex_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Sort key ordering subsets by cardinality, then lexicographically."""
    return (mask.bit_count(), members_of(mask))


class SetSystem:
    """An immutable family of feasible subsets of ``{1, .., n}``.

    Two systems are equal iff they have the same ground size and the same
    family.  The family is deduplicated on construction; serialization
    always lists each set in ascending order and the family in canonical
    (cardinality, then lexicographic) order.
    """

    __slots__ = ("n", "masks", "_mask_set")

    def __init__(self, n: int, masks: Iterable[int] = ()):
        if not isinstance(n, int) or isinstance(n, bool) or not 0 <= n <= MAX_GROUND:
            raise ValidationError(f"ground size must be an integer in 0..{MAX_GROUND}, got {n!r}")
        mask_set = frozenset(masks)
        full = (1 << n) - 1
        for m in mask_set:
            if not isinstance(m, int) or m < 0 or m & ~full:
                raise ValidationError(f"mask {m!r} does not encode a subset of [{n}]")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_mask_set", mask_set)
        object.__setattr__(self, "masks", tuple(sorted(mask_set)))

    def __setattr__(self, name, value):
        raise AttributeError("SetSystem is immutable")

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetSystem":
        return cls(n, (mask_of(s, n) for s in sets))

    @property
    def is_proper(self) -> bool:
        return bool(self._mask_set)

    @property
    def is_normal(self) -> bool:
        return 0 in self._mask_set

    def has_mask(self, mask: int) -> bool:
        return mask in self._mask_set

    def mask_set(self) -> frozenset[int]:
        return self._mask_set

    def feasible_sets(self) -> tuple[tuple[int, ...], ...]:
        """The family in canonical order, each set as an ascending tuple."""
        return tuple(members_of(m) for m in sorted(self._mask_set, key=shortlex_key))

    def canonical_key(self):
        """Total-order key for sorting collections of systems."""
        return (self.n, tuple(sorted(shortlex_key(m) for m in self._mask_set)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetSystem):
            return NotImplemented
        return self.n == other.n and self._mask_set == other._mask_set

    def __hash__(self) -> int:
        return hash((self.n, self._mask_set))

    def __repr__(self) -> str:
        fam = ", ".join("{" + ",".join(map(str, s)) + "}" for s in self.feasible_sets())
        return f"SetSystem({self.n}, [{fam}])"

    def to_json(self) -> dict:
        return {"n": self.n, "feasible": [list(s) for s in self.feasible_sets()]}

    @classmethod
    def from_json(cls, data: dict) -> "SetSystem":
        """Parse the canonical file format, rejecting duplicate sets."""
        if not isinstance(data, dict) or "n" not in data or "feasible" not in data:
            raise ValidationError("set-system object needs 'n' and 'feasible'")
        n = data["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValidationError("'n' must be an integer")
        fam = data["feasible"]
        if not isinstance(fam, list):
            raise ValidationError("'feasible' must be a list of lists")
        masks = []
        for s in fam:
            if not isinstance(s, list):
                raise ValidationError("each feasible set must be a list")
            masks.append(mask_of(s, n if 0 <= n <= MAX_GROUND else 0))
        if len(set(masks)) != len(masks):
            raise ValidationError("duplicate feasible sets")
        return cls(n, masks)


@dataclass(frozen=True)
class DeltaMatroidWitness:
    """Outcome of the symmetric-exchange check.

    When ``valid`` is false and ``reason`` is ``"exchange"``, the triple
    ``(X, Y, u)`` refutes the axiom directly: ``X`` and ``Y`` are feasible,
    ``u`` lies in their symmetric difference, and no ``v`` there (including
    ``v = u``) makes ``X symdiff {u, v}`` feasible.
    """

    valid: bool
    reason: str | None = None
    X: tuple[int, ...] | None = None
    Y: tuple[int, ...] | None = None
    u: int | None = None

    def to_json(self):
        if self.valid:
            return None
        if self.reason == "not proper":
            return {"reason": "not proper"}
        return {"reason": self.reason, "X": list(self.X), "Y": list(self.Y), "u": self.u}


class RibbonLoopClass(Enum):
    NOT_RIBBON_LOOP = "not-ribbon-loop"
    ORIENTABLE_LOOP = "orientable-loop"
    NON_ORIENTABLE_LOOP = "non-orientable-loop"


# ---------------------------------------------------------------------------
# single-element operations on raw mask sets (shared by the bulk operations,
# the group action, and the closure searches)

def twist1(masks: frozenset[int] | set[int], bit: int) -> frozenset[int]:
    return frozenset(m ^ bit for m in masks)


def loop_complement1(masks: frozenset[int] | set[int], bit: int) -> frozenset[int]:
    return frozenset(masks ^ {m | bit for m in masks if not m & bit})


def dual_twist1(masks: frozenset[int] | set[int], bit: int) -> frozenset[int]:
    return frozenset(masks ^ {m & ~bit for m in masks if m & bit})


def _submasks(mask: int) -> Iterator[int]:
    """All subsets of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


# ---------------------------------------------------------------------------
# bulk operations

def twist(D: SetSystem, I: Iterable[int]) -> SetSystem:
    """Symmetric difference of every feasible set with ``I``."""
    imask = mask_of(I, D.n)
    return SetSystem(D.n, (m ^ imask for m in D.masks))


def loop_complement(D: SetSystem, I: Iterable[int]) -> SetSystem:
    """Parity rule over the interval between ``X \\ I`` and ``X``.

    ``X`` is feasible in the result iff an odd number of feasible ``Y``
    satisfy ``X \\ I <= Y <= X``; equivalently the result is the symmetric
    difference, over feasible ``Y``, of the intervals ``[Y, Y | I]``.
    """
    imask = mask_of(I, D.n)
    out: set[int] = set()
    for y in D.masks:
        for s in _submasks(imask & ~y):
            out ^= {y | s}
    return SetSystem(D.n, out)


def dual_twist(D: SetSystem, I: Iterable[int]) -> SetSystem:
    """Parity rule over the interval between ``X`` and ``X | I``.

    ``X`` is feasible in the result iff an odd number of feasible ``Y``
    satisfy ``X <= Y <= X | I``.
    """
    imask = mask_of(I, D.n)
    out: set[int] = set()
    for y in D.masks:
        for s in _submasks(imask & y):
            out ^= {y ^ s}
    return SetSystem(D.n, out)


# ---------------------------------------------------------------------------
# structure checks

def _exchange_ok_masks(mask_set: frozenset[int]) -> bool:
    """Symmetric exchange over a raw family; any iteration order."""
    if not mask_set:
        return False
    for x in mask_set:
        for y in mask_set:
            diff = x ^ y
            d = diff
            while d:
                ub = d & -d
                d ^= ub
                if (x ^ ub) in mask_set:
                    continue
                e = diff
                while e:
                    vb = e & -e
                    e ^= vb
                    if vb != ub and (x ^ ub ^ vb) in mask_set:
                        break
                else:
                    return False
    return True


def is_delta_matroid(D: SetSystem) -> DeltaMatroidWitness:
    """Check properness plus the symmetric exchange axiom.

    On failure the witness is the first refuting triple in canonical
    ``(X, Y, u)`` order (family order, then ascending ``u``).
    """
    if not D.is_proper:
        return DeltaMatroidWitness(False, "not proper")
    fam = D.mask_set()
    ordered = sorted(fam, key=shortlex_key)
    for x in ordered:
        for y in ordered:
            diff = x ^ y
            d = diff
            while d:
                ub = d & -d
                d ^= ub
                ok = (x ^ ub) in fam
                if not ok:
                    e = diff
                    while e:
                        vb = e & -e
                        e ^= vb
                        if vb != ub and (x ^ ub ^ vb) in fam:
                            ok = True
                            break
                if not ok:
                    return DeltaMatroidWitness(
                        False, "exchange", members_of(x), members_of(y), ub.bit_length()
                    )
    return DeltaMatroidWitness(True)


def min_max_matroids(D: SetSystem) -> tuple[SetSystem, SetSystem]:
    """Restrict the family to its minimum- and maximum-cardinality sets."""
    if not D.is_proper:
        raise ValidationError("improper set system has no lower/upper matroid")
    sizes = [m.bit_count() for m in D.masks]
    lo, hi = min(sizes), max(sizes)
    dmin = SetSystem(D.n, (m for m in D.masks if m.bit_count() == lo))
    dmax = SetSystem(D.n, (m for m in D.masks if m.bit_count() == hi))
    return dmin, dmax


def classify_element(D: SetSystem, i: int) -> RibbonLoopClass:
    """Ribbon-loop trichotomy for element ``i`` of a delta-matroid.

    ``i`` is a ribbon loop when it meets no minimum-cardinality feasible
    set; a ribbon loop is non-orientable when it is again a ribbon loop
    after twisting at ``i``, and orientable otherwise.
    """
    if not 1 <= i <= D.n:
        raise ValidationError(f"element {i} out of range 1..{D.n}")
    if not is_delta_matroid(D).valid:
        raise ValidationError("classify_element requires a delta-matroid")
    bit = 1 << (i - 1)

    def ribbon_loop(system: SetSystem) -> bool:
        dmin, _ = min_max_matroids(system)
        return all(not m & bit for m in dmin.masks)

    if not ribbon_loop(D):
        return RibbonLoopClass.NOT_RIBBON_LOOP
    if ribbon_loop(twist(D, (i,))):
        return RibbonLoopClass.NON_ORIENTABLE_LOOP
    return RibbonLoopClass.ORIENTABLE_LOOP


def _relabel_mask(mask: int, images: tuple[int, ...]) -> int:
    out = 0
    m = mask
    i = 0
    while m:
        if m & 1:
            out |= 1 << (images[i] - 1)
        m >>= 1
        i += 1
    return out


def _relabel_canonical_key(n: int, masks: tuple[int, ...]) -> tuple:
    """Least canonical encoding over all relabelings (tiny n only)."""
    best = None
    for images in itertools.permutations(range(1, n + 1)):
        cand = tuple(sorted(_relabel_mask(m, images) for m in masks))
        if best is None or cand < best:
            best = cand
    return (n, best)


def is_vf_safe(
    D: SetSystem,
    max_n: int = VF_SAFE_DEFAULT_CAP,
    cache: dict | None = None,
) -> bool:
    """Whether every system reachable from ``D`` by single-element twists
    and loop complementations is a delta-matroid.

    Breadth-first closure with generators ordered ``*1, +1, *2, +2, ..``;
    the reachable set has at most ``6**n`` members.  An optional ``cache``
    dict memoizes verdicts across calls (keyed up to relabeling for small
    ``n``, which is sound because the property is relabel-invariant and
    shared by the whole closure).
    """
    if D.n > max_n:
        raise BudgetError(f"vf-safe closure needs n <= {max_n}, got {D.n}")
    use_relabel = D.n <= _RELABEL_KEY_CAP

    def key_of(masks: tuple[int, ...]):
        if use_relabel:
            return _relabel_canonical_key(D.n, masks)
        return (D.n, masks)

    seed = D.masks
    if cache is not None:
        hit = cache.get(key_of(seed))
        if hit is not None:
            return hit

    bits = [1 << k for k in range(D.n)]
    seen: set[tuple[int, ...]] = {seed}
    queue = deque([frozenset(seed)])
    verdict = True
    while queue:
        state = queue.popleft()
        if not _exchange_ok_masks(state):
            verdict = False
            break
        for bit in bits:
            for op in (twist1, loop_complement1):
                nxt = op(state, bit)
                canon = tuple(sorted(nxt))
                if canon not in seen:
                    seen.add(canon)
                    queue.append(nxt)
    if cache is not None:
        for canon in seen:
            cache[key_of(canon)] = verdict
    return verdict
