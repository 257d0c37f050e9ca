"""The six invertible single-element flips, flip vectors, permutations,
and the semidirect-product action on set systems.

The flip group is generated by the twist ``*`` and the loop complementation
``+`` acting at one element; it is isomorphic to the symmetric group on
three symbols via ``* -> (1 2)`` and ``+ -> (2 3)``, and each flip is
stored as that permutation so multiplication and order queries are table
lookups.

Word convention (fixed once, used everywhere in the library): in a word of
flips the RIGHTMOST letter is applied first, so the product ``g*h`` means
"h first, then g" and matches ``(g.perm o h.perm)``.  The command-line
layer accepts left-to-right operation lists and converts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import ValidationError
from .set_system import SetSystem, dual_twist1, loop_complement1, twist1


class Flip:
    """One of the six single-element operations.

    ``app_seq`` is the sequence of primitive steps, in application order,
    realizing the flip at one element: ``*`` twist, ``+`` loop
    complementation, ``~`` dual twist (the single-step parity rule).
    """

    __slots__ = ("index", "token", "perm", "app_seq")

    def __init__(self, index: int, token: str, perm: tuple[int, int, int], app_seq: tuple[str, ...]):
        self.index = index
        self.token = token
        self.perm = perm
        self.app_seq = app_seq

    @property
    def order(self) -> int:
        return _ORDER[self.index]

    def inverse(self) -> "Flip":
        return _INV[self.index]

    def __mul__(self, other: "Flip") -> "Flip":
        return _MUL[self.index][other.index]

    def __repr__(self) -> str:
        return f"Flip({self.token!r})"

    def __reduce__(self):  # keep interning under pickling
        return (parse_flip, (self.token,))


ONE = Flip(0, "1", (1, 2, 3), ())
STAR = Flip(1, "*", (2, 1, 3), ("*",))
PLUS = Flip(2, "+", (1, 3, 2), ("+",))
STAR_PLUS = Flip(3, "*+", (2, 3, 1), ("+", "*"))
PLUS_STAR = Flip(4, "+*", (3, 1, 2), ("*", "+"))
BAR = Flip(5, "~", (3, 2, 1), ("~",))

FLIPS: tuple[Flip, ...] = (ONE, STAR, PLUS, STAR_PLUS, PLUS_STAR, BAR)

_BY_PERM = {f.perm: f for f in FLIPS}
_BY_TOKEN = {f.token: f for f in FLIPS}


def _compose(a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
    # (a o b)(x) = a(b(x)): b acts first
    return (a[b[0] - 1], a[b[1] - 1], a[b[2] - 1])


_MUL = tuple(tuple(_BY_PERM[_compose(g.perm, h.perm)] for h in FLIPS) for g in FLIPS)
_INV = tuple(
    next(h for h in FLIPS if _compose(g.perm, h.perm) == (1, 2, 3)) for g in FLIPS
)


def _order_of(g: Flip) -> int:
    p, k = g.perm, 1
    while p != (1, 2, 3):
        p = _compose(g.perm, p)
        k += 1
    return k


_ORDER = tuple(_order_of(g) for g in FLIPS)


def flip_mul(g: Flip, h: Flip) -> Flip:
    """Group product ``gh``: apply ``h`` first, then ``g``."""
    return _MUL[g.index][h.index]


def flip_pow(g: Flip, m: int) -> Flip:
    out = ONE
    for _ in range(m % _ORDER[g.index] if _ORDER[g.index] else 0):
        out = flip_mul(out, g)
    return out


def parse_flip(token: str) -> Flip:
    f = _BY_TOKEN.get(token)
    if f is None:
        raise ValidationError(f"unknown flip token {token!r}")
    return f


def reduce_word(word: str | Iterable[str]) -> Flip:
    """Reduce a word over the letters ``*`` and ``+`` to its flip.

    Letters are written leftmost-first but applied rightmost-first, so the
    reduction is the left-to-right fold of the group product.
    """
    out = ONE
    for ch in word:
        if ch in " \t":
            continue
        if ch == "*":
            out = flip_mul(out, STAR)
        elif ch == "+":
            out = flip_mul(out, PLUS)
        else:
            raise ValidationError(f"word letter must be '*' or '+', got {ch!r}")
    return out


class Perm:
    """A permutation of ``{1, .., n}`` in one-line notation."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(images)
        n = len(images)
        if sorted(images) != list(range(1, n + 1)):
            raise ValidationError(f"{list(images)} is not a permutation of 1..{n}")
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Perm is immutable")

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(range(1, n + 1))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Perm") -> "Perm":
        # composition: (self * other)(i) = self(other(i)), other acts first
        if self.n != other.n:
            raise ValidationError("permutation size mismatch")
        return Perm(self.images[j - 1] for j in other.images)

    def inverse(self) -> "Perm":
        inv = [0] * self.n
        for i, img in enumerate(self.images, start=1):
            inv[img - 1] = i
        return Perm(inv)

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1))

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Cycle decomposition; each cycle starts at its least element,
        cycles sorted by least element, fixed points included."""
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self(start)
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            out.append(tuple(cyc))
        return tuple(out)

    def apply_mask(self, mask: int) -> int:
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= 1 << (self.images[i] - 1)
            mask >>= 1
            i += 1
        return out

    def one_line(self) -> list[int]:
        return list(self.images)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Perm):
            return NotImplemented
        return self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Perm({list(self.images)})"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, n: int) -> Perm:
    """Parse either one-line ``[2,1,3]`` or cycle ``(1 2)(3)`` notation."""
    text = text.strip()
    if text.startswith("["):
        body = text[1:-1] if text.endswith("]") else None
        if body is None:
            raise ValidationError(f"unterminated one-line permutation {text!r}")
        parts = [p for p in re.split(r"[,\s]+", body.strip()) if p]
        try:
            images = [int(p) for p in parts]
        except ValueError:
            raise ValidationError(f"bad one-line permutation {text!r}") from None
        if len(images) != n:
            raise ValidationError(f"permutation has length {len(images)}, expected {n}")
        return Perm(images)
    if text == "" or text.startswith("("):
        if re.sub(_CYCLE_RE, "", text).strip():
            raise ValidationError(f"bad cycle notation {text!r}")
        images = list(range(1, n + 1))
        seen: set[int] = set()
        for group in _CYCLE_RE.findall(text):
            parts = [p for p in re.split(r"[,\s]+", group.strip()) if p]
            try:
                cyc = [int(p) for p in parts]
            except ValueError:
                raise ValidationError(f"bad cycle {group!r}") from None
            for i in cyc:
                if not 1 <= i <= n:
                    raise ValidationError(f"cycle entry {i} out of range 1..{n}")
                if i in seen:
                    raise ValidationError(f"element {i} repeated across cycles")
                seen.add(i)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a - 1] = b
        return Perm(images)
    raise ValidationError(f"unrecognized permutation syntax {text!r}")


# ---------------------------------------------------------------------------
# flip vectors (plain tuples of Flip values)

def vec_mul(a: tuple[Flip, ...], b: tuple[Flip, ...]) -> tuple[Flip, ...]:
    """Entrywise product ``(a_i b_i)``: the right vector acts first."""
    if len(a) != len(b):
        raise ValidationError("flip-vector length mismatch")
    return tuple(flip_mul(x, y) for x, y in zip(a, b))


def vec_inv(a: tuple[Flip, ...]) -> tuple[Flip, ...]:
    return tuple(x.inverse() for x in a)


def vec_reindex(g: tuple[Flip, ...], p: Perm) -> tuple[Flip, ...]:
    """Reindex so that entry ``i`` of the result is ``g`` at ``p^-1(i)``."""
    if len(g) != p.n:
        raise ValidationError("flip-vector / permutation length mismatch")
    inv = p.inverse()
    return tuple(g[inv(i) - 1] for i in range(1, p.n + 1))


def uniform_flip(g: tuple[Flip, ...]) -> Flip | None:
    """The common entry when ``g`` is uniform (all equal, non-identity)."""
    if g and all(x is g[0] for x in g) and g[0] is not ONE:
        return g[0]
    return None


@dataclass(frozen=True)
class TwualityElement:
    """A pair (flip vector, permutation) of the semidirect product."""

    gvec: tuple[Flip, ...]
    perm: Perm

    def __post_init__(self):
        if len(self.gvec) != self.perm.n:
            raise ValidationError("flip vector and permutation must have equal length")

    @property
    def n(self) -> int:
        return self.perm.n

    def __mul__(self, other: "TwualityElement") -> "TwualityElement":
        return sd_mul(self, other)

    def inverse(self) -> "TwualityElement":
        return sd_inv(self)

    def to_json(self) -> dict:
        return {"gvec": [f.token for f in self.gvec], "perm": self.perm.one_line()}


def sd_identity(n: int) -> TwualityElement:
    return TwualityElement((ONE,) * n, Perm.identity(n))


def sd_mul(a: TwualityElement, b: TwualityElement) -> TwualityElement:
    """Semidirect product ``(g, p1)(h, p2) = (g o (h reindexed by p1), p1 p2)``."""
    if a.n != b.n:
        raise ValidationError("semidirect-product size mismatch")
    return TwualityElement(vec_mul(a.gvec, vec_reindex(b.gvec, a.perm)), a.perm * b.perm)


def sd_inv(a: TwualityElement) -> TwualityElement:
    pinv = a.perm.inverse()
    return TwualityElement(vec_reindex(vec_inv(a.gvec), pinv), pinv)


# ---------------------------------------------------------------------------
# the action on set systems

def _apply_seq(masks: frozenset[int], seq: tuple[str, ...], bit: int) -> frozenset[int]:
    for step in seq:
        if step == "*":
            masks = twist1(masks, bit)
        elif step == "+":
            masks = loop_complement1(masks, bit)
        else:
            masks = dual_twist1(masks, bit)
    return masks


def apply_flip(D: SetSystem, g: Flip, i: int) -> SetSystem:
    """Apply the flip ``g`` at element ``i`` (its word, rightmost first)."""
    if not 1 <= i <= D.n:
        raise ValidationError(f"element {i} out of range 1..{D.n}")
    return SetSystem(D.n, _apply_seq(D.mask_set(), g.app_seq, 1 << (i - 1)))


def _act_masks(a: TwualityElement, masks: frozenset[int]) -> frozenset[int]:
    if not a.perm.is_identity():
        masks = frozenset(a.perm.apply_mask(m) for m in masks)
    for i, g in enumerate(a.gvec):
        if g is not ONE:
            masks = _apply_seq(masks, g.app_seq, 1 << i)
    return masks


def act(a: TwualityElement, D: SetSystem) -> SetSystem:
    """Relabel ``D`` by the permutation, then apply each entry's flip.

    Satisfies ``act(a * b, D) == act(a, act(b, D))`` and fixes ``D`` for
    the identity element.
    """
    if a.n != D.n:
        raise ValidationError(f"element acts on [{a.n}] but system has ground [{D.n}]")
    return SetSystem(D.n, _act_masks(a, D.mask_set()))
