"""Orbit enumeration, stabilizer search, transport of stabilizers along
orbit moves, and the uniformization construction.

Orbits are computed by breadth-first closure under a fixed generator
ordering, deduplicated by canonical encoding, and reported in canonical
order, so repeated runs are byte-identical.  Budgets are hard caps: a
partial orbit is semantically wrong, so exceeding a cap raises instead of
truncating.
"""

from __future__ import annotations

import itertools
import warnings
from collections import deque
from dataclasses import dataclass
from functools import reduce

from .errors import BudgetError, ConsistencyError, ValidationError
from .set_system import (
    RibbonLoopClass,
    SetSystem,
    VF_SAFE_DEFAULT_CAP,
    classify_element,
    is_vf_safe,
    loop_complement,
    loop_complement1,
    min_max_matroids,
    members_of,
    shortlex_key,
    twist,
    twist1,
)
from .twuality_group import (
    FLIPS,
    Flip,
    ONE,
    Perm,
    TwualityElement,
    act,
    flip_mul,
    flip_pow,
    sd_identity,
    uniform_flip,
    vec_inv,
    vec_mul,
    vec_reindex,
)

ORBIT_CAPS = {"full": 8, "iota": 10}
STABILIZER_CAPS = {"all": 5, "uniform": 8}


@dataclass(frozen=True)
class OrbitReport:
    """A generator-closed orbit with one witness word per element."""

    seed: SetSystem
    mode: str
    elements: tuple[SetSystem, ...]
    paths: dict[SetSystem, tuple[str, ...]]

    @property
    def size(self) -> int:
        return len(self.elements)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "size": self.size,
            "elements": [d.to_json() for d in self.elements],
            "paths": [list(self.paths[d]) for d in self.elements],
        }


@dataclass(frozen=True)
class StabilizerHit:
    """A group element fixing the queried system; ``uniform`` is the common
    flip when the vector part is uniform."""

    element: TwualityElement
    uniform: Flip | None

    def to_json(self) -> dict:
        data = self.element.to_json()
        if self.uniform is not None:
            data["uniform"] = self.uniform.token
        return data


@dataclass(frozen=True)
class UniformizationResult:
    """Conjugating vector ``hvec`` and the system it produces, which is
    fixed by the uniform vector of ``g`` together with ``mu``."""

    hvec: tuple[Flip, ...]
    target: SetSystem
    g: Flip
    mu: Perm

    def to_json(self) -> dict:
        return {
            "hvec": [f.token for f in self.hvec],
            "target": self.target.to_json(),
            "g": self.g.token,
            "mu": self.mu.one_line(),
        }


def _orbit_generators(n: int, mode: str):
    """Generator list as (token, state -> state) pairs, in the fixed order
    ``*1, +1, *2, +2, .."`` plus adjacent transpositions in full mode."""
    gens = []
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        gens.append((f"*{i}", lambda s, b=bit: twist1(s, b)))
        gens.append((f"+{i}", lambda s, b=bit: loop_complement1(s, b)))
    if mode == "full":
        for i in range(1, n):
            swap = Perm.identity(n).images[: i - 1] + (i + 1, i) + tuple(range(i + 2, n + 1))
            p = Perm(swap)
            gens.append((f"({i} {i+1})", lambda s, q=p: frozenset(q.apply_mask(m) for m in s)))
    return gens


def orbit(D: SetSystem, mode: str = "iota", max_n: int | None = None) -> OrbitReport:
    """Breadth-first closure of ``D`` under single-element flips (and, in
    full mode, adjacent relabeling transpositions)."""
    if mode not in ORBIT_CAPS:
        raise ValidationError(f"orbit mode must be 'full' or 'iota', got {mode!r}")
    cap = ORBIT_CAPS[mode] if max_n is None else max_n
    if D.n > cap:
        raise BudgetError(f"orbit({mode}) capped at n <= {cap}, got {D.n}")
    gens = _orbit_generators(D.n, mode)
    seed = D.masks
    paths: dict[tuple[int, ...], tuple[str, ...]] = {seed: ()}
    queue = deque([frozenset(seed)])
    while queue:
        state = queue.popleft()
        base = paths[tuple(sorted(state))]
        for token, step in gens:
            nxt = step(state)
            canon = tuple(sorted(nxt))
            if canon not in paths:
                paths[canon] = base + (token,)
                queue.append(nxt)
    systems = {SetSystem(D.n, canon): path for canon, path in paths.items()}
    elements = tuple(sorted(systems, key=SetSystem.canonical_key))
    return OrbitReport(D, mode, elements, {d: systems[d] for d in elements})


def stabilizer_search(
    D: SetSystem, mode: str = "all", max_n: int | None = None
) -> list[StabilizerHit]:
    """Enumerate group elements fixing ``D``.

    The vector part must not be the identity vector.  ``all`` mode scans
    the whole semidirect product; ``uniform`` mode scans only the five
    uniform vectors.  Permutations are enumerated in lexicographic
    one-line order, vectors in the fixed flip order.
    """
    if mode not in STABILIZER_CAPS:
        raise ValidationError(f"stabilizer mode must be 'all' or 'uniform', got {mode!r}")
    cap = STABILIZER_CAPS[mode] if max_n is None else max_n
    if D.n > cap:
        raise BudgetError(f"stabilizer_search({mode}) capped at n <= {cap}, got {D.n}")
    n = D.n
    if mode == "uniform":
        gvecs = [(g,) * n for g in FLIPS[1:]] if n else []
    else:
        gvecs = [g for g in itertools.product(FLIPS, repeat=n) if any(x is not ONE for x in g)]
    perms = [Perm(p) for p in itertools.permutations(range(1, n + 1))]
    hits = []
    for gvec in gvecs:
        for perm in perms:
            element = TwualityElement(gvec, perm)
            if act(element, D) == D:
                hits.append(StabilizerHit(element, uniform_flip(gvec)))
    return hits


def transport(
    D: SetSystem, stab: TwualityElement, move: TwualityElement
) -> tuple[SetSystem, TwualityElement]:
    """Push a stabilizer of ``D`` along ``move``.

    With ``stab = (g, mu)`` and ``move = (h, pi)`` the moved system
    ``act(move, D)`` is fixed by ``(h o (g. pi^-1) o (h^-1. mu'^-1), mu')``
    where ``mu' = pi mu pi^-1`` and ``.s`` denotes reindexing.
    """
    if act(stab, D) != D:
        raise ValidationError("transport requires act(stab, D) == D")
    hvec, pi = move.gvec, move.perm
    mup = pi * stab.perm * pi.inverse()
    gvec_p = vec_mul(
        hvec, vec_mul(vec_reindex(stab.gvec, pi), vec_reindex(vec_inv(hvec), mup))
    )
    moved = act(move, D)
    stab_p = TwualityElement(gvec_p, mup)
    if act(stab_p, moved) != moved:
        raise ConsistencyError("transported element fails to stabilize the moved system")
    return moved, stab_p


def _cycle_product(gvec: tuple[Flip, ...], cycle: tuple[int, ...]) -> Flip:
    # product g_{c_m} g_{c_m-1} .. g_{c_1}: rightmost factor applied first
    return reduce(flip_mul, (gvec[c - 1] for c in reversed(cycle)), ONE)


def cycle_condition(gvec: tuple[Flip, ...], mu: Perm, g: Flip) -> bool:
    """Whether every cycle ``(c_1, .., c_m)`` of ``mu`` has
    ``|g_{c_m} .. g_{c_1}| == |g^m|``."""
    if g is ONE:
        raise ValidationError("cycle_condition needs a non-identity target flip")
    if len(gvec) != mu.n:
        raise ValidationError("flip vector and permutation must have equal length")
    for cycle in mu.cycles():
        if _cycle_product(gvec, cycle).order != flip_pow(g, len(cycle)).order:
            return False
    return True


def uniformize(
    Dp: SetSystem, gvec: tuple[Flip, ...], mu: Perm, g: Flip
) -> UniformizationResult:
    """Conjugate a stabilizer ``(gvec, mu)`` of ``Dp`` into the uniform
    vector of ``g``, moving ``Dp`` to the system the uniform pair fixes.

    Per cycle ``(c_1, .., c_m)`` of ``mu`` the last entry ``h_{c_m}`` is
    the first flip (in the fixed order 1, *, +, *+, +*, ~) conjugating the
    cycle product onto ``g^m``; the rest follow the descending recursion
    ``h_{c_i} = g^-1 h_{c_i+1} g_{c_i+1}``.  Refuses inputs that are not
    stabilizers or fail the cycle order condition.
    """
    if act(TwualityElement(gvec, mu), Dp) != Dp:
        raise ValidationError("uniformize requires act((gvec, mu), Dp) == Dp")
    if not cycle_condition(gvec, mu, g):
        raise ValidationError("cycle order condition fails for the target flip")
    n = Dp.n
    hvec_list: list[Flip | None] = [None] * n
    for cycle in mu.cycles():
        m = len(cycle)
        prod = _cycle_product(gvec, cycle)
        target = flip_pow(g, m)
        for cand in FLIPS:
            if flip_mul(flip_mul(cand, prod), cand.inverse()) is target:
                h_last = cand
                break
        else:
            raise ConsistencyError("no conjugator despite matching orders")
        hvec_list[cycle[-1] - 1] = h_last
        for idx in range(m - 2, -1, -1):
            nxt = cycle[idx + 1]
            hvec_list[cycle[idx] - 1] = flip_mul(
                flip_mul(g.inverse(), hvec_list[nxt - 1]), gvec[nxt - 1]
            )
    hvec = tuple(hvec_list)
    target_system = act(TwualityElement(hvec, Perm.identity(n)), Dp)
    if act(TwualityElement((g,) * n, mu), target_system) != target_system:
        raise ConsistencyError("uniformized system is not fixed by the uniform pair")
    return UniformizationResult(hvec, target_system, g, mu)


def normalize_rep(D: SetSystem, max_n: int = VF_SAFE_DEFAULT_CAP) -> SetSystem:
    """Orbit representative that is normal with no feasible singletons.

    Twists by the least minimum-cardinality feasible set, then applies
    loop complementation at every element whose singleton is feasible.
    The output is checked to classify every element as an orientable
    ribbon loop; a violation is reported as a warning rather than assumed
    away.
    """
    if not is_vf_safe(D, max_n=max_n):
        raise ValidationError("normalize_rep requires a vf-safe delta-matroid")
    dmin, _ = min_max_matroids(D)
    base = min(dmin.masks, key=shortlex_key)
    normal = twist(D, members_of(base))
    singles = [i for i in range(1, D.n + 1) if normal.has_mask(1 << (i - 1))]
    rep = loop_complement(normal, singles)
    if not rep.is_normal or any(rep.has_mask(1 << (i - 1)) for i in range(1, D.n + 1)):
        raise ConsistencyError("normalized representative is not normal/singleton-free")
    bad = [
        i
        for i in range(1, D.n + 1)
        if classify_element(rep, i) is not RibbonLoopClass.ORIENTABLE_LOOP
    ]
    if bad:
        warnings.warn(
            f"normalized representative has non-orientable elements {bad}: {rep!r}",
            stacklevel=2,
        )
    return rep
