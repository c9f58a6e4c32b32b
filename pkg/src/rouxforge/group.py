"""Finite groups with enumerable, canonically keyed elements.

Three element backends are supported: permutations of n points (keys are
image tuples), invertible matrices over a FieldSpec (keys are row-major
tuples of element codes), and direct products with a cyclic group C_r
(keys are (base_key, exponent) pairs).  Canonical keys make every group
hashable/sortable, so enumeration order is deterministic everywhere.

Groups are immutable once closed; all queries are pure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .field import FieldSpec

CLOSURE_CAP = 10**6


class GroupError(ValueError):
    pass


class CapExceededError(GroupError):
    pass


# ---------------------------------------------------------------------------
# element backends


class PermOps:
    """Permutations of [n], keyed by 0-based image tuples: key[i] = g(i)."""

    def __init__(self, degree: int):
        self.degree = degree
        self.identity = tuple(range(degree))

    def mul(self, a, b):
        # left action convention: (ab)(i) = a(b(i))
        return tuple(a[b[i]] for i in range(self.degree))

    def inv(self, a):
        out = [0] * self.degree
        for i, j in enumerate(a):
            out[j] = i
        return tuple(out)


class MatOps:
    """dim x dim invertible matrices over a FieldSpec, keyed row-major."""

    def __init__(self, spec: FieldSpec, dim: int):
        self.spec = spec
        self.dim = dim
        self.identity = tuple(
            tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)
        )

    def mul(self, a, b):
        spec = self.spec
        n = self.dim
        rng = range(n)
        return tuple(
            tuple(
                _dot(spec, a[i], [b[k][j] for k in rng])
                for j in rng
            )
            for i in rng
        )

    def inv(self, a):
        # Gaussian elimination over the field
        spec = self.spec
        n = self.dim
        aug = [list(a[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise GroupError("singular matrix in group backend")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            pinv = spec.inv(aug[col][col])
            aug[col] = [spec.mul(pinv, v) for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [spec.sub(v, spec.mul(f, w)) for v, w in zip(aug[r], aug[col])]
        return tuple(tuple(row[n:]) for row in aug)

    def apply(self, a, v):
        """Matrix-vector product on a tuple of field codes."""
        return tuple(_dot(self.spec, row, v) for row in a)


def _dot(spec: FieldSpec, u, v) -> int:
    acc = 0
    for x, y in zip(u, v):
        if x and y:
            acc = spec.add(acc, spec.mul(x, y))
    return acc


class ProductOps:
    """Direct product of a base backend with the cyclic group C_r.

    Keys are (base_key, z) with z an exponent mod r; multiplication is
    componentwise.
    """

    def __init__(self, base, r: int):
        self.base = base
        self.r = r
        self.identity = (base.identity, 0)

    def mul(self, a, b):
        return (self.base.mul(a[0], b[0]), (a[1] + b[1]) % self.r)

    def inv(self, a):
        return (self.base.inv(a[0]), (-a[1]) % self.r)


# ---------------------------------------------------------------------------
# groups


class FiniteGroup:
    """An enumerated finite group: sorted canonical keys plus an index map."""

    def __init__(self, ops, elements: Iterable, generators: Sequence, name: str = ""):
        self.ops = ops
        self.elements = sorted(elements)
        self.index = {k: i for i, k in enumerate(self.elements)}
        self.generators = list(generators)
        self.name = name

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self):
        return self.ops.identity

    def mul(self, a, b):
        return self.ops.mul(a, b)

    def inv(self, a):
        return self.ops.inv(a)

    def __contains__(self, key) -> bool:
        return key in self.index

    def __iter__(self) -> Iterator:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        label = self.name or "group"
        return f"<{label} of order {self.order}>"

    def subgroup(self, elements: Iterable, generators: Optional[Sequence] = None) -> "Subgroup":
        return Subgroup(self, elements, generators)

    def random_element(self, rng, word_length: int = 32):
        """Random element as a word in the generators (deterministic rng)."""
        acc = self.identity
        for _ in range(word_length):
            acc = self.mul(acc, rng.choice(self.generators))
        return acc


class GeneratedGroup:
    """A group carrier that is never enumerated: backend plus generators.

    Enough for actions, orbit searches, and transversals on groups too
    large (or too unnecessary) to materialize.
    """

    def __init__(self, ops, generators: Sequence, name: str = ""):
        self.ops = ops
        self.generators = list(generators)
        self.name = name

    @property
    def identity(self):
        return self.ops.identity

    def mul(self, a, b):
        return self.ops.mul(a, b)

    def inv(self, a):
        return self.ops.inv(a)

    def __repr__(self) -> str:
        return f"<generated group {self.name or '?'}>"


class Subgroup(FiniteGroup):
    """A subgroup sharing its parent's backend, with its own element list."""

    def __init__(self, parent: FiniteGroup, elements: Iterable, generators: Optional[Sequence] = None):
        self.parent = parent
        elements = list(elements)
        if generators is None:
            generators = small_generating_set(parent.ops, elements)
        super().__init__(parent.ops, elements, generators, name=f"subgroup of {parent.name}")


def closure(generators: Sequence, ops, cap: int = CLOSURE_CAP, name: str = "") -> FiniteGroup:
    """Breadth-first closure of a generating set under the backend product."""
    if not generators:
        raise GroupError("need at least one generator")
    els = {ops.identity}
    frontier = [ops.identity]
    while frontier:
        new = []
        for a in frontier:
            for g in generators:
                c = ops.mul(a, g)
                if c not in els:
                    els.add(c)
                    new.append(c)
                    if len(els) > cap:
                        raise CapExceededError(f"closure exceeded cap {cap}")
        frontier = new
    return FiniteGroup(ops, els, generators, name=name)


def closure_elements(generators: Sequence, ops, cap: int = CLOSURE_CAP) -> set:
    return set(closure(generators, ops, cap).elements)


def small_generating_set(ops, elements: Sequence) -> list:
    """Greedy generating set: add the first element outside the running closure."""
    gens: list = []
    current = {ops.identity}
    for el in sorted(elements):
        if el not in current:
            gens.append(el)
            current = closure_elements(gens, ops)
            if len(current) == len(elements):
                break
    return gens if gens else [ops.identity]


def direct_product_with_cyclic(G: FiniteGroup, r: int, cap: int = CLOSURE_CAP) -> FiniteGroup:
    """G x C_r with componentwise multiplication."""
    if G.order * r > cap:
        raise CapExceededError("product order exceeds cap")
    ops = ProductOps(G.ops, r)
    elements = [(g, z) for g in G.elements for z in range(r)]
    gens = [(g, 0) for g in G.generators] + [(G.identity, 1 % r)]
    return FiniteGroup(ops, elements, gens, name=f"{G.name} x C_{r}")


# ---------------------------------------------------------------------------
# actions


class GroupAction:
    """A left action of a (possibly unenumerated) group on a finite point set.

    ``group`` may be a FiniteGroup or any object with .ops/.generators;
    ``apply`` maps (element key, point) -> point.  The point set is stored
    sorted, so point indices are deterministic.
    """

    def __init__(self, group, points: Iterable, apply: Callable):
        self.group = group
        self.points = sorted(points)
        self.point_index = {p: i for i, p in enumerate(self.points)}
        self._apply = apply

    @property
    def degree(self) -> int:
        return len(self.points)

    def act(self, gkey, point):
        return self._apply(gkey, point)

    def act_index(self, gkey, i: int) -> int:
        return self.point_index[self._apply(gkey, self.points[i])]

    def permutation_of(self, gkey) -> tuple:
        """The permutation of point indices induced by a group element."""
        return tuple(self.act_index(gkey, i) for i in range(self.degree))

    def orbit(self, point) -> set:
        seen = {point}
        frontier = [point]
        while frontier:
            new = []
            for p in frontier:
                for g in self.group.generators:
                    q = self._apply(g, p)
                    if q not in seen:
                        seen.add(q)
                        new.append(q)
            frontier = new
        return seen

    def is_transitive(self) -> bool:
        return len(self.orbit(self.points[0])) == self.degree

    def transversal(self, base_point) -> dict:
        """Map point -> group element sending base_point there (BFS words)."""
        reps = {base_point: self.group.ops.identity}
        frontier = [base_point]
        while frontier:
            new = []
            for p in frontier:
                for g in self.group.generators:
                    q = self._apply(g, p)
                    if q not in reps:
                        reps[q] = self.group.ops.mul(g, reps[p])
                        new.append(q)
            frontier = new
        return reps

    def check_compatibility(self) -> None:
        """Spot-verify action axioms on generators x all points."""
        ops = self.group.ops
        for p in self.points:
            if self._apply(ops.identity, p) != p:
                raise GroupError("identity does not act trivially")
        for g in self.group.generators:
            for h in self.group.generators:
                gh = ops.mul(g, h)
                for p in self.points:
                    if self._apply(gh, p) != self._apply(g, self._apply(h, p)):
                        raise GroupError("action incompatible with multiplication")


def natural_permutation_action(G: FiniteGroup) -> GroupAction:
    degree = G.ops.degree
    return GroupAction(G, range(degree), lambda g, p: g[p])


def projective_point(spec: FieldSpec, v: Sequence[int]) -> tuple:
    """Canonical representative of the line through v: first nonzero coord = 1."""
    lead = next((i for i, c in enumerate(v) if c), None)
    if lead is None:
        raise GroupError("zero vector spans no line")
    scale = spec.inv(v[lead])
    return tuple(spec.mul(scale, c) for c in v)


def projective_line_action(G: FiniteGroup) -> GroupAction:
    """Action of a 2x2 matrix group on the q+1 points of the projective line."""
    ops = G.ops
    spec = ops.spec
    points = [projective_point(spec, (1, t)) for t in range(spec.q)]
    points.append(projective_point(spec, (0, 1)))
    return GroupAction(G, points, lambda g, p: projective_point(spec, ops.apply(g, p)))


def coset_action(G: FiniteGroup, K: Subgroup) -> GroupAction:
    """Left multiplication action of G on left cosets xK (keyed by min element)."""
    rep_of: dict = {}
    reps = []
    for g in G.elements:
        if g in rep_of:
            continue
        members = sorted(G.mul(g, k) for k in K.elements)
        r = members[0]
        reps.append(r)
        for m in members:
            rep_of[m] = r
    return GroupAction(G, reps, lambda g, p: rep_of[G.mul(g, p)])


def stabilizer(action: GroupAction, point) -> Subgroup:
    """Point stabilizer {g : g.point = point}, by full enumeration."""
    G = action.group
    if not isinstance(G, FiniteGroup):
        raise GroupError("stabilizer requires an enumerated group")
    members = [g for g in G.elements if action.act(g, point) == point]
    return G.subgroup(members)


def is_doubly_transitive(action: GroupAction) -> bool:
    """True iff the stabilizer of one point is transitive on the rest."""
    if not action.is_transitive():
        raise GroupError("action is not transitive")
    if action.degree < 2:
        return False
    base = action.points[0]
    stab = stabilizer(action, base)
    rest = [p for p in action.points if p != base]
    sub = GroupAction(stab, rest, action._apply)
    return len(sub.orbit(rest[0])) == len(rest)


def is_doubly_transitive_bruteforce(action: GroupAction) -> bool:
    """Definition-level oracle: every ordered pair maps to every other."""
    G = action.group
    pts = action.points
    pairs = {(p, q) for p in pts for q in pts if p != q}
    if not pairs:
        return False
    base = next(iter(sorted(pairs)))
    reached = {(action.act(g, base[0]), action.act(g, base[1])) for g in G.elements}
    return reached == pairs


def double_coset_decomposition(G: FiniteGroup, H: Subgroup) -> list[list]:
    """Partition of G into double cosets HxH, cells sorted by min element."""
    assigned: dict = {}
    cells = []
    for g in G.elements:
        if g in assigned:
            continue
        members = sorted({G.mul(G.mul(h1, g), h2) for h1 in H.elements for h2 in H.elements})
        cells.append(members)
        for m in members:
            assigned[m] = True
    cells.sort(key=lambda cell: cell[0])
    return cells


def derived_subgroup(G: FiniteGroup, cap: int = 10**5) -> Subgroup:
    """Commutator subgroup: normal closure of generator commutators."""
    if G.order > cap:
        raise CapExceededError("derived subgroup cap exceeded")
    ops = G.ops
    gens = G.generators
    comms = set()
    for a in gens:
        for b in gens:
            comms.add(ops.mul(ops.mul(a, b), ops.inv(ops.mul(b, a))))
    comms.discard(ops.identity)
    seeds = sorted(comms)
    while True:
        members = closure_elements(seeds, ops) if seeds else {ops.identity}
        new = []
        for g in gens:
            ginv = ops.inv(g)
            for s in seeds:
                c = ops.mul(ops.mul(g, s), ginv)
                if c not in members:
                    new.append(c)
        if not new:
            return G.subgroup(members, generators=seeds or [ops.identity])
        seeds = sorted(set(seeds) | set(new))


# ---------------------------------------------------------------------------
# linear characters


@dataclass(frozen=True)
class LinearCharacter:
    """A homomorphism from a finite group into C_m, stored as exponents.

    ``exponents`` assigns each element key an integer mod ``modulus``;
    characters are stored in reduced form, so the image is all of C_m.
    """

    modulus: int
    exponents: dict = dataclass_field(compare=False, hash=False, default_factory=dict)
    key: tuple = ()

    def exponent(self, gkey) -> int:
        return self.exponents[gkey]

    @property
    def image_order(self) -> int:
        return self.modulus

    @property
    def is_trivial(self) -> bool:
        return self.modulus == 1

    @property
    def is_real(self) -> bool:
        return self.modulus <= 2

    def value(self, gkey) -> complex:
        import cmath

        return cmath.exp(2j * cmath.pi * self.exponents[gkey] / self.modulus)

    def verify_homomorphism(self, G: FiniteGroup, exhaustive_limit: int = 300) -> None:
        """Verify chi(ab) = chi(a) + chi(b).

        Checked on all pairs for small domains; for larger ones on
        generators x all elements, which already proves the identity for
        every pair by induction on words in the generators.
        """
        m = self.modulus
        left = G.elements if G.order <= exhaustive_limit else G.generators
        for a in left:
            for b in G.elements:
                if (self.exponents[a] + self.exponents[b]) % m != self.exponents[G.mul(a, b)]:
                    raise GroupError("character is not a homomorphism")


def _element_order(ops, g) -> int:
    n = 1
    acc = g
    while acc != ops.identity:
        acc = ops.mul(acc, g)
        n += 1
    return n


def abelianization(G: FiniteGroup) -> tuple[dict, FiniteGroup]:
    """Coset map onto G/[G,G] plus the quotient as an explicit group.

    The quotient is represented on canonical (minimal) coset representatives
    with multiplication through the representative map.
    """
    D = derived_subgroup(G)
    rep_of: dict = {}
    reps = []
    for g in G.elements:
        if g in rep_of:
            continue
        members = sorted(G.mul(d, g) for d in D.elements)
        r = members[0]
        reps.append(r)
        for m in members:
            rep_of[m] = r

    class _QuotientOps:
        identity = rep_of[G.identity]

        @staticmethod
        def mul(a, b):
            return rep_of[G.mul(a, b)]

        @staticmethod
        def inv(a):
            return rep_of[G.inv(a)]

    Q = FiniteGroup(_QuotientOps, reps, small_generating_set(_QuotientOps, reps), name=f"{G.name} abelianized")
    return rep_of, Q


def enumerate_linear_characters(G: FiniteGroup, cap: int = 10**4) -> list[LinearCharacter]:
    """All homomorphisms G -> T, one per element of the dual of G/[G,G].

    The abelianization is decomposed along a chain of cyclic extensions,
    choosing a maximal-order generator at each step; characters extend
    down the chain by solving exponent congruences.  Output is sorted
    (trivial character first) and each character is stored in reduced form.
    """
    rep_of, Q = abelianization(G)
    if Q.order > cap:
        raise CapExceededError("abelianization exceeds character cap")
    exponent = 1
    for el in Q.elements:
        exponent = math.lcm(exponent, _element_order(Q.ops, el))
    M = exponent

    # chain of subgroups, adding a maximal-order element not yet captured
    chars: list[dict] = [{Q.identity: 0}]
    covered = {Q.identity}
    while len(covered) < Q.order:
        g = max(
            (el for el in Q.elements if el not in covered),
            key=lambda el: (_element_order(Q.ops, el), el),
        )
        # s = least power of g landing in the current subgroup
        s = 1
        acc = g
        while acc not in covered:
            acc = Q.ops.mul(acc, g)
            s += 1
        g_s = acc
        new_chars = []
        for chi in chars:
            t0 = chi[g_s]
            assert t0 % s == 0, "character extension congruence must be solvable"
            for j in range(s):
                x = (t0 // s + j * (M // s)) % M
                ext = dict(chi)
                acc2 = Q.identity
                for t in range(1, s):
                    acc2 = Q.ops.mul(acc2, g)
                    for b in list(chi):
                        ext[Q.ops.mul(b, acc2)] = (chi[b] + t * x) % M
                new_chars.append(ext)
        chars = new_chars
        covered = set(chars[0])

    out = []
    for chi in chars:
        g = M
        for v in chi.values():
            g = math.gcd(g, v)
        m = M // g if g else 1
        if m == 1:
            full = {el: 0 for el in G.elements}
            out.append(LinearCharacter(1, full, key=(1, ())))
            continue
        full = {el: (chi[rep_of[el]] // g) % m for el in G.elements}
        sig = tuple(full[el] for el in G.generators)
        out.append(LinearCharacter(m, full, key=(m, sig)))
    out.sort(key=lambda c: c.key)
    assert len(out) == Q.order
    return out


# ---------------------------------------------------------------------------
# JSON group specs


def parse_group_spec(data: dict) -> tuple:
    """Backend, generator keys, and name from a JSON group spec (no closure)."""
    kind = data.get("kind")
    if kind == "permutation":
        degree = int(data["degree"])
        ops = PermOps(degree)
        gens = [tuple(int(i) for i in g) for g in data["generators"]]
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise GroupError(f"not a permutation of [{degree}]: {g}")
        return ops, gens, data.get("name", "permutation group")
    if kind == "matrix":
        spec = FieldSpec.from_json(data["field"])
        dim = int(data["dim"])
        ops = MatOps(spec, dim)
        gens = []
        for flat in data["generators"]:
            if len(flat) != dim * dim:
                raise GroupError("generator has wrong number of entries")
            entries = [
                spec.element(e if isinstance(e, list) else [e]).code for e in flat
            ]
            gens.append(tuple(tuple(entries[i * dim + j] for j in range(dim)) for i in range(dim)))
        return ops, gens, data.get("name", "matrix group")
    raise GroupError(f"unknown group kind {kind!r}")


def group_from_json(data: dict, cap: int = CLOSURE_CAP) -> FiniteGroup:
    """Build a group from its JSON spec; see README for the format."""
    if data.get("kind") == "product":
        base = group_from_json(data["base"], cap)
        return direct_product_with_cyclic(base, int(data["r"]), cap)
    ops, gens, name = parse_group_spec(data)
    return closure(gens, ops, cap, name=name)


def group_to_json(G: FiniteGroup) -> dict:
    ops = G.ops
    if isinstance(ops, PermOps):
        return {
            "kind": "permutation",
            "degree": ops.degree,
            "generators": [list(g) for g in G.generators],
        }
    if isinstance(ops, MatOps):
        return {
            "kind": "matrix",
            "field": ops.spec.to_json(),
            "dim": ops.dim,
            "generators": [
                [list(ops.spec.decode(e)) for row in g for e in row] for g in G.generators
            ],
        }
    raise GroupError("only permutation and matrix groups serialize")


def loads_group(text: str) -> FiniteGroup:
    return group_from_json(json.loads(text))
