"""Based root data with exact integer coordinates.

A root datum lives on the lattice pair (X, X∨) = (Z^rank, Z^rank) with the
standard dot pairing.  Roots are vectors in X, coroots in X∨, and every
isogeny question (SL2 vs PGL2, quotients by central subgroups) is carried by
the coordinates alone.  All derived data — the full root system, the Weyl
group, canonical keys — is computed by exact integer/rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial

from .errors import InfiniteType, NonCartan, NotCentral
from .linalg import (
    IntMat,
    IntVec,
    QVec,
    clear_denominators,
    coords_in_rows,
    det,
    dot,
    dual_lattice_quotient,
    hnf_rows,
    identity_matrix,
    invariant_factors,
    invert,
    mat_mul,
    mat_vec,
    matrix_rank,
    normalize_mod1,
    snf_with_transforms,
    transpose,
    vec_sub,
)

# Upper bound on |positive roots| per rank unit; E8 realizes 120/8 = 15, so
# 32 leaves room while still catching runaway closures from malformed input.
_CLOSURE_FACTOR = 32

_WEYL_ORDER_EXCEPTIONAL = {"G2": 12, "F4": 1152, "E6": 51840, "E7": 2903040, "E8": 696729600}


@dataclass(frozen=True)
class WeylElement:
    """Lattice automorphism of X∨ induced by a Weyl group element."""

    matrix: IntMat
    word: tuple[int, ...] | None = field(default=None, compare=False)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        word = None
        if self.word is not None and other.word is not None:
            word = self.word + other.word
        return WeylElement(mat_mul(self.matrix, other.matrix), word)


@dataclass(frozen=True)
class RootDatum:
    rank: int
    simple_roots: tuple[IntVec, ...]
    simple_coroots: tuple[IntVec, ...]
    roots: tuple[IntVec, ...]
    coroots: tuple[IntVec, ...]  # aligned with roots

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_roots)

    def coroot_of(self, root: IntVec) -> IntVec:
        return self.coroots[self.roots.index(root)]

    def is_semisimple(self) -> bool:
        if not self.simple_roots:
            return self.rank == 0
        return matrix_rank(self.simple_roots) == self.rank

    def positive_roots(self) -> tuple[IntVec, ...]:
        return tuple(r for r in self.roots if self.is_positive(r))

    def is_positive(self, root: IntVec) -> bool:
        coeffs = coords_in_rows(self.simple_roots, root)
        if coeffs is None:
            raise ValueError("vector is not in the root span")
        for c in coeffs:
            if c != 0:
                return c > 0
        return False

    def cartan_matrix(self) -> IntMat:
        return tuple(tuple(dot(b, av) for b in self.simple_roots)
                     for av in self.simple_coroots)


def _validate_cartan(simple_roots, simple_coroots) -> IntMat:
    k = len(simple_roots)
    cartan = tuple(tuple(dot(simple_roots[j], simple_coroots[i]) for j in range(k))
                   for i in range(k))
    for i in range(k):
        if cartan[i][i] != 2:
            raise NonCartan(f"<alpha_{i}, alpha_{i}^> = {cartan[i][i]} != 2")
        for j in range(k):
            if i == j:
                continue
            if cartan[i][j] > 0:
                raise NonCartan(f"positive off-diagonal Cartan entry at ({i},{j})")
            if (cartan[i][j] == 0) != (cartan[j][i] == 0):
                raise NonCartan(f"asymmetric zero pattern at ({i},{j})")
    # Finite type iff every principal minor of the Cartan matrix is positive.
    for size in range(1, k + 1):
        for subset in combinations(range(k), size):
            minor = det(tuple(tuple(cartan[i][j] for j in subset) for i in subset))
            if minor <= 0:
                raise NonCartan(f"non-positive principal minor on {subset}")
    return cartan


def build_root_datum(rank: int, simple_roots, simple_coroots) -> RootDatum:
    """Validate a based datum and close the simple roots under reflections.

    The root list is frozen in lexicographic order so that every downstream
    sum and report is reproducible.
    """
    if rank < 0:
        raise NonCartan("negative rank")
    simple_roots = tuple(tuple(int(x) for x in r) for r in simple_roots)
    simple_coroots = tuple(tuple(int(x) for x in r) for r in simple_coroots)
    if len(simple_roots) != len(simple_coroots):
        raise NonCartan("simple root and coroot lists differ in length")
    if len(simple_roots) > rank:
        raise NonCartan("more simple roots than the rank allows")
    for v in simple_roots + simple_coroots:
        if len(v) != rank:
            raise NonCartan("vector length does not match the rank")
    if simple_roots and matrix_rank(simple_roots) != len(simple_roots):
        raise NonCartan("simple roots are linearly dependent")
    if simple_coroots and matrix_rank(simple_coroots) != len(simple_coroots):
        raise NonCartan("simple coroots are linearly dependent")
    _validate_cartan(simple_roots, simple_coroots)

    bound = _CLOSURE_FACTOR * max(rank, 1)
    pairs = set(zip(simple_roots, simple_coroots))
    frontier = list(pairs)
    while frontier:
        new_frontier = []
        for root, coroot in frontier:
            for alpha, alpha_v in zip(simple_roots, simple_coroots):
                r = vec_sub(root, tuple(dot(root, alpha_v) * a for a in alpha))
                rv = vec_sub(coroot, tuple(dot(alpha, coroot) * a for a in alpha_v))
                if (r, rv) not in pairs:
                    pairs.add((r, rv))
                    new_frontier.append((r, rv))
            neg = (tuple(-x for x in root), tuple(-x for x in coroot))
            if neg not in pairs:
                pairs.add(neg)
                new_frontier.append(neg)
        frontier = new_frontier
        if len(pairs) > 2 * bound:
            raise InfiniteType("reflection closure exceeded the finite-type bound")

    ordered = sorted(pairs)
    roots = tuple(p[0] for p in ordered)
    coroots = tuple(p[1] for p in ordered)
    return RootDatum(rank, simple_roots, simple_coroots, roots, coroots)


def simple_reflection_matrix(d: RootDatum, i: int) -> IntMat:
    """Matrix of s_i acting on X∨ (columns are images of basis vectors)."""
    alpha = d.simple_roots[i]
    alpha_v = d.simple_coroots[i]
    n = d.rank
    return tuple(tuple((1 if r == c else 0) - alpha[c] * alpha_v[r] for c in range(n))
                 for r in range(n))


def weyl_group(d: RootDatum) -> tuple[WeylElement, ...]:
    """All Weyl elements, found by breadth-first closure over the generators.

    Elements carry reduced words (BFS depth equals Coxeter length); the
    returned tuple is sorted by matrix for reproducibility.
    """
    gens = [simple_reflection_matrix(d, i) for i in range(d.semisimple_rank)]
    ident = identity_matrix(d.rank)
    seen: dict[IntMat, tuple[int, ...]] = {ident: ()}
    frontier = [ident]
    while frontier:
        new_frontier = []
        for m in frontier:
            for i, g in enumerate(gens):
                prod = mat_mul(m, g)
                if prod not in seen:
                    seen[prod] = seen[m] + (i,)
                    new_frontier.append(prod)
        frontier = new_frontier
    return tuple(WeylElement(m, w) for m, w in sorted(seen.items()))


def classical_weyl_order(d: RootDatum) -> int:
    """Product-formula order for the detected Cartan type."""
    order = 1
    for label in cartan_type(d):
        family, n = label[0], int(label[1:])
        if family == "A":
            order *= factorial(n + 1)
        elif family in ("B", "C"):
            order *= 2 ** n * factorial(n)
        elif family == "D":
            order *= 2 ** (n - 1) * factorial(n)
        else:
            order *= _WEYL_ORDER_EXCEPTIONAL[label]
    return order


def cartan_type(d: RootDatum) -> tuple[str, ...]:
    """Sorted component labels of the Dynkin diagram.

    The rank-2 double-bond system is reported as B2 in either orientation,
    matching the isomorphism of the underlying root systems.
    """
    k = d.semisimple_rank
    cartan = d.cartan_matrix()
    adj = {i: [j for j in range(k) if j != i and cartan[i][j] != 0] for i in range(k)}
    unvisited = set(range(k))
    labels = []
    while unvisited:
        start = min(unvisited)
        comp = [start]
        stack = [start]
        unvisited.discard(start)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w in unvisited:
                    unvisited.discard(w)
                    comp.append(w)
                    stack.append(w)
        labels.append(_classify_component(sorted(comp), cartan, adj))
    return tuple(sorted(labels))


def _classify_component(comp, cartan, adj) -> str:
    n = len(comp)
    if n == 1:
        return "A1"
    bonds = {}
    for i in comp:
        for j in adj[i]:
            if j > i:
                bonds[(i, j)] = cartan[i][j] * cartan[j][i]
    if any(m == 3 for m in bonds.values()):
        if n != 2:
            raise NonCartan("triple bond in a component of rank > 2")
        return "G2"
    doubles = [e for e, m in bonds.items() if m == 2]
    degree = {i: len(adj[i]) for i in comp}
    if doubles:
        if len(doubles) != 1:
            raise NonCartan("several double bonds in one component")
        if n == 2:
            return "B2"
        (u, v) = doubles[0]
        if degree[u] == 2 and degree[v] == 2 and n == 4:
            return "F4"
        # |<alpha_v, alpha_u^>| = 2 forces alpha_v long and alpha_u short.
        short, lng = (u, v) if cartan[u][v] == -2 else (v, u)
        if degree[short] == 1:
            return f"B{n}"
        if degree[lng] == 1:
            return f"C{n}"
        raise NonCartan("double bond not at a chain end")
    branch = [i for i in comp if degree[i] >= 3]
    if not branch:
        return f"A{n}"
    if len(branch) > 1 or degree[branch[0]] > 3:
        raise NonCartan("diagram has an unsupported branch pattern")
    b = branch[0]
    arms = []
    for start in adj[b]:
        length = 1
        prev, cur = b, start
        while True:
            nxt = [x for x in adj[cur] if x != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{n}"
    if arms == [1, 2, 2]:
        return "E6"
    if arms == [1, 2, 3]:
        return "E7"
    if arms == [1, 2, 4]:
        return "E8"
    raise NonCartan(f"arm lengths {arms} match no finite diagram")


@dataclass(frozen=True)
class CentralSubgroup:
    """Finite subgroup of the torus given by cocharacter classes mod X∨."""

    generators: tuple[QVec, ...]
    order: int

    def elements(self) -> tuple[QVec, ...]:
        return subgroup_mod1(self.generators, max(len(g) for g in self.generators) if self.generators else 0)


def subgroup_mod1(gens, rank: int) -> tuple[QVec, ...]:
    """Closure of rational generators under addition mod Z^rank."""
    zero = tuple(Fraction(0) for _ in range(rank))
    elems = {zero}
    frontier = [zero]
    norm_gens = [normalize_mod1(g) for g in gens]
    while frontier:
        new_frontier = []
        for e in frontier:
            for g in norm_gens:
                s = normalize_mod1(tuple(a + b for a, b in zip(e, g)))
                if s not in elems:
                    elems.add(s)
                    new_frontier.append(s)
        frontier = new_frontier
    return tuple(sorted(elems))


def central_subgroup(d: RootDatum, generators) -> CentralSubgroup:
    """Build a central subgroup, checking integrality against every root."""
    gens = tuple(normalize_mod1(tuple(Fraction(x) for x in g)) for g in generators)
    for g in gens:
        if len(g) != d.rank:
            raise NotCentral("generator length does not match the rank")
        for alpha in d.simple_roots:
            if dot(alpha, g) % 1 != 0:
                raise NotCentral(f"<{alpha}, {g}> is not integral")
    elems = subgroup_mod1(gens, d.rank)
    return CentralSubgroup(gens, len(elems))


def quotient_by_central(d: RootDatum, z: CentralSubgroup) -> RootDatum:
    """Datum of the quotient group: X∨ grows by z, X shrinks to its dual."""
    return quotient_with_map(d, z)[0]


def quotient_with_map(d: RootDatum, z: CentralSubgroup) -> tuple[RootDatum, tuple]:
    """Quotient datum plus the matrix sending old X∨⊗Q coordinates to new."""
    if not z.generators or z.order == 1:
        gens: list[QVec] = []
    else:
        gens = list(z.generators)
    for g in gens:
        for alpha in d.simple_roots:
            if dot(alpha, g) % 1 != 0:
                raise NotCentral(f"<{alpha}, {g}> is not integral")
    n = d.rank
    rows = [tuple(r) for r in identity_matrix(n)]
    denom = 1
    scaled: list[IntVec] = []
    if gens:
        joined = [x for g in gens for x in g]
        _, denom = clear_denominators(tuple(joined))
    for row in rows:
        scaled.append(tuple(x * denom for x in row))
    for g in gens:
        scaled.append(tuple(int(Fraction(x) * denom) for x in g))
    basis_rows = hnf_rows(scaled)
    if len(basis_rows) != n:
        raise NotCentral("degenerate central subgroup")
    # Columns of m are the new basis vectors in old coordinates.
    m = transpose(tuple(tuple(Fraction(x, denom) for x in row) for row in basis_rows))
    m_inv = invert(m)
    mt = transpose(m)

    def to_new_coroot(v: IntVec) -> IntVec:
        image = mat_vec(m_inv, v)
        return tuple(int(x) for x in image)

    def to_new_root(v: IntVec) -> IntVec:
        image = mat_vec(mt, v)
        if any(Fraction(x).denominator != 1 for x in image):
            raise NotCentral("root pairs non-integrally with the enlarged lattice")
        return tuple(int(x) for x in image)

    new_roots = tuple(to_new_root(a) for a in d.simple_roots)
    new_coroots = tuple(to_new_coroot(a) for a in d.simple_coroots)
    return build_root_datum(n, new_roots, new_coroots), m_inv


def central_torsion_points(d: RootDatum) -> tuple[QVec, ...]:
    """All torus points pairing integrally with every root (semisimple only)."""
    if not d.is_semisimple():
        raise ValueError("central torsion enumeration needs a semisimple datum")
    if d.rank == 0:
        return ((),)
    basis = hnf_rows(list(d.roots))
    reps = dual_lattice_quotient(tuple(basis))
    return tuple(sorted(normalize_mod1(t) for t in reps))


def central_cochar_subspace(d: RootDatum) -> tuple[QVec, ...]:
    """Q-basis of the cocharacter directions killed by every root."""
    if not d.simple_roots:
        return tuple(tuple(Fraction(x) for x in row) for row in identity_matrix(d.rank))
    rows = [[Fraction(x) for x in alpha] for alpha in d.simple_roots]
    n = d.rank
    pivots = []
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col] / rows[rank][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for r, col in enumerate(pivots):
            vec[col] = -rows[r][f] / rows[r][col]
        basis.append(tuple(vec))
    return tuple(basis)


def canonical_key(d: RootDatum) -> bytes:
    """Isogeny-class key: Cartan types, lattice positions, central rank.

    Data related by an integral basis change composed with a root-system
    automorphism share keys; the invariants are the type decomposition, the
    Smith normal forms of X∨ between Q∨ and P∨, and the central torus rank.
    """
    types = cartan_type(d)
    ss_rank = d.semisimple_rank
    central_rank = d.rank - ss_rank
    if ss_rank == 0:
        return f"datum;v1;types=;pv_x=;x_qv=;central={central_rank}".encode()

    # Saturate the coroot span inside X∨ to get the semisimple sublattice.
    q_basis = hnf_rows(list(d.coroots))
    sat_basis = _saturation_basis(tuple(q_basis))

    # X∨_ss / Q∨ from coroot coordinates in the saturated basis.
    rel = []
    for row in q_basis:
        coords = coords_in_rows(sat_basis, row)
        rel.append(tuple(int(x) for x in coords))
    x_over_q = invariant_factors(tuple(rel))

    # P∨ / X∨_ss from the pairing of simple roots with the saturated basis.
    gram = tuple(tuple(dot(alpha, b) for b in sat_basis) for alpha in d.simple_roots)
    p_over_x = invariant_factors(gram)

    return (f"datum;v1;types={','.join(types)};pv_x={p_over_x};"
            f"x_qv={x_over_q};central={central_rank}").encode()


def _saturation_basis(rows: IntMat) -> tuple[IntVec, ...]:
    """Basis of the saturation of the integer row span inside Z^n."""
    _, _, v = snf_with_transforms(rows)
    v_inv = invert(v)
    r = len(rows)
    return tuple(tuple(int(x) for x in row) for row in tuple(v_inv)[:r])


def contragredient(m: IntMat) -> IntMat:
    """Action on X induced by an integral automorphism of X∨."""
    inv = invert(m)
    return tuple(tuple(int(x) for x in row) for row in transpose(inv))
