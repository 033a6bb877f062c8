"""Elliptic semisimple classes and their centralizers.

A torsion point t of the torus represents the element exp(2πi·t); its
centralizer root system is Φ_t = {α : ⟨α, t⟩ ∈ Z} and the point is elliptic
exactly when Φ_t spans the whole cocharacter space.  Untwisted enumeration is
exact and complete: full-rank closed subsystems are produced by iterated
extended-diagram node deletion, the integral points of each subsystem come
from a Smith-normal-form lattice quotient, and representatives are deduped by
the full Weyl action.

Two twisted shapes are supported in closed form: an arbitrary fixed-point-free
twist of a torus datum, and a factor-swap of a doubled datum (handled by
folding to the diagonal).  Everything else raises TwistedUnsupported.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import TwistedUnsupported
from .linalg import (
    IntMat,
    IntVec,
    QVec,
    coords_in_rows,
    det,
    dot,
    dual_lattice_quotient,
    hnf_rows,
    identity_matrix,
    int_kernel,
    left_int_kernel,
    mat_mul,
    mat_vec,
    normalize_mod1,
)
from .rootdata import RootDatum, build_root_datum, weyl_group
from .weylcoset import TwistedComponent


@dataclass(frozen=True)
class TorusPoint:
    coords: QVec
    order: int


@dataclass(frozen=True)
class SemisimpleClass:
    rep: TorusPoint
    centralizer_datum: RootDatum
    pi0: int
    elliptic: bool
    component_tag: str


def torus_point(coords) -> TorusPoint:
    """Normalize coordinates into [0,1)^n and record the additive order."""
    normalized = normalize_mod1(tuple(Fraction(x) for x in coords))
    order = lcm(*(f.denominator for f in normalized)) if normalized else 1
    return TorusPoint(normalized, order)


def _require_untwisted(c: TwistedComponent, operation: str):
    if not c.untwisted:
        raise TwistedUnsupported(f"{operation} needs the untwisted component")


def _reflection_in(d: RootDatum, root: IntVec) -> IntMat:
    coroot = d.coroot_of(root)
    n = d.rank
    return tuple(tuple((1 if r == c else 0) - root[c] * coroot[r] for c in range(n))
                 for r in range(n))


def integral_root_subset(d: RootDatum, t: QVec) -> tuple[IntVec, ...]:
    return tuple(alpha for alpha in d.roots if dot(alpha, t) % 1 == 0)


def sub_datum(d: RootDatum, roots) -> RootDatum:
    """Based sub-datum on the same lattice spanned by a closed root subset."""
    roots = set(map(tuple, roots))
    positives = sorted(r for r in roots if d.is_positive(r))
    simples = []
    positive_set = set(positives)
    for alpha in positives:
        decomposable = any(
            tuple(a - b for a, b in zip(alpha, beta)) in positive_set
            for beta in positives if beta != alpha
        )
        if not decomposable:
            simples.append(alpha)
    return build_root_datum(d.rank, tuple(simples),
                            tuple(d.coroot_of(a) for a in simples))


def _orbit_canonical(w_matrices, t: QVec) -> QVec:
    return min(normalize_mod1(mat_vec(m, t)) for m in w_matrices)


def _stabilizer_order(w_matrices, t: QVec) -> int:
    return sum(1 for m in w_matrices if normalize_mod1(mat_vec(m, t)) == t)


def _reflection_subgroup_order(d: RootDatum, roots) -> int:
    gens = {_reflection_in(d, r) for r in roots}
    if not gens:
        return 1
    ident = identity_matrix(d.rank)
    seen = {ident}
    frontier = [ident]
    while frontier:
        new_frontier = []
        for m in frontier:
            for g in gens:
                prod = mat_mul(m, g)
                if prod not in seen:
                    seen.add(prod)
                    new_frontier.append(prod)
        frontier = new_frontier
    return len(seen)


def centralizer(c: TwistedComponent, t: TorusPoint) -> tuple[RootDatum, int]:
    """Connected-centralizer datum and component count |W_t| / |W(Φ_t)|."""
    _require_untwisted(c, "centralizer")
    d = c.base
    roots_t = integral_root_subset(d, t.coords)
    datum = sub_datum(d, roots_t)
    w_matrices = [w.matrix for w in weyl_group(d)]
    pi0 = _stabilizer_order(w_matrices, t.coords) // _reflection_subgroup_order(d, roots_t)
    return datum, pi0


def is_elliptic(c: TwistedComponent, t: TorusPoint) -> bool:
    """Whether the centralizer of exp(2πi·t)·θ has finite center."""
    if c.untwisted:
        roots_t = integral_root_subset(c.base, t.coords)
        if not roots_t:
            return c.base.rank == 0
        return len(hnf_rows(list(roots_t))) == c.base.rank
    shape = _twist_shape(c)
    if shape == "torus":
        delta = _theta_minus_one(c)
        return det(delta) != 0
    if shape == "fold":
        folded, _ = _fold(c)
        if len(t.coords) != folded.rank:
            raise TwistedUnsupported("swap-component points use folded coordinates")
        from .weylcoset import untwisted_component

        return is_elliptic(untwisted_component(folded), t)
    raise TwistedUnsupported("ellipticity test for this twist shape")


def _theta_minus_one(c: TwistedComponent) -> IntMat:
    n = c.base.rank
    return tuple(tuple(c.theta[i][j] - (1 if i == j else 0) for j in range(n))
                 for i in range(n))


def _twist_shape(c: TwistedComponent) -> str:
    if c.untwisted:
        return "untwisted"
    if not c.base.roots:
        return "torus"
    theta = c.theta
    n = c.base.rank
    if mat_mul(theta, theta) != identity_matrix(n):
        return "unsupported"
    for root, coroot in zip(c.base.roots, c.base.coroots):
        image = tuple(mat_vec(theta, coroot))
        if image == coroot:
            return "unsupported"
        if dot(root, image) != 0:
            return "unsupported"
    fixed = int_kernel(_theta_minus_one(c))
    if 2 * len(fixed) != n:
        return "unsupported"
    return "fold"


def _fold(c: TwistedComponent) -> tuple[RootDatum, tuple[IntVec, ...]]:
    """Diagonal datum of a factor-swap component plus the fixed-lattice basis."""
    d = c.base
    fixed_basis = int_kernel(_theta_minus_one(c))
    m = len(fixed_basis)
    folded_pairs = {}
    for root, coroot in zip(d.roots, d.coroots):
        bar_root = tuple(dot(root, b) for b in fixed_basis)
        summed = tuple(x + y for x, y in zip(coroot, mat_vec(c.theta, coroot)))
        coords = coords_in_rows(fixed_basis, summed)
        if coords is None or any(Fraction(x).denominator != 1 for x in coords):
            raise TwistedUnsupported("folded coroot leaves the fixed lattice")
        bar_coroot = tuple(int(x) for x in coords)
        folded_pairs[bar_root] = bar_coroot
    positives = [r for r in folded_pairs if next((x for x in r if x), 0) > 0]
    positive_set = set(positives)
    simples = []
    for alpha in sorted(positives):
        if not any(tuple(a - b for a, b in zip(alpha, beta)) in positive_set
                   for beta in positives if beta != alpha):
            simples.append(alpha)
    folded = build_root_datum(m, tuple(simples),
                              tuple(folded_pairs[a] for a in simples))
    if set(folded.roots) != set(folded_pairs):
        raise TwistedUnsupported("twist is not a clean factor swap")
    return folded, tuple(fixed_basis)


def full_rank_subsystems(d: RootDatum, threads: int = 1) -> list[tuple[IntVec, ...]]:
    """Closed full-rank root subsystems up to Weyl conjugacy.

    Starts from Φ itself and iterates extended-diagram node deletion on each
    irreducible component until no new conjugacy class appears.
    """
    if not d.is_semisimple() or d.rank == 0:
        return [] if not d.is_semisimple() else [()]
    w_actions = [_x_action(w.matrix) for w in weyl_group(d)]

    def canon(roots: tuple[IntVec, ...]) -> tuple[IntVec, ...]:
        return min(tuple(sorted(tuple(int(x) for x in mat_vec(a, r)) for r in roots))
                   for a in w_actions)

    full = tuple(sorted(d.roots))
    seen = {canon(full): full}
    frontier = [full]
    while frontier:
        new_frontier = []
        if threads > 1 and len(frontier) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                expansions = list(pool.map(lambda r: _bds_children(d, r), frontier))
        else:
            expansions = [_bds_children(d, roots) for roots in frontier]
        for children in expansions:
            for child in children:
                key = canon(child)
                if key not in seen:
                    seen[key] = child
                    new_frontier.append(child)
        frontier = new_frontier
    return sorted(seen.values())


def _x_action(matrix_on_coweights: IntMat) -> IntMat:
    from .rootdata import contragredient

    return contragredient(matrix_on_coweights)


def _closure_under_reflections(d: RootDatum, seeds) -> tuple[IntVec, ...]:
    roots = set()
    for s in seeds:
        roots.add(tuple(s))
        roots.add(tuple(-x for x in s))
    changed = True
    while changed:
        changed = False
        snapshot = list(roots)
        for beta in snapshot:
            coroot = d.coroot_of(beta)
            for alpha in snapshot:
                image = tuple(a - dot(alpha, coroot) * b for a, b in zip(alpha, beta))
                if image not in roots:
                    roots.add(image)
                    changed = True
    return tuple(sorted(roots))


def _bds_children(d: RootDatum, roots: tuple[IntVec, ...]) -> list[tuple[IntVec, ...]]:
    psi = sub_datum(d, roots)
    simples = list(psi.simple_roots)
    if not simples:
        return []
    coroots = {s: psi.simple_coroots[i] for i, s in enumerate(simples)}
    components = _diagram_components(simples, coroots)
    children = []
    for comp in components:
        highest = _highest_root(psi, comp)
        lowest = tuple(-x for x in highest)
        extended = comp + [lowest]
        rest = [s for s in simples if s not in comp]
        for drop in range(len(extended) - 1):  # dropping the affine node is a no-op
            seeds = rest + [r for k, r in enumerate(extended) if k != drop]
            child = _closure_under_reflections(d, seeds)
            if len(hnf_rows(list(child))) == d.rank:
                children.append(child)
    return children


def _diagram_components(simples, coroots) -> list[list[IntVec]]:
    remaining = list(simples)
    comps = []
    while remaining:
        comp = [remaining.pop(0)]
        grew = True
        while grew:
            grew = False
            for s in list(remaining):
                if any(dot(s, coroots[t]) != 0 for t in comp):
                    comp.append(s)
                    remaining.remove(s)
                    grew = True
        comps.append(sorted(comp))
    return comps


def _highest_root(psi: RootDatum, comp_simples) -> IntVec:
    best = None
    best_height = None
    for r in psi.roots:
        coeffs = coords_in_rows(tuple(comp_simples), r)
        if coeffs is None:
            continue
        if any(c < 0 for c in coeffs):
            continue
        height = sum(coeffs)
        if best is None or height > best_height:
            best, best_height = r, height
    return best


def elliptic_classes(c: TwistedComponent, threads: int = 1) -> tuple[SemisimpleClass, ...]:
    """Complete duplicate-free list of elliptic classes of the component.

    Untwisted components use the subsystem-closure algorithm; supported
    twists are reduced in closed form.  The list is never silently partial:
    unsupported twists raise.
    """
    shape = _twist_shape(c)
    if shape == "untwisted":
        return _elliptic_classes_untwisted(c, threads)
    if shape == "torus":
        return _elliptic_classes_torus_twist(c)
    if shape == "fold":
        folded, _ = _fold(c)
        from .weylcoset import untwisted_component

        inner = _elliptic_classes_untwisted(untwisted_component(folded), threads)
        return tuple(SemisimpleClass(k.rep, k.centralizer_datum, k.pi0, k.elliptic, c.tag)
                     for k in inner)
    raise TwistedUnsupported("no enumeration for this twist shape")


def _elliptic_classes_untwisted(c: TwistedComponent, threads: int = 1) -> tuple[SemisimpleClass, ...]:
    d = c.base
    if not d.is_semisimple():
        return ()
    if d.rank == 0:
        trivial = build_root_datum(0, (), ())
        return (SemisimpleClass(torus_point(()), trivial, 1, True, c.tag),)
    w_matrices = [w.matrix for w in weyl_group(d)]
    subsystems = full_rank_subsystems(d, threads)

    def points_of(roots) -> list[QVec]:
        basis = hnf_rows(list(roots))
        return dual_lattice_quotient(tuple(basis))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            point_lists = list(pool.map(points_of, subsystems))
    else:
        point_lists = [points_of(roots) for roots in subsystems]

    reps = set()
    for plist in point_lists:
        for t in plist:
            reps.add(_orbit_canonical(w_matrices, t))
    classes = []
    for t in sorted(reps):
        roots_t = integral_root_subset(d, t)
        datum = sub_datum(d, roots_t)
        pi0 = _stabilizer_order(w_matrices, t) // _reflection_subgroup_order(d, roots_t)
        classes.append(SemisimpleClass(torus_point(t), datum, pi0, True, c.tag))
    return tuple(classes)


def _elliptic_classes_torus_twist(c: TwistedComponent) -> tuple[SemisimpleClass, ...]:
    delta = _theta_minus_one(c)
    d_det = det(delta)
    if d_det == 0:
        return ()  # the fixed subtorus forces an infinite centralizer center
    trivial = build_root_datum(0, (), ())
    rep = torus_point(tuple(Fraction(0) for _ in range(c.base.rank)))
    return (SemisimpleClass(rep, trivial, int(abs(d_det)), True, c.tag),)


def validate_twisted_candidates(c: TwistedComponent, points) -> dict:
    """Torsion-level validation of a user-supplied candidate list.

    Checks pairwise non-conjugacy under the Weyl action combined with
    (1−θ)-translation, and certifies ellipticity when θ has no fixed
    directions.  This validates a list; it never enumerates.
    """
    if c.untwisted:
        raise TwistedUnsupported("candidate validation is for twisted components")
    pts = [torus_point(p) for p in points]
    delta = _theta_minus_one(c)
    annihilator = left_int_kernel(delta)
    fixed_rank = len(int_kernel(delta))
    w_matrices = [w.matrix for w in weyl_group(c.base)]

    def conjugate_mod_translation(a: QVec, b: QVec) -> bool:
        for m in w_matrices:
            diff = tuple(x - y for x, y in zip(b, normalize_mod1(mat_vec(m, a))))
            if all(dot(row, diff) % 1 == 0 for row in annihilator):
                return True
        return False

    duplicates = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if conjugate_mod_translation(pts[i].coords, pts[j].coords):
                duplicates.append((i, j))
    elliptic: list[bool | None] = []
    for _ in pts:
        elliptic.append(True if fixed_rank == 0 else None)
    return {
        "points": tuple(p.coords for p in pts),
        "pairwise_distinct": not duplicates,
        "conjugate_pairs": tuple(duplicates),
        "elliptic": tuple(elliptic),
    }
