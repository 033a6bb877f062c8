"""Built-in group data, fixture models, and seeded random model generation.

Named data cover the desk-scale verification set; the fixture models are the
worked examples used throughout the test suite, each with honestly computed
endoscopic descriptors (the descriptor numbers are group-theoretic facts
about the fixture, spelled out where they are nonobvious).
"""

from __future__ import annotations

from fractions import Fraction
from random import Random

from .elliptic import elliptic_classes
from .errors import MalformedInput
from .linalg import identity_matrix, mat_vec, normalize_mod1
from .packets import DualGroupModel, GaussianRational, ParameterModel, TestVector, TwoGroup
from .rootdata import RootDatum, build_root_datum, central_subgroup, weyl_group
from .stabilize import EndoscopicDescriptor
from .weylcoset import TwistedComponent, component, untwisted_component

_DATA_SPECS = {
    "trivial": (0, (), ()),
    "gl1": (1, (), ()),
    "sl2": (1, ((2,),), ((1,),)),
    "pgl2": (1, ((1,),), ((2,),)),
    "sl3": (2, ((2, -1), (-1, 2)), ((1, 0), (0, 1))),
    "pgl3": (2, ((1, 0), (0, 1)), ((2, -1), (-1, 2))),
    "sp4": (2, ((1, -1), (0, 2)), ((1, -1), (0, 1))),
    "so5": (2, ((1, -1), (0, 1)), ((1, -1), (0, 2))),
    "g2": (2, ((2, -1), (-3, 2)), ((1, 0), (0, 1))),
    "sl2xsl2": (2, ((2, 0), (0, 2)), ((1, 0), (0, 1))),
}

SWAP2 = ((0, 1), (1, 0))
NEG1 = ((-1,),)


def datum(name: str) -> RootDatum:
    if name not in _DATA_SPECS:
        raise MalformedInput(f"unknown catalog datum {name!r}")
    rank, roots, coroots = _DATA_SPECS[name]
    return build_root_datum(rank, roots, coroots)


def datum_names() -> tuple[str, ...]:
    return tuple(sorted(_DATA_SPECS))


def named_component(name: str) -> TwistedComponent:
    """Catalog components: every datum untwisted, plus the two twisted shapes."""
    if name == "o2_twist":
        return component(datum("gl1"), NEG1)
    if name == "a1a1_swap":
        return component(datum("sl2xsl2"), SWAP2)
    return untwisted_component(datum(name))


def component_names() -> tuple[str, ...]:
    return datum_names() + ("a1a1_swap", "o2_twist")


# ---------------------------------------------------------------------------
# Fixture models
# ---------------------------------------------------------------------------

def model_o2() -> ParameterModel:
    """S = R = Z/2 over a rank-1 torus; the nonidentity component is inverted."""
    dg = DualGroupModel(datum("gl1"), {(0, 0): identity_matrix(1), (0, 1): NEG1})
    return ParameterModel("o2", TwoGroup(0), TwoGroup(1), dg)


def model_sl2() -> ParameterModel:
    """S = S_M = Z/2, both components untwisted over an SL2 base."""
    ident = identity_matrix(1)
    dg = DualGroupModel(datum("sl2"), {(0, 0): ident, (1, 0): ident})
    return ParameterModel("sl2phi", TwoGroup(1), TwoGroup(0), dg)


def model_swap() -> ParameterModel:
    """S = R = Z/2 over SL2 x SL2 with the factor swap on the far component."""
    dg = DualGroupModel(datum("sl2xsl2"),
                        {(0, 0): identity_matrix(2), (0, 1): SWAP2})
    return ParameterModel("a1a1", TwoGroup(0), TwoGroup(1), dg)


def model_trivial() -> ParameterModel:
    dg = DualGroupModel(datum("trivial"), {(0, 0): ()})
    return ParameterModel("triv", TwoGroup(0), TwoGroup(0), dg)


def fixture_models() -> tuple[ParameterModel, ...]:
    return (model_o2(), model_sl2(), model_swap(), model_trivial())


# ---------------------------------------------------------------------------
# Endoscopic descriptors for the fixtures
# ---------------------------------------------------------------------------

def _splus(m: ParameterModel, x, cls) -> int:
    """Number of components meeting the point centralizer of the class.

    For a class in an untwisted component this counts twists sending the
    representative into its Weyl orbit.  In a twisted component of an |S| = 2
    model both components meet the centralizer (the class contains its own
    component element, and torus translation reaches the identity component).
    """
    comp = m.component_at(x)
    if comp.untwisted:
        w_matrices = [w.matrix for w in weyl_group(comp.base)]
        rep = cls.rep.coords
        canon = min(normalize_mod1(mat_vec(w, rep)) for w in w_matrices)
        count = 0
        for y in m.s_elements():
            image = normalize_mod1(mat_vec(m.dual_group.thetas[y], rep))
            if min(normalize_mod1(mat_vec(w, image)) for w in w_matrices) == canon:
                count += 1
        return count
    if m.s_size == 2:
        return 2
    raise MalformedInput("splus is only derived for untwisted classes or |S| = 2")


def principal_descriptors(m: ParameterModel) -> tuple[EndoscopicDescriptor, ...]:
    """One descriptor per elliptic class with trivial zbar (the G' = G shape).

    With zbar trivial the quotient step is the identity, so sprime is the
    class centralizer itself and |S_phi'| = splus·pi0 by the cardinality
    bookkeeping.  The class of the identity gets the distinguished label
    ``principal:<model>``; every other class gets its own label.
    """
    out = []
    zbar0 = central_subgroup(m.dual_group.base, ())
    for x in m.s_elements():
        classes = elliptic_classes(m.component_at(x))
        for idx, cls in enumerate(classes):
            splus = _splus(m, x, cls)
            is_identity_class = (x == (0, 0)
                                 and all(c == 0 for c in cls.rep.coords))
            label = (f"principal:{m.model_id}" if is_identity_class
                     else f"point:{m.model_id}:{x[0]}{x[1]}:{idx}")
            out.append(EndoscopicDescriptor(
                group_label=label,
                model_id=m.model_id,
                x=x,
                class_index=idx,
                out_card=1,
                out_phi_card=1,
                zbar=zbar0,
                sprime_datum=cls.centralizer_datum,
                splus_over_s_card=splus,
                s_phi_prime_card=splus * cls.pi0,
            ))
    return tuple(out)


def descriptors_o2() -> tuple[EndoscopicDescriptor, ...]:
    """The rank-1 torus pair: a single class on the inverted component.

    The centralizer of a reflection in the full disconnected group has four
    elements in two components (splus = 2, pi0 = 2), the flip of the torus
    stabilizes the transferred parameter (out = out_phi = 2), the center of
    the small group contributes order 2 but meets the trivial connected
    centralizer only in the identity, and the quotient side is the trivial
    group with |S_phi'| = 1.
    """
    m = model_o2()
    zbar = central_subgroup(datum("gl1"), ((Fraction(1, 2),),))
    return (EndoscopicDescriptor(
        group_label="u1",
        model_id=m.model_id,
        x=(0, 1),
        class_index=0,
        out_card=2,
        out_phi_card=2,
        zbar=zbar,
        sprime_datum=datum("trivial"),
        splus_over_s_card=2,
        s_phi_prime_card=1,
    ),)


def descriptors_sl2_central() -> tuple[EndoscopicDescriptor, ...]:
    """SL2-base fixture quotiented by its order-2 center on every class.

    Both components are untwisted so the center meets each connected
    centralizer entirely; the quotient side is the adjoint datum and the
    bookkeeping gives |S_phi'| = 2.
    """
    m = model_sl2()
    base = datum("sl2")
    zbar = central_subgroup(base, ((Fraction(1, 2),),))
    out = []
    for x in m.s_elements():
        classes = elliptic_classes(m.component_at(x))
        for idx, _cls in enumerate(classes):
            out.append(EndoscopicDescriptor(
                group_label=f"sl2z:{x[0]}{x[1]}:{idx}",
                model_id=m.model_id,
                x=x,
                class_index=idx,
                out_card=1,
                out_phi_card=1,
                zbar=zbar,
                sprime_datum=datum("pgl2"),
                splus_over_s_card=2,
                s_phi_prime_card=2,
            ))
    return tuple(out)


def fixture_descriptors() -> dict[str, tuple[EndoscopicDescriptor, ...]]:
    """One covering descriptor set per fixture model (each class exactly once).

    ``descriptors_sl2_central`` is an alternate covering of the SL2 model and
    must replace, not join, the principal set when evaluated.
    """
    return {
        "o2": descriptors_o2(),
        "sl2phi": principal_descriptors(model_sl2()),
        "a1a1": principal_descriptors(model_swap()),
        "triv": principal_descriptors(model_trivial()),
    }


# ---------------------------------------------------------------------------
# Seeded random models and test vectors
# ---------------------------------------------------------------------------

def _diag_sign_theta(rank: int, bits: tuple[int, ...]):
    return tuple(tuple((-1 if (i < len(bits) and bits[i]) else 1) if i == j else 0
                       for j in range(rank)) for i in range(rank))


def random_model(rng: Random, index: int) -> ParameterModel:
    """A model from the supported bank: untwisted bases, inverted tori, swaps."""
    kind = rng.choice(("untwisted", "torus", "swap"))
    sm_dim = rng.randint(0, 2)
    if kind == "untwisted":
        base = datum(rng.choice(("trivial", "gl1", "sl2", "pgl2", "sl3", "sp4", "sl2xsl2")))
        r_dim = rng.randint(0, 2)
        ident = identity_matrix(base.rank)
        thetas = {(xm, xr): ident
                  for xm in range(1 << sm_dim) for xr in range(1 << r_dim)}
    elif kind == "torus":
        rank = rng.randint(1, 2)
        base = build_root_datum(rank, (), ())
        r_dim = rng.randint(1, 2)
        thetas = {}
        for xm in range(1 << sm_dim):
            for xr in range(1 << r_dim):
                bits = tuple((xr >> i) & 1 for i in range(min(r_dim, rank)))
                thetas[(xm, xr)] = _diag_sign_theta(rank, bits)
    else:
        base = datum("sl2xsl2")
        r_dim = 1
        thetas = {}
        for xm in range(1 << sm_dim):
            thetas[(xm, 0)] = identity_matrix(2)
            thetas[(xm, 1)] = SWAP2
    dg = DualGroupModel(base, thetas)
    return ParameterModel(f"rnd{index}", TwoGroup(sm_dim), TwoGroup(r_dim), dg)


def random_scalar(rng: Random) -> GaussianRational:
    return GaussianRational(Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
                            Fraction(rng.randint(-6, 6), rng.randint(1, 4)))


def random_test_vector(rng: Random, models) -> TestVector:
    values = {}
    for m in models:
        for x in m.s_elements():
            values[(m.model_id, x)] = random_scalar(rng)
    return TestVector(values)
