from fractions import Fraction

import pytest

from tracestab import catalog
from tracestab.rootdata import build_root_datum, central_subgroup
from tracestab.sigma import SigmaTable, sigma, verify_central_quotient, verify_ei


@pytest.mark.parametrize("name,expected", [
    ("trivial", Fraction(1)),
    ("gl1", Fraction(0)),
    ("sl2", Fraction(-1, 8)),
    ("pgl2", Fraction(-1, 4)),
    ("sl3", Fraction(1, 27)),
    ("pgl3", Fraction(1, 9)),
    ("sl2xsl2", Fraction(1, 64)),
])
def test_sigma_values(name, expected):
    assert sigma(catalog.datum(name)) == expected


def test_sigma_zero_for_positive_central_rank():
    d = build_root_datum(2, [(2, 0)], [(1, 0)])  # SL2 x GL1
    assert sigma(d) == 0
    assert sigma(build_root_datum(3, [], [])) == 0


def test_sigma_product_law():
    assert sigma(catalog.datum("sl2xsl2")) == sigma(catalog.datum("sl2")) ** 2


def test_central_quotient_sl2():
    d = catalog.datum("sl2")
    z = central_subgroup(d, [(Fraction(1, 2),)])
    assert verify_central_quotient(d, z)
    assert sigma(d) == sigma(catalog.datum("pgl2")) / 2


def test_central_quotient_trivial():
    d = catalog.datum("sp4")
    assert verify_central_quotient(d, central_subgroup(d, []))


def test_central_quotient_sl3():
    d = catalog.datum("sl3")
    z = central_subgroup(d, [(Fraction(1, 3), Fraction(2, 3))])
    assert z.order == 3
    assert verify_central_quotient(d, z)
    assert sigma(d) == sigma(catalog.datum("pgl3")) / 3


def test_central_quotient_sp4():
    d = catalog.datum("sp4")
    z = central_subgroup(d, [(Fraction(1, 2), Fraction(1, 2))])
    assert z.order == 2
    assert verify_central_quotient(d, z)


@pytest.mark.parametrize("name", catalog.component_names())
def test_verify_ei_on_catalog(name):
    report = verify_ei(catalog.named_component(name))
    assert report.equal, f"e={report.e} != i={report.i} on {name}"


def test_verify_ei_examples():
    rep = verify_ei(catalog.named_component("sl2"))
    assert rep.e == rep.i == Fraction(-1, 4)
    rep = verify_ei(catalog.named_component("o2_twist"))
    assert rep.e == rep.i == Fraction(1, 2)
    assert rep.per_class[0].pi0 == 2
    rep = verify_ei(catalog.named_component("gl1"))
    assert rep.e == rep.i == 0 and rep.per_class == ()


def test_recursion_order_independence():
    for name in ("sp4", "so5", "g2"):
        d = catalog.datum(name)
        forward = sigma(d, SigmaTable())
        backward = sigma(d, SigmaTable(), _order=lambda cs: list(reversed(cs)))
        assert forward == backward


def test_table_idempotence():
    d = catalog.datum("g2")
    table = SigmaTable()
    cold = sigma(d, table)
    warm = sigma(d, table)
    assert cold == warm
    fresh = sigma(d, SigmaTable())
    assert cold == fresh


def test_table_reuse_across_isogenous_data():
    table = SigmaTable()
    sigma(catalog.datum("sl2"), table)
    sigma(catalog.datum("pgl2"), table)
    values = sorted(table.entries.values())
    assert Fraction(-1, 8) in values and Fraction(-1, 4) in values
    # The central-quotient rule holds across every stored isogenous pair.
    d = catalog.datum("sl2")
    z = central_subgroup(d, [(Fraction(1, 2),)])
    assert verify_central_quotient(d, z, table)


def test_rank0_base_case():
    assert sigma(catalog.datum("trivial")) == 1


def test_provenance_recorded():
    table = SigmaTable()
    sigma(catalog.datum("sp4"), table)
    from tracestab.rootdata import canonical_key

    trace = table.provenance[canonical_key(catalog.datum("sp4"))]
    assert trace["case"] == "recursion"
    assert trace["central_classes"] == 2

def test_e_equals_i_on_isogeny_quotients():
    # Quotient lattices exercise non-standard coordinates end to end.
    from tracestab.rootdata import canonical_key, quotient_by_central
    from tracestab.weylcoset import untwisted_component

    table = SigmaTable()
    half = Fraction(1, 2)
    d = catalog.datum("sl2xsl2")
    so4 = quotient_by_central(d, central_subgroup(d, [(half, half)]))
    assert verify_ei(untwisted_component(so4), table).equal
    assert sigma(so4, table) == 2 * sigma(d, table)
    adjoint = quotient_by_central(d, central_subgroup(d, [(half, Fraction(0)),
                                                          (Fraction(0), half)]))
    assert verify_ei(untwisted_component(adjoint), table).equal
    assert sigma(adjoint, table) == sigma(catalog.datum("pgl2"), table) ** 2
    sp4 = catalog.datum("sp4")
    q = quotient_by_central(sp4, central_subgroup(sp4, [(half, half)]))
    assert canonical_key(q) == canonical_key(catalog.datum("so5"))
    assert verify_ei(untwisted_component(q), table).equal

