"""Assembly of the discrete-part identities from packet models.

Each parameter model with a dual-group attachment yields per-component
numbers i_φ(x) (signed Weyl-coset sums) and e_φ(x) (elliptic classes fed
through σ).  The three global forms evaluated here — the triple-indexed
discrete part, the elliptic-class stable form, and the descriptor-indexed
endoscopic form — are finite sums that must agree exactly; the continuous
twist families of the analytic theory are collapsed to one representative
per orbit, which turns every integral into the finite sum evaluated here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .elliptic import SemisimpleClass, elliptic_classes
from .errors import InconsistentDescriptor, MissingDualGroup
from .linalg import dot, in_integer_row_span, mat_vec, matrix_rank
from .packets import (
    GR_ZERO,
    GaussianRational,
    ParameterModel,
    SElement,
    TestVector,
    theta_transfer,
)
from .rootdata import CentralSubgroup, RootDatum, central_cochar_subspace, subgroup_mod1
from .sigma import SigmaTable, sigma
from .weylcoset import i_number, weyl_set


def s_disc_set(m: ParameterModel) -> frozenset[SElement]:
    """Components whose Weyl coset contains a regular element."""
    if m.dual_group is None:
        raise MissingDualGroup(f"model {m.model_id} has no dual-group attachment")
    out = set()
    for x in m.s_elements():
        if any(e.regular for e in weyl_set(m.component_at(x))):
            out.add(x)
    return frozenset(out)


def i_phi(m: ParameterModel, x: SElement) -> Fraction:
    """i-number of the component attached to x; zero off the discrete set."""
    comp = m.component_at(x)
    if x not in s_disc_set(m):
        return Fraction(0)
    return i_number(comp)


def e_phi(m: ParameterModel, x: SElement, table: SigmaTable | None = None) -> Fraction:
    """Elliptic-class sum Σ |π₀|⁻¹·σ(centralizer) on the component of x."""
    if table is None:
        table = SigmaTable()
    comp = m.component_at(x)
    total = Fraction(0)
    for cls in elliptic_classes(comp):
        total += Fraction(1, cls.pi0) * sigma(cls.centralizer_datum, table)
    return total


def phi_disc(m: ParameterModel) -> bool:
    """Whether the attachment has no twist-stable central torus directions."""
    if m.dual_group is None:
        raise MissingDualGroup(f"model {m.model_id} has no dual-group attachment")
    base = m.dual_group.base
    central = central_cochar_subspace(base)
    if not central:
        return True
    # v = Σ c_j b_j is fixed by every twist iff the stacked rows kill c.
    coeff_rows = []
    for x in m.s_elements():
        theta = m.dual_group.thetas[x]
        images = [mat_vec(theta, b) for b in central]
        for i in range(len(central[0])):
            coeff_rows.append(tuple(images[j][i] - central[j][i] for j in range(len(central))))
    fixed_dim = len(central) - matrix_rank(coeff_rows)
    return fixed_dim == 0


def phi_s_disc(m: ParameterModel) -> bool:
    """Whether the base datum itself has finite center (roots span)."""
    if m.dual_group is None:
        raise MissingDualGroup(f"model {m.model_id} has no dual-group attachment")
    return m.dual_group.base.is_semisimple()


@dataclass(frozen=True)
class DiscreteModelSet:
    models: tuple[ParameterModel, ...]

    def __post_init__(self):
        ids = [m.model_id for m in self.models]
        if len(set(ids)) != len(ids):
            raise ValueError("model ids must be unique")
        for m in self.models:
            if m.dual_group is None:
                raise MissingDualGroup(f"model {m.model_id} has no dual-group attachment")


def discrete_part(ms: DiscreteModelSet, f1: TestVector, f2: TestVector) -> GaussianRational:
    """Triple-indexed form: Σ_τ i_φ(ι(τ))·Θ(τ,f₁)·conj(Θ(τ,f₂))·|R|⁻¹."""
    total = GR_ZERO
    for m in ms.models:
        disc = s_disc_set(m)
        weight = Fraction(1, m.r.size)
        for tau in m.taus():
            x = m.iota(tau)
            if x not in disc:
                continue
            coeff = i_number(m.component_at(x))
            if not coeff:
                continue
            term = theta_transfer(m, tau, f1) * theta_transfer(m, tau, f2).conjugate()
            total = total + term * (coeff * weight)
    return total


def stable_form(ms: DiscreteModelSet, f1: TestVector, f2: TestVector,
                table: SigmaTable | None = None) -> GaussianRational:
    """Elliptic-class form: Σ_s |S|⁻¹·|π₀(s)|⁻¹·σ(S°_s)·f'₁·conj(f'₂)."""
    if table is None:
        table = SigmaTable()
    total = GR_ZERO
    for m in ms.models:
        for x in m.s_elements():
            comp = m.component_at(x)
            fvals = f1.value(m.model_id, x) * f2.value(m.model_id, x).conjugate()
            for cls in elliptic_classes(comp):
                coeff = (Fraction(1, m.s_size)
                         * Fraction(1, cls.pi0)
                         * sigma(cls.centralizer_datum, table))
                if coeff:
                    total = total + fvals * coeff
    return total


@dataclass(frozen=True)
class EndoscopicDescriptor:
    """Numerical invariants of the endoscopic datum attached to one class."""

    group_label: str
    model_id: str
    x: SElement
    class_index: int
    out_card: int
    out_phi_card: int
    zbar: CentralSubgroup
    sprime_datum: RootDatum
    splus_over_s_card: int
    s_phi_prime_card: int


def iota_coefficient(out_card: int, zbar_card: int) -> Fraction:
    return Fraction(1, out_card) * Fraction(1, zbar_card)


def fixed_intersection_order(m: ParameterModel, x: SElement, zbar: CentralSubgroup) -> int:
    """|S̄° ∩ Z̄| for the class component: elements with a θ_x-fixed lift.

    A torsion point lies in the connected centralizer's maximal torus exactly
    when some rational representative is fixed by the twist, i.e. when
    (θ−1)·z lands in (θ−1)·X∨.
    """
    if m.dual_group is None:
        raise MissingDualGroup(f"model {m.model_id} has no dual-group attachment")
    theta = m.dual_group.thetas[x]
    n = m.dual_group.base.rank
    delta = tuple(tuple(theta[i][j] - (1 if i == j else 0) for j in range(n))
                  for i in range(n))
    delta_cols = tuple(zip(*delta)) if n else ()
    count = 0
    for z in subgroup_mod1(zbar.generators, n):
        image = mat_vec(delta, z)
        if in_integer_row_span(delta_cols, image):
            count += 1
    return count


@dataclass(frozen=True)
class CoefficientReport:
    checks: tuple[tuple[str, str, str, bool], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, _, _, ok in self.checks)

    def failed_names(self) -> tuple[str, ...]:
        return tuple(name for name, _, _, ok in self.checks if not ok)


def _locate_class(m: ParameterModel, d: EndoscopicDescriptor) -> SemisimpleClass:
    classes = elliptic_classes(m.component_at(d.x))
    if not 0 <= d.class_index < len(classes):
        raise InconsistentDescriptor(
            f"class index {d.class_index} out of range on component {d.x}")
    return classes[d.class_index]


def verify_coefficients(m: ParameterModel, d: EndoscopicDescriptor,
                        table: SigmaTable | None = None) -> CoefficientReport:
    """Exact checks of the coefficient chain for one class descriptor.

    (a) the σ central-quotient step σ(S̄°_{φ'}) = σ(S̄°_{φ,s})·|S̄° ∩ Z̄|,
    (b) the full product collapse to |Out|⁻¹|Z̄|⁻¹|S_{φ'}|⁻¹σ(S̄°_{φ'}),
    (c) the cardinality bookkeeping behind |S_{φ'}|, and
    (d) integrality sanity: the parameter-orbit size |Out|/|Out(φ')| is whole.
    """
    if table is None:
        table = SigmaTable()
    cls = _locate_class(m, d)
    for alpha in cls.centralizer_datum.simple_roots:
        for g in d.zbar.generators:
            if len(g) == len(alpha) and dot(alpha, g) % 1 != 0:
                raise InconsistentDescriptor("zbar is not central in the class centralizer")
    intersection = fixed_intersection_order(m, d.x, d.zbar)
    sigma_cent = sigma(cls.centralizer_datum, table)
    sigma_prime = sigma(d.sprime_datum, table)
    checks = []

    lhs_a = sigma_prime
    rhs_a = sigma_cent * intersection
    checks.append(("sigma_quotient", str(lhs_a), str(rhs_a), lhs_a == rhs_a))

    lhs_b = (Fraction(m.s_size, d.splus_over_s_card)
             * Fraction(d.out_phi_card, d.out_card)
             * Fraction(1, m.s_size * cls.pi0) * sigma_cent)
    rhs_b = (Fraction(1, d.out_card) * Fraction(1, d.zbar.order)
             * Fraction(1, d.s_phi_prime_card) * sigma_prime)
    checks.append(("coefficient_product", str(lhs_b), str(rhs_b), lhs_b == rhs_b))

    lhs_c = Fraction(d.s_phi_prime_card * d.out_phi_card)
    rhs_c = Fraction(d.splus_over_s_card * cls.pi0 * intersection, d.zbar.order)
    checks.append(("cardinality_bookkeeping", str(lhs_c), str(rhs_c), lhs_c == rhs_c))

    ok_d = (d.out_card % d.out_phi_card == 0
            and min(d.out_card, d.out_phi_card, d.splus_over_s_card,
                    d.s_phi_prime_card, d.zbar.order) >= 1)
    checks.append(("orbit_integrality", str(d.out_card), str(d.out_phi_card), ok_d))

    return CoefficientReport(tuple(checks))


def endoscopic_form(ms: DiscreteModelSet, descriptors, f1: TestVector, f2: TestVector,
                    table: SigmaTable | None = None) -> GaussianRational:
    """Descriptor-grouped form Σ_{G'} ι(G,G')·Σ_{φ'} |S_{φ'}|⁻¹σ(S̄°_{φ'})·f₁·conj(f₂).

    Each class descriptor stands for out/out_phi parameter points of its
    group, and |S|/splus classes share each point, so the descriptor carries
    the weight (out·splus)/(out_phi·|S|).  Descriptors are validated first;
    an inconsistent one is a hard error, never a silent wrong sum.
    """
    if table is None:
        table = SigmaTable()
    by_model = {m.model_id: m for m in ms.models}
    by_group: dict[str, list[EndoscopicDescriptor]] = {}
    for d in descriptors:
        if d.model_id not in by_model:
            raise InconsistentDescriptor(f"descriptor references unknown model {d.model_id}")
        report = verify_coefficients(by_model[d.model_id], d, table)
        if not report.passed:
            raise InconsistentDescriptor(
                f"descriptor for {d.model_id}:{d.x} fails {report.failed_names()}")
        by_group.setdefault(d.group_label, []).append(d)

    total = GR_ZERO
    for label in sorted(by_group):
        group = by_group[label]
        iotas = {iota_coefficient(d.out_card, d.zbar.order) for d in group}
        if len(iotas) != 1:
            raise InconsistentDescriptor(f"group {label} mixes distinct iota coefficients")
        iota = iotas.pop()
        for d in group:
            m = by_model[d.model_id]
            weight = Fraction(d.out_card * d.splus_over_s_card,
                              d.out_phi_card * m.s_size)
            coeff = (iota * weight * Fraction(1, d.s_phi_prime_card)
                     * sigma(d.sprime_datum, table))
            if coeff:
                fvals = (f1.value(d.model_id, d.x)
                         * f2.value(d.model_id, d.x).conjugate())
                total = total + fvals * coeff
    return total


def s_disc(ms: DiscreteModelSet, f1: TestVector, f2: TestVector,
           table: SigmaTable | None = None) -> GaussianRational:
    """Stable spectral distribution over models with semisimple base."""
    if table is None:
        table = SigmaTable()
    total = GR_ZERO
    for m in ms.models:
        if not phi_s_disc(m):
            continue
        coeff = Fraction(1, m.s_size) * sigma(m.dual_group.base, table)
        if coeff:
            x0 = (0, 0)
            fvals = f1.value(m.model_id, x0) * f2.value(m.model_id, x0).conjugate()
            total = total + fvals * coeff
    return total
