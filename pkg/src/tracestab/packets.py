"""Finite packet models: component 2-groups and spectral transfer factors.

A model fixes two elementary abelian 2-groups — the Levi-level component
group S_M and the R-group R — and takes their product S = S_M × R with the
splitting built in.  Characters of S pair with the components φ^x through a
±1-valued table normalized so the base character pairs trivially; transfer
factors, their adjoints, and the inversion formulas are finite character
sums over that table, all in exact arithmetic (Gaussian rationals, so
conjugation is exact).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from .errors import MismatchedModel, MissingDualGroup
from .linalg import IntMat, identity_matrix, invert, mat_mul
from .rootdata import RootDatum, weyl_group
from .weylcoset import TwistedComponent, component

Tau = tuple[int, int]  # (character of S_M, element of R)
SElement = tuple[int, int]  # (S_M part, R part), bitmask coordinates


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex scalar a + b·i with rational a, b."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return GaussianRational(Fraction(value), Fraction(0))

    def __add__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


GR_ZERO = GaussianRational()
GR_ONE = GaussianRational(Fraction(1))


@dataclass(frozen=True)
class TwoGroup:
    """Elementary abelian 2-group; elements and characters are bitmasks."""

    dim: int

    @property
    def size(self) -> int:
        return 1 << self.dim

    def elements(self) -> range:
        return range(self.size)

    @staticmethod
    def char(c: int, v: int) -> int:
        return -1 if bin(c & v).count("1") % 2 else 1


@dataclass(frozen=True)
class DualGroupModel:
    """Disconnected-group attachment: one twisted component per x in S."""

    base: RootDatum
    thetas: Mapping[SElement, IntMat]

    def component_at(self, x: SElement) -> TwistedComponent:
        return component(self.base, self.thetas[x])

    def validate(self, s_elements) -> None:
        ident = identity_matrix(self.base.rank)
        for x in s_elements:
            if x not in self.thetas:
                raise MismatchedModel(f"missing twist for component {x}")
            self.component_at(x)
        zero = (0, 0)
        if tuple(self.thetas[zero]) != ident:
            raise MismatchedModel("identity component must be untwisted")
        w_set = {w.matrix for w in weyl_group(self.base)}
        for x in s_elements:
            for y in s_elements:
                z = (x[0] ^ y[0], x[1] ^ y[1])
                prod = mat_mul(self.thetas[x], self.thetas[y])
                inv = tuple(tuple(int(v) for v in row) for row in invert(self.thetas[z]))
                if mat_mul(prod, inv) not in w_set:
                    raise MismatchedModel(f"twist cocycle fails at {x}, {y}")


@dataclass(frozen=True)
class ParameterModel:
    model_id: str
    s_m: TwoGroup
    r: TwoGroup
    dual_group: DualGroupModel | None = None
    # Test hook: pairing entries ((cm, cr), (xm, xr)) whose sign is flipped.
    pairing_flips: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.dual_group is not None:
            self.dual_group.validate(tuple(self.s_elements()))

    @property
    def s_size(self) -> int:
        return self.s_m.size * self.r.size

    def s_elements(self) -> list[SElement]:
        return [(xm, xr) for xm in self.s_m.elements() for xr in self.r.elements()]

    def taus(self) -> list[Tau]:
        return [(eta, r) for eta in self.s_m.elements() for r in self.r.elements()]

    def iota(self, tau: Tau) -> SElement:
        """The fixed labeling (η, r) ↦ (x_M(η), r) through S_M's self-duality."""
        self._check_tau(tau)
        return (tau[0], tau[1])

    def _check_tau(self, tau: Tau) -> None:
        eta, r = tau
        if not (0 <= eta < self.s_m.size and 0 <= r < self.r.size):
            raise MismatchedModel(f"triple {tau} does not belong to the model")

    def _check_x(self, x: SElement) -> None:
        xm, xr = x
        if not (0 <= xm < self.s_m.size and 0 <= xr < self.r.size):
            raise MismatchedModel(f"component label {x} does not belong to the model")

    def pairing(self, char: SElement, x: SElement) -> int:
        """±1 pairing of the packet member labeled by char against φ^x."""
        self._check_x(char)
        self._check_x(x)
        value = TwoGroup.char(char[0], x[0]) * TwoGroup.char(char[1], x[1])
        if (char, x) in self.pairing_flips:
            value = -value
        return value

    def component_at(self, x: SElement) -> TwistedComponent:
        if self.dual_group is None:
            raise MissingDualGroup(f"model {self.model_id} has no dual-group attachment")
        self._check_x(x)
        return self.dual_group.component_at(x)


def with_flipped_pairing(m: ParameterModel, char: SElement, x: SElement) -> ParameterModel:
    """Corrupted copy of a model with one pairing sign flipped (negative control)."""
    return replace(m, pairing_flips=m.pairing_flips | {(char, x)})


def transfer_factor(m: ParameterModel, tau: Tau, x: SElement) -> Fraction:
    """Δ(τ, φ^x) via the character sum over the R-group.

    The packet pairing carries the 1/|S| adjoint normalization, so the sum
    collapses to the closed form (|R|/|S|)·δ(r, r')·η(x_M) on honest models.
    """
    m._check_tau(tau)
    m._check_x(x)
    eta, r = tau
    total = 0
    for chi in m.r.elements():
        total += TwoGroup.char(chi, r) * m.pairing((eta, chi), x)
    return Fraction(total, m.s_size)


def transfer_factor_closed(m: ParameterModel, tau: Tau, x: SElement) -> Fraction:
    m._check_tau(tau)
    m._check_x(x)
    eta, r = tau
    if r != x[1]:
        return Fraction(0)
    return Fraction(m.r.size, m.s_size) * TwoGroup.char(eta, x[0])


def adjoint_factor(m: ParameterModel, x: SElement, tau: Tau) -> Fraction:
    """Δ(φ^x, τ) via the |R|⁻¹-weighted character sum."""
    m._check_tau(tau)
    m._check_x(x)
    eta, r = tau
    total = 0
    for chi in m.r.elements():
        total += TwoGroup.char(chi, r) * m.pairing((eta, chi), x)
    return Fraction(total, m.r.size)


def adjoint_factor_closed(m: ParameterModel, x: SElement, tau: Tau) -> Fraction:
    m._check_tau(tau)
    m._check_x(x)
    eta, r = tau
    if r != x[1]:
        return Fraction(0)
    return Fraction(TwoGroup.char(eta, x[0]))


def transfer_factor_tagged(m: ParameterModel, tagged_tau: tuple[str, Tau], x: SElement) -> Fraction:
    """Out-of-packet vanishing: triples from another model pair to zero."""
    model_id, tau = tagged_tau
    if model_id != m.model_id:
        return Fraction(0)
    return transfer_factor(m, tau, x)


@dataclass(frozen=True)
class TestVector:
    """Finitely supported assignment of Gaussian-rational values f'(φ, x)."""

    __test__ = False  # despite the name, not a pytest case

    values: Mapping[tuple[str, SElement], GaussianRational]

    def value(self, model_id: str, x: SElement) -> GaussianRational:
        return self.values.get((model_id, x), GR_ZERO)

    @staticmethod
    def constant(models, scalar) -> "TestVector":
        c = GaussianRational.of(scalar)
        out = {}
        for m in models:
            for x in m.s_elements():
                out[(m.model_id, x)] = c
        return TestVector(out)


def theta_transfer(m: ParameterModel, tau: Tau, f: TestVector,
                   restrict_to=None) -> GaussianRational:
    """Σ_x Δ(τ, φ^x)·f'(φ, x), optionally over a subset of components."""
    xs = m.s_elements() if restrict_to is None else [x for x in m.s_elements() if x in restrict_to]
    total = GR_ZERO
    for x in xs:
        factor = transfer_factor(m, tau, x)
        if factor:
            total = total + f.value(m.model_id, x) * factor
    return total


def invert_transfer(m: ParameterModel, x: SElement,
                    theta: Mapping[Tau, GaussianRational]) -> GaussianRational:
    """Σ_τ Δ(φ^x, τ)·Θ(τ); exact right-inverse of theta_transfer."""
    total = GR_ZERO
    for tau in m.taus():
        factor = adjoint_factor(m, x, tau)
        if factor:
            total = total + GaussianRational.of(theta.get(tau, GR_ZERO)) * factor
    return total


def verify_adjoint(m: ParameterModel) -> bool:
    """Exhaustive check of both adjoint relations on the model."""
    xs = m.s_elements()
    taus = m.taus()
    for x1 in xs:
        for x2 in xs:
            total = sum(adjoint_factor(m, x1, tau) * transfer_factor(m, tau, x2)
                        for tau in taus)
            if total != (1 if x1 == x2 else 0):
                return False
    for t1 in taus:
        for t2 in taus:
            total = sum(transfer_factor(m, t1, x) * adjoint_factor(m, x, t2)
                        for x in xs)
            if total != (1 if t1 == t2 else 0):
                return False
    return True
