"""Central charges, phases and topological constants on the model spaces.

Intersection numbers are kept as :class:`fractions.Fraction` and complex values
as pairs of Fractions, so sums of charge terms are exact.  Floats entering the
tables are converted with ``Fraction(float)``, which is exact for the binary
value, so only the final conversion to ``complex`` rounds.
"""

from __future__ import annotations

import math
from itertools import combinations
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .errors import DegreeMismatch, ZeroCharge


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x))


def _gauss(z):
    """Exact (re, im) pair for a number or an explicit pair."""
    if isinstance(z, tuple):
        return _frac(z[0]), _frac(z[1])
    z = complex(z)
    return _frac(z.real), _frac(z.imag)


def _gmul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


@dataclass(frozen=True)
class ManifoldChargeTerm:
    """``coefficient * int alpha^alpha_power . ch_{k_1}(X) ... ch_{k_r}(X)``."""

    coefficient: complex
    alpha_power: int
    chern_multi_index: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "chern_multi_index", tuple(int(k) for k in self.chern_multi_index))
        if self.alpha_power < 0 or any(k < 1 for k in self.chern_multi_index):
            raise DegreeMismatch("alpha power must be >= 0 and Chern indices >= 1")

    @property
    def degree(self):
        return self.alpha_power + sum(self.chern_multi_index)


@dataclass(frozen=True)
class BundleChargeTerm:
    """``coefficient * int alpha^alpha_power . ch_chern_degree(E) . Theta_theta_degree``."""

    coefficient: complex
    alpha_power: int
    chern_degree: int
    theta_degree: int = 0

    def __post_init__(self):
        if min(self.alpha_power, self.chern_degree, self.theta_degree) < 0:
            raise DegreeMismatch("degrees must be nonnegative")

    @property
    def degree(self):
        return self.alpha_power + self.chern_degree + self.theta_degree


@dataclass(frozen=True)
class CentralChargeSpec:
    kind: str
    terms: tuple
    dimension: int
    theta_class: tuple = (1,)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("manifold", "bundle"):
            raise ValueError(f"unknown charge kind {self.kind!r}")
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "theta_class", tuple(self.theta_class))
        if not self.terms:
            raise ValueError("a central charge needs at least one term")
        term_type = ManifoldChargeTerm if self.kind == "manifold" else BundleChargeTerm
        for t in self.terms:
            if not isinstance(t, term_type):
                raise TypeError(f"{self.kind} charge got a {type(t).__name__}")
            if t.degree != self.dimension:
                raise DegreeMismatch(
                    f"term {t} has degree {t.degree}, expected {self.dimension}")

    def theta(self, degree):
        if degree < len(self.theta_class):
            return self.theta_class[degree]
        return 0

    def __add__(self, other):
        if (self.kind, self.dimension) != (other.kind, other.dimension):
            raise DegreeMismatch("cannot concatenate charges of different kind or dimension")
        if self.kind == "bundle" and self.theta_class != other.theta_class:
            raise ValueError("bundle charges must share the auxiliary class")
        return CentralChargeSpec(self.kind, self.terms + other.terms, self.dimension,
                                 self.theta_class, f"{self.name}+{other.name}")

    def scaled(self, factor):
        """Copy with every coefficient multiplied by ``factor``."""
        terms = tuple(replace(t, coefficient=complex(t.coefficient) * factor) for t in self.terms)
        return CentralChargeSpec(self.kind, terms, self.dimension, self.theta_class, self.name)


@dataclass(frozen=True)
class ModelTopology:
    """Topological data of a model manifold or bundle.

    ``intersections`` maps ``(j, sorted k-tuple)`` to ``int alpha^j ch_k1 ... ch_kr``
    for the manifold; entries absent from the table are zero.  For bundles,
    ``bundle_ch[k] = int alpha^(n-k) . ch_k(E)``; the auxiliary class is taken to be
    ``Theta_m = theta_m alpha^m``, so no further table is needed.
    """

    dimension: int
    volume: Fraction
    intersections: dict = field(default_factory=dict)
    rank: int | None = None
    bundle_ch: tuple = ()
    label: str = ""

    def intersection(self, j, ks=()):
        ks = tuple(sorted(ks))
        if j + sum(ks) != self.dimension:
            raise DegreeMismatch(f"alpha^{j} ch_{ks} has the wrong degree for n={self.dimension}")
        if not ks:
            return self.volume
        return self.intersections.get((j, ks), Fraction(0))

    @property
    def is_bundle(self):
        return self.rank is not None

    @property
    def degree(self):
        return self.bundle_ch[1] if len(self.bundle_ch) > 1 else Fraction(0)


def torus_topology(n, areas=None):
    """Flat torus with Kahler class ``sum_a areas[a] dx_a ^ dy_a``; all ch_k, k >= 1, vanish."""
    areas = [_frac(a) for a in (areas or [1] * n)]
    if len(areas) != n:
        raise ValueError("need one area per complex dimension")
    return ModelTopology(n, math.factorial(n) * math.prod(areas), {}, label=f"T{2 * n}")


def cp1_topology(area=4 * math.pi):
    """CP^1 with ``int alpha = area`` and ``int c_1 = 2``."""
    return ModelTopology(1, _frac(area), {(0, (1,)): Fraction(2)}, label="CP1")


def torus_line_bundle_topology(n, degrees=None, areas=None, rank=1):
    """``L_1 x ... x L_n`` (tensored with C^rank) on a product torus.

    ``degrees[a]`` is the degree of the factor on the a-th elliptic curve, so that
    ``c_1(L) = sum_a degrees[a] [dx_a ^ dy_a]``.
    """
    areas = [_frac(a) for a in (areas or [1] * n)]
    degrees = [_frac(d) for d in (degrees or [0] * n)]
    base = torus_topology(n, areas)
    ch = []
    for k in range(n + 1):
        total = Fraction(0)
        for chosen in combinations(range(n), k):
            prod = Fraction(1)
            for a in range(n):
                prod *= degrees[a] if a in chosen else areas[a]
            total += prod
        # alpha^(n-k) = (n-k)! sum over (n-k)-subsets, c_1^k / k! = sum over k-subsets
        ch.append(rank * math.factorial(n - k) * total)
    return ModelTopology(n, base.volume, {}, rank=rank, bundle_ch=tuple(ch), label=f"{base.label}-bundle")


def _term_value(term, spec, topo):
    if spec.kind == "manifold":
        inter = topo.intersection(term.alpha_power, term.chern_multi_index)
        return _gmul(_gauss(term.coefficient), (_frac(inter), Fraction(0)))
    if not topo.is_bundle:
        raise DegreeMismatch("bundle charge evaluated on a manifold topology")
    inter = topo.bundle_ch[term.chern_degree] if term.chern_degree < len(topo.bundle_ch) else Fraction(0)
    theta = _gauss(spec.theta(term.theta_degree))
    return _gmul(_gmul(_gauss(term.coefficient), theta), (_frac(inter), Fraction(0)))


def evaluate_charge_exact(spec, topo):
    """Exact ``(re, im)`` of Z, without the zero check."""
    if spec.dimension != topo.dimension:
        raise DegreeMismatch(f"charge of dimension {spec.dimension} on a {topo.dimension}-dimensional model")
    re, im = Fraction(0), Fraction(0)
    for term in spec.terms:
        a, b = _term_value(term, spec, topo)
        re += a
        im += b
    return re, im


def evaluate_charge(spec, topo):
    """Z(X, alpha) or Z(E) as a complex number; raises ZeroCharge when it vanishes exactly."""
    re, im = evaluate_charge_exact(spec, topo)
    if re == 0 and im == 0:
        raise ZeroCharge(f"central charge {spec.name or spec} vanishes on {topo.label or 'model'}")
    return complex(float(re), float(im))


def phase(z):
    """arg z on the branch (-pi, pi]; the negative real axis maps to +pi."""
    z = complex(z)
    if z == 0:
        raise ZeroCharge("phase of zero is undefined")
    if z.imag == 0 and z.real < 0:
        return math.pi
    return math.atan2(z.imag, z.real)


def average_scalar(topo):
    """Topological average scalar curvature n int c_1 alpha^(n-1) / int alpha^n."""
    if topo.volume <= 0:
        raise ValueError("average scalar curvature needs int alpha^n > 0")
    n = topo.dimension
    return float(n * topo.intersection(n - 1, (1,)) / topo.volume)


def hym_slope(topo):
    """HYM constant lambda with (i/2pi) Lambda F = lambda Id.

    Equals n deg(E) / (rk(E) int alpha^n); the volume factor is 1 on unit-volume models.
    """
    if not topo.is_bundle:
        raise ValueError("hym_slope needs a bundle topology")
    return float(topo.dimension * topo.degree / (topo.rank * topo.volume))


# built-in charges -----------------------------------------------------------------

def _neg_i_power(j):
    return [1, -1j, -1, 1j][j % 4] / math.factorial(j)


def csck_charge(n):
    return CentralChargeSpec("manifold", (ManifoldChargeTerm(1j, n, ()), ManifoldChargeTerm(-1, n - 1, (1,))),
                             n, name="cscK")


def exp_charge(n):
    """int e^{-i alpha} ch(X) with ch_0(X) = n folded into the pure alpha^n coefficient."""
    terms = [ManifoldChargeTerm(_neg_i_power(j), j, (n - j,)) for j in range(n)]
    terms.append(ManifoldChargeTerm(n * _neg_i_power(n), n, ()))
    return CentralChargeSpec("manifold", tuple(terms), n, name="exp")


def dhym_charge(n, theta_class=(1,)):
    """int e^{-i alpha} ch(E) . Theta restricted to Theta = 1 unless given."""
    terms = []
    for j in range(n + 1):
        for m in range(n - j + 1):
            if m < len(theta_class) and theta_class[m] != 0:
                terms.append(BundleChargeTerm(_neg_i_power(j), j, n - j - m, m))
    return CentralChargeSpec("bundle", tuple(terms), n, tuple(theta_class), name="dhym")


def hym_charge(n):
    """-int alpha^(n-1) ch_1(E) + i int alpha^n ch_0(E)."""
    return CentralChargeSpec("bundle", (BundleChargeTerm(-1, n - 1, 1, 0), BundleChargeTerm(1j, n, 0, 0)),
                             n, name="hym")


BUILTIN = {"cscK": csck_charge, "exp": exp_charge, "dhym": dhym_charge, "hym": hym_charge}


def builtin_charges(n):
    """All built-in charges for complex dimension n, keyed by name."""
    return {name: make(n) for name, make in BUILTIN.items()}


def lookup_charge(name, n):
    for key, make in BUILTIN.items():
        if key.lower() == name.lower():
            return make(n)
    raise NameError(f"no built-in central charge named {name!r}")


def charge_from_terms(kind, n, terms: Sequence, theta=(1,), name=""):
    """Build a spec from config-style rows ``[re, im, j, k]``.

    For manifolds ``k`` is a list of Chern indices; for bundles it is the Chern
    degree, optionally followed by the theta degree.
    """
    built = []
    for row in terms:
        re, im, j, rest = row[0], row[1], int(row[2]), row[3:]
        coeff = complex(re, im)
        if kind == "manifold":
            ks = rest[0] if rest else []
            built.append(ManifoldChargeTerm(coeff, j, tuple(ks)))
        else:
            k = int(rest[0]) if rest else 0
            m = int(rest[1]) if len(rest) > 1 else n - j - k
            built.append(BundleChargeTerm(coeff, j, k, m))
    theta = tuple(complex(t[0], t[1]) if isinstance(t, (list, tuple)) else t for t in theta)
    return CentralChargeSpec(kind, tuple(built), n, theta, name)
