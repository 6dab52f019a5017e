"""Pointwise exact verification of the symplectic identities on the family.

A two-form on a four-dimensional chart is stored as the antisymmetric matrix M with
form = sum over i < j of M[i][j] du_i ^ du_j. Derivatives come from second-order jets.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple

from .curve import CurveInstance
from .errors import IncidencePoleError, IncidenceVarietyError, PreconditionError
from .exact import QQ, format_rational
from .jets import Jet2, jet2_seed
from .maps import app_matrix
from .report import Report
from .samples import RationalSampler, sampler_for

logger = logging.getLogger(__name__)

DIMENSION = 4
ZC_COORDINATES = ("z1", "z2", "c1", "c2")
ZZETA_COORDINATES = ("z1", "z2", "zeta1", "zeta2")

Point = Tuple[Fraction, ...]
Matrix = Tuple[Tuple[Fraction, ...], ...]
FormField = Callable[[Point], Matrix]
Mapping = Callable[..., Sequence[Any]]


@dataclass(frozen=True)
class TwoFormSample:
    """Coefficients of a two-form at one exact point."""

    point: Point
    matrix: Matrix
    coordinates: Tuple[str, ...] = ZC_COORDINATES

    def __post_init__(self):
        m = self.matrix
        if len(m) != DIMENSION or any(len(row) != DIMENSION for row in m):
            raise PreconditionError(f"A two-form sample needs a {DIMENSION}x{DIMENSION} matrix")
        if any(m[i][j] != -m[j][i] for i in range(DIMENSION) for j in range(DIMENSION)):
            raise PreconditionError("Two-form coefficient matrix is not antisymmetric")

    def coefficient(self, first: str, second: str) -> Fraction:
        """Coefficient of d(first) ^ d(second)."""
        return self.matrix[self.coordinates.index(first)][self.coordinates.index(second)]

    def reordered(self, coordinates: Sequence[str]) -> "TwoFormSample":
        order = [self.coordinates.index(name) for name in coordinates]
        return TwoFormSample(
            tuple(self.point[i] for i in order),
            tuple(tuple(self.matrix[i][j] for j in order) for i in order),
            tuple(coordinates),
        )

    def to_record(self) -> dict:
        return {
            "coordinates": list(self.coordinates),
            "point": [format_rational(v) for v in self.point],
            "matrix": [[format_rational(v) for v in row] for row in self.matrix],
        }


def _zero_matrix() -> List[List[Fraction]]:
    return [[Fraction(0)] * DIMENSION for _ in range(DIMENSION)]


def _antisymmetric(upper: dict) -> Matrix:
    m = _zero_matrix()
    for (i, j), value in upper.items():
        m[i][j] += value
        m[j][i] -= value
    return tuple(tuple(row) for row in m)


def _as_point(values: Sequence[Any]) -> Point:
    if len(values) != DIMENSION:
        raise PreconditionError(f"Expected {DIMENSION} coordinates, got {len(values)}")
    return tuple(QQ.coerce(v) for v in values)


def omega_canonical(point: Sequence[Any]) -> TwoFormSample:
    """dc1 ^ dz1 + dc2 ^ dz2 in the coordinates (z1, z2, c1, c2)."""
    return TwoFormSample(_as_point(point), _antisymmetric({(2, 0): Fraction(1), (3, 1): Fraction(1)}))


def wedge_square(sample: TwoFormSample) -> Fraction:
    """Coefficient of form ^ form on du0 ^ du1 ^ du2 ^ du3, which is twice the Pfaffian."""
    m = sample.matrix
    return 2 * (m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2])


def jacobian(mapping: Mapping, point: Point) -> Tuple[Point, Matrix]:
    """Image of ``point`` and the Jacobian J[a][i] = d F_a / d u_i."""
    columns = []
    image: Optional[Point] = None
    for i in range(len(point)):
        outputs = [Jet2.lift(value) for value in mapping(*jet2_seed(point, (i, i)))]
        if image is None:
            image = tuple(out.v for out in outputs)
        columns.append([out.d1 for out in outputs])
    rows = tuple(tuple(columns[i][a] for i in range(len(point))) for a in range(len(image)))
    return image, rows


def pullback_two_form(
    form: FormField, mapping: Mapping, point: Sequence[Any], coordinates: Sequence[str] = ZC_COORDINATES
) -> TwoFormSample:
    """F*form at ``point``: J^T M(F(point)) J."""
    point = _as_point(point)
    image, jac = jacobian(mapping, point)
    target = form(image)
    pulled = tuple(
        tuple(
            sum(
                (jac[a][i] * target[a][b] * jac[b][j] for a in range(DIMENSION) for b in range(DIMENSION)),
                Fraction(0),
            )
            for j in range(DIMENSION)
        )
        for i in range(DIMENSION)
    )
    return TwoFormSample(point, pulled, tuple(coordinates))


def _par_higgs(inst: CurveInstance) -> Mapping:
    def mapping(z1, z2, zeta1, zeta2):
        return (z1, z2, inst.nu1 / (2 * (z1 - zeta1)), inst.nu2 / (2 * (z2 - zeta2)))

    return mapping


def _require_off_incidence(point: Point) -> None:
    for index in (0, 1):
        if point[index] == point[index + 2]:
            raise IncidenceVarietyError(f"z{index + 1} = zeta{index + 1} = {point[index]}")


def par_pullback_form(inst: CurveInstance, sample: Sequence[Any]) -> TwoFormSample:
    """-1/2 [nu1 dz1 ^ dzeta1 / (z1 - zeta1)^2 + nu2 dz2 ^ dzeta2 / (z2 - zeta2)^2]."""
    point = _as_point(sample)
    _require_off_incidence(point)
    return CrossRatioForm((-inst.nu1 / 2, -inst.nu2 / 2)).at(point)


@dataclass(frozen=True)
class CrossRatioForm:
    """Form field sum_k weights[k] dz_k ^ dzeta_k / (z_k - zeta_k)^2 in coordinates (z1, z2, zeta1, zeta2)."""

    weights: Tuple[Fraction, Fraction]

    def matrix(self, point: Point) -> Matrix:
        return _antisymmetric(
            {(k, k + 2): self.weights[k] / ((point[k] - point[k + 2]) * (point[k] - point[k + 2])) for k in (0, 1)}
        )

    def at(self, point: Point) -> TwoFormSample:
        return TwoFormSample(point, self.matrix(point), ZZETA_COORDINATES)


def par_pullback_check(inst: CurveInstance, sample: Sequence[Any]) -> bool:
    """Pull omega back along the inverse Par map c_i = nu_i / (2 (z_i - zeta_i)) and compare with the closed form.

    Raises:
        IncidenceVarietyError: If z_i = zeta_i
    """
    expected = par_pullback_form(inst, sample)
    pulled = pullback_two_form(lambda image: omega_canonical(image).matrix, _par_higgs(inst), sample, ZZETA_COORDINATES)
    return pulled.matrix == expected.matrix


def _bun_prime_gradients(inst: CurveInstance, z1: Any, z2: Any) -> Tuple[Tuple[Any, ...], ...]:
    """Partials of (b0, b1, b2) along (z1, z2, c1, c2); b does not depend on c."""
    t, r = inst.t, inst.r
    zero = 0 * z1
    return (
        (zero - 1, zero - 1, zero, zero),
        (t - 2 * z2, t - 2 * z1, zero, zero),
        (zero + r, zero - r, zero, zero),
    )


def eta_coefficients(inst: CurveInstance, z1: Any, z2: Any, c1: Any, c2: Any) -> Tuple[Any, ...]:
    """Coefficients of eta = (nu1 + nu2 + 1)/4 * (a . db) / (a . b) along (dz1, dz2, dc1, dc2).

    Works for any scalar type with field arithmetic, jets included.
    """
    m = app_matrix(inst, (z1, z2))
    a = [m[i][0] + m[i][1] * c1 + m[i][2] * c2 for i in range(3)]
    t = inst.t
    b = (2 * t - z1 - z2, t * (z1 + z2) - 2 * z1 * z2, inst.r * (z1 - z2))
    pairing = a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    weight = (inst.nu1 + inst.nu2 + 1) / 4
    gradients = _bun_prime_gradients(inst, z1, z2)
    return tuple(
        weight * (a[0] * gradients[0][j] + a[1] * gradients[1][j] + a[2] * gradients[2][j]) / pairing
        for j in range(DIMENSION)
    )


def _require_eta_domain(inst: CurveInstance, point: Point) -> None:
    if inst.nu1 + inst.nu2 + 1 == 0:
        raise PreconditionError("eta is defined only when nu1 + nu2 + 1 != 0")
    z1, z2, c1, c2 = point
    m = app_matrix(inst, (z1, z2))
    a = [m[i][0] + m[i][1] * c1 + m[i][2] * c2 for i in range(3)]
    t = inst.t
    b = (2 * t - z1 - z2, t * (z1 + z2) - 2 * z1 * z2, inst.r * (z1 - z2))
    if a[0] * b[0] + a[1] * b[1] + a[2] * b[2] == 0:
        raise IncidencePoleError(f"a . b vanishes at {tuple(format_rational(v) for v in point)}")


def eta_exterior_derivative(inst: CurveInstance, sample: Sequence[Any]) -> TwoFormSample:
    """d eta at a point, from first partials of the eta coefficients.

    Raises:
        PreconditionError: If nu1 + nu2 + 1 = 0
        IncidencePoleError: If a . b = 0 at the sample
    """
    point = _as_point(sample)
    _require_eta_domain(inst, point)
    partials = []
    for j in range(DIMENSION):
        jets = eta_coefficients(inst, *jet2_seed(point, (j, j)))
        partials.append([Jet2.lift(value).d1 for value in jets])
    # (d eta)[j][l] = d_j eta_l - d_l eta_j
    matrix = tuple(tuple(partials[j][l] - partials[l][j] for l in range(DIMENSION)) for j in range(DIMENSION))
    return TwoFormSample(point, matrix)


def eta_and_domega_check(inst: CurveInstance, sample: Sequence[Any]) -> bool:
    """Whether d eta equals dc1 ^ dz1 + dc2 ^ dz2 at the sample."""
    derivative = eta_exterior_derivative(inst, sample)
    return derivative.matrix == omega_canonical(sample).matrix


def mixed_partial_check(inst: CurveInstance, sample: Sequence[Any]) -> bool:
    """Second partials of every eta coefficient agree in both orders, so d(d eta) = 0 at the sample."""
    point = _as_point(sample)
    _require_eta_domain(inst, point)
    for j in range(DIMENSION):
        for l in range(j + 1, DIMENSION):
            forward = eta_coefficients(inst, *jet2_seed(point, (j, l)))
            backward = eta_coefficients(inst, *jet2_seed(point, (l, j)))
            if any(Jet2.lift(f).d12 != Jet2.lift(b).d12 for f, b in zip(forward, backward)):
                return False
    return True


MOBIUS_GENERATORS = {
    "scale": lambda u: 2 * u,
    "translate": lambda u: u + 1,
    "invert": lambda u: 1 / u,
}


def _diagonal(generator: Callable[[Any], Any]) -> Mapping:
    def mapping(*coordinates):
        return tuple(generator(u) for u in coordinates)

    return mapping


def _swap_lift(z1, z2, zeta1, zeta2):
    return (z2, z1, zeta2, zeta1)


def _torelli_samples(sampler: RationalSampler, count: int) -> List[Point]:
    def admissible(point: Point) -> bool:
        return all(point) and point[0] != point[2] and point[1] != point[3]

    return [sampler.point(DIMENSION, admissible) for _ in range(count)]


def torelli_invariance_checks(
    inst: CurveInstance, sampler: Optional[RationalSampler] = None, count: int = 10
) -> Report:
    """Moebius invariance of dz ^ dzeta / (z - zeta)^2 and the swap lift exchanging nu1 and nu2."""
    sampler = sampler or sampler_for("torelli")
    report = Report("torelli")
    weights = (inst.nu1, inst.nu2)
    form = CrossRatioForm(weights)
    swapped = CrossRatioForm((inst.nu2, inst.nu1))
    for index, point in enumerate(_torelli_samples(sampler, count)):
        original = form.at(point)
        for name, generator in MOBIUS_GENERATORS.items():
            report.run(
                f"mobius[{name}][{index:02d}]",
                lambda g=generator, p=point, o=original: (
                    pullback_two_form(form.matrix, _diagonal(g), p, ZZETA_COORDINATES).matrix == o.matrix,
                    f"pullback differs at {[format_rational(v) for v in p]}",
                ),
            )
        report.run(
            f"swap_lift[{index:02d}]",
            lambda p=point: (
                pullback_two_form(form.matrix, _swap_lift, p, ZZETA_COORDINATES).matrix == swapped.matrix(p),
                f"swap lift does not exchange nu1 and nu2 at {[format_rational(v) for v in p]}",
            ),
        )
    logger.debug(f"Torelli checks: {len(report.checks)} run, {len(report.failures())} failed")
    return report


def symplectic_samples(inst: CurveInstance, suite: str, sampler: RationalSampler, count: int) -> Iterable[Point]:
    """Deterministic sample points for the par and eta suites, off their excluded loci."""

    def admissible(point: Point) -> bool:
        if suite == "par":
            return point[0] != point[2] and point[1] != point[3]
        z1, z2, c1, c2 = point
        return z1 != inst.t and z2 != inst.t

    for _ in range(count):
        yield sampler.point(DIMENSION, admissible)


def run_symplectic_suite(
    inst: CurveInstance, suite: str, sampler: Optional[RationalSampler] = None, count: int = 20
) -> Report:
    """Run one of the ``par``, ``eta`` or ``torelli`` suites as a report."""
    if suite == "torelli":
        return torelli_invariance_checks(inst, sampler, min(count, 10))
    if suite not in ("par", "eta"):
        raise PreconditionError(f"Unknown symplectic suite {suite!r}")
    sampler = sampler or sampler_for(suite)
    report = Report(f"symplectic-{suite}")
    points = []
    for index, point in enumerate(symplectic_samples(inst, suite, sampler, count)):
        points.append([format_rational(v) for v in point])
        if suite == "par":
            report.run(f"par_pullback[{index:02d}]", lambda p=point: par_pullback_check(inst, p))
        else:
            report.run(f"eta_domega[{index:02d}]", lambda p=point: eta_and_domega_check(inst, p))
            report.run(f"closedness[{index:02d}]", lambda p=point: mixed_partial_check(inst, p))
    report.data["samples"] = points
    return report
