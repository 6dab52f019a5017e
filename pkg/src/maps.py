"""The Par, App and Bun' maps on the family, with the incidence relation and degeneration analysis.

Projective images are returned as exact tuples; ``normalize_projective`` gives their canonical
integer representative.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

from .connection import Direction, ExponentLedger, LogConnection, eigen, residue_data, trace_form
from .curve import CurveInstance, class_add, class_mul, point_class
from .errors import BlownUpPointError, IncidenceVarietyError, PreconditionError, TranscriptionError
from .exact import QQ, format_projective, normalize_projective
from .family import nabla_c

logger = logging.getLogger(__name__)

Matrix3 = Tuple[Tuple[Any, Any, Any], Tuple[Any, Any, Any], Tuple[Any, Any, Any]]
Slope = Optional[Fraction]


@dataclass(frozen=True)
class ParData:
    """Eigendirections p_k^+ and p_k^- of the residues at t1 and t2."""

    p1_plus: Direction
    p1_minus: Direction
    p2_plus: Direction
    p2_minus: Direction

    @property
    def zeta(self) -> Tuple[Slope, Slope]:
        """Slopes of the minus directions; None encodes (0:1)."""
        return (self.p1_minus.slope, self.p2_minus.slope)

    def to_record(self) -> dict:
        return {
            "p1_plus": str(self.p1_plus),
            "p1_minus": str(self.p1_minus),
            "p2_plus": str(self.p2_plus),
            "p2_minus": str(self.p2_minus),
        }


@dataclass(frozen=True)
class AppCoords:
    """Coordinates (a0:a1:a2) in the basis 1/(x-t), x/(x-t), y/(x-t)."""

    a0: Fraction
    a1: Fraction
    a2: Fraction

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.a0, self.a1, self.a2)

    def normalized(self) -> Tuple[int, ...]:
        return normalize_projective(self.as_tuple())

    def __str__(self) -> str:
        return format_projective(self.normalized())


@dataclass(frozen=True)
class BunPrimeCoords:
    b0: Fraction
    b1: Fraction
    b2: Fraction

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.b0, self.b1, self.b2)

    def normalized(self) -> Tuple[int, ...]:
        return normalize_projective(self.as_tuple())

    def __str__(self) -> str:
        return format_projective(self.normalized())


class AppVerdictKind(Enum):
    GENERIC_ISO = "GenericIso"
    LINE_IMAGE = "LineImage"
    CONSTANT_IMAGE = "ConstantImage"
    INDETERMINATE = "Indeterminate"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class AppVerdict:
    """Classification of App over a base point; ``axis`` names the ignored coordinate of a line image."""

    kind: AppVerdictKind
    axis: Optional[str] = None
    point: Optional[Tuple[int, ...]] = None

    def to_record(self) -> dict:
        return {
            "kind": self.kind.value,
            "axis": self.axis,
            "point": format_projective(self.point) if self.point else None,
        }


def par_closed_form(inst: CurveInstance, z: Sequence[Any], c1: Any, c2: Any) -> ParData:
    """p_k^+ = (1:z_k) and p_k^- = (c_k : c_k z_k - nu_k/2)."""
    z1, z2 = (QQ.coerce(v) for v in z)
    c1, c2 = QQ.coerce(c1), QQ.coerce(c2)
    return ParData(
        Direction(1, z1),
        Direction(c1, c1 * z1 - inst.nu1 / 2),
        Direction(1, z2),
        Direction(c2, c2 * z2 - inst.nu2 / 2),
    )


def par(inst: CurveInstance, z: Sequence[Any], c1: Any, c2: Any) -> ParData:
    """Eigendirections of nabla_c at t1 and t2, cross-checked against the closed form.

    Raises:
        PreconditionError: If nu1 * nu2 = 0
        TranscriptionError: If the eigen computation disagrees with the closed form
    """
    if inst.nu1 == 0 or inst.nu2 == 0:
        raise PreconditionError("Par needs nu1 * nu2 != 0")
    conn = nabla_c(inst, z, c1, c2)
    directions: List[Direction] = []
    for point, nu in ((inst.t1, inst.nu1), (inst.t2, inst.nu2)):
        pairs = dict(eigen(residue_data(inst, conn, point).residue))
        if nu / 2 not in pairs or -nu / 2 not in pairs:
            raise TranscriptionError(f"Residue at {point} has eigenvalues {sorted(pairs)} instead of +-{nu / 2}")
        directions.extend((pairs[nu / 2], pairs[-nu / 2]))

    data = ParData(*directions)
    expected = par_closed_form(inst, z, c1, c2)
    if data != expected:
        raise TranscriptionError(f"Par mismatch: computed {data.to_record()}, closed form {expected.to_record()}")
    return data


def par_inverse(
    inst: CurveInstance, z: Sequence[Any], zeta: Sequence[Union[Slope, Direction]]
) -> Tuple[Fraction, Fraction]:
    """Higgs coordinates c_i = nu_i / (2 (z_i - zeta_i)); a slope of None, i.e. (0:1), gives c_i = 0.

    Raises:
        PreconditionError: If some nu_i vanishes
        IncidenceVarietyError: If zeta_i = z_i
    """
    result = []
    for index, (z_value, target, nu) in enumerate(zip(z, zeta, (inst.nu1, inst.nu2)), start=1):
        if nu == 0:
            raise PreconditionError(f"nu{index} = 0, Par is not invertible")
        slope = target.slope if isinstance(target, Direction) else target
        if slope is None:
            result.append(Fraction(0))
            continue
        z_value, slope = QQ.coerce(z_value), QQ.coerce(slope)
        if z_value == slope:
            raise IncidenceVarietyError(f"zeta{index} = z{index} = {z_value} lies on the incidence variety")
        result.append(nu / (2 * (z_value - slope)))
    return result[0], result[1]


def app(inst: CurveInstance, conn: LogConnection) -> AppCoords:
    """App image of a family member computed from the section s = (1, x).

    phi = d_weight * y + gamma - 2 alpha x - beta x^2 and (x - t) phi / y = a0 + a1 x + a2 y up to the
    factor 1/(4r).

    Raises:
        PreconditionError: For a connection over QQ(eps) or with nonzero trace
        TranscriptionError: If (x - t) phi / y is not in span{1, x, y}
    """
    if conn.coefficient_field is not QQ:
        raise PreconditionError("App is evaluated over QQ")
    if trace_form(conn):
        raise PreconditionError("App needs a traceless connection")
    x, y = inst.x_element(), inst.y_element()
    alpha, beta, gamma = conn.matrix.a, conn.matrix.b, conn.matrix.c
    phi = y * conn.d_weight + gamma - 2 * alpha * x - beta * x * x
    psi = (x - inst.t) * phi / y

    rational, irrational = psi.a, psi.b
    if not rational.is_polynomial() or rational.num.degree > 1 or not irrational.is_constant():
        raise TranscriptionError(f"(x - t) phi / y = {psi} is outside span(1, x, y)")
    scale = 4 * inst.r
    return AppCoords(
        rational.num.coefficient(0) * scale,
        rational.num.coefficient(1) * scale,
        irrational.constant_value() * scale,
    )


def app_matrix(inst: CurveInstance, z: Sequence[Any]) -> Matrix3:
    """Matrix of App_z in the bases {nabla0, theta1, theta2} and {1, x, y}/(x - t)."""
    z1, z2 = z
    t, r, nu1, nu2 = inst.t, inst.r, inst.nu1, inst.nu2
    return (
        (r * (nu1 * (2 * z1 - t) + nu2 * (2 * z2 - t) - t), -4 * r * z1 * (z1 - t), -4 * r * z2 * (z2 - t)),
        (-r * (nu1 + nu2 - 1), 4 * r * (z1 - t), 4 * r * (z2 - t)),
        (2 * (nu1 * (z1 - t) - nu2 * (z2 - t)), -4 * (z1 - t) * (z1 - t), 4 * (z2 - t) * (z2 - t)),
    )


def app_matrix_infinity(inst: CurveInstance, big_z: Sequence[Any]) -> Matrix3:
    """Matrix of App_Z in the bases {nabla_inf, theta1_inf, theta2_inf} and {1, x, y}/(x - t)."""
    z1, z2 = big_z
    t, r, nu1, nu2 = inst.t, inst.r, inst.nu1, inst.nu2
    return (
        (t * r * (1 - nu1 - nu2), 4 * r * (1 - t * z1), 4 * r * (1 - t * z2)),
        (
            r * (nu1 * (2 * t * z1 - 1) + nu2 * (2 * t * z2 - 1) - 1),
            4 * r * z1 * (t * z1 - 1),
            4 * r * z2 * (t * z2 - 1),
        ),
        (
            2 * t * (nu1 * (t * z1 - 1) - nu2 * (t * z2 - 1)),
            4 * (t * z1 - 1) * (t * z1 - 1),
            -4 * (t * z2 - 1) * (t * z2 - 1),
        ),
    )


def cocycle_matrix(inst: CurveInstance, big_z: Sequence[Any]) -> Matrix3:
    """T(Z) with c = T(Z) C, the change of coordinates from the U_inf basis to the U0 basis."""
    z1, z2 = big_z
    zero = 0 * z1
    return (
        (zero + 1, zero, zero),
        (inst.nu1 * z1 / 2, z1 * z1, zero),
        (inst.nu2 * z2 / 2, zero, z2 * z2),
    )


def det3(m: Matrix3) -> Any:
    """Cofactor expansion along the first row."""
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def mat3_mul(left: Matrix3, right: Matrix3) -> Matrix3:
    return tuple(
        tuple(sum((left[i][k] * right[k][j] for k in range(3)), 0 * left[0][0]) for j in range(3)) for i in range(3)
    )


def mat3_apply(m: Matrix3, vector: Sequence[Any]) -> Tuple[Any, Any, Any]:
    return tuple(m[i][0] * vector[0] + m[i][1] * vector[1] + m[i][2] * vector[2] for i in range(3))


def app_det(inst: CurveInstance, z: Sequence[Any]) -> Any:
    return det3(app_matrix(inst, z))


def app_det_closed_form(inst: CurveInstance, z: Sequence[Any]) -> Any:
    """32 r^2 (t - z1)^2 (t - z2)^2 (nu1 + nu2 + 1)."""
    z1, z2 = z
    t = inst.t
    return 32 * inst.r * inst.r * (t - z1) * (t - z1) * (t - z2) * (t - z2) * (inst.nu1 + inst.nu2 + 1)


def app_det_infinity(inst: CurveInstance, big_z: Sequence[Any]) -> Any:
    return det3(app_matrix_infinity(inst, big_z))


def app_det_infinity_closed_form(inst: CurveInstance, big_z: Sequence[Any]) -> Any:
    """-32 r^2 (t Z1 - 1)^2 (t Z2 - 1)^2 (nu1 + nu2 + 1)."""
    z1, z2 = big_z
    t = inst.t
    return -32 * inst.r * inst.r * (t * z1 - 1) * (t * z1 - 1) * (t * z2 - 1) * (t * z2 - 1) * (inst.nu1 + inst.nu2 + 1)


def matrix_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank over QQ by Gaussian elimination."""
    work = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    columns = len(work[0]) if work else 0
    for column in range(columns):
        pivot = next((i for i in range(rank, len(work)) if work[i][column]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(len(work)):
            if i != rank and work[i][column]:
                factor = work[i][column] / work[rank][column]
                work[i] = [a - factor * b for a, b in zip(work[i], work[rank])]
        rank += 1
    return rank


def _classify(m: Matrix3) -> AppVerdict:
    rank = matrix_rank(m)
    columns = [tuple(m[i][j] for i in range(3)) for j in range(3)]
    if rank == 3:
        return AppVerdict(AppVerdictKind.GENERIC_ISO)
    if rank == 2:
        axis = next((f"c{j}" for j in (1, 2) if not any(columns[j])), None)
        return AppVerdict(AppVerdictKind.LINE_IMAGE, axis=axis)
    if rank == 1:
        column = next(c for c in columns if any(c))
        return AppVerdict(AppVerdictKind.CONSTANT_IMAGE, point=normalize_projective(column))
    return AppVerdict(AppVerdictKind.INDETERMINATE)


def app_degenerate(inst: CurveInstance, z: Sequence[Any]) -> AppVerdict:
    """Classify App_z by the exact rank of its matrix.

    Rank 3 is an isomorphism, rank 2 a line image (axis c1 or c2 when z_i = t), rank 1 a constant
    image and rank 0 an indeterminate map.
    """
    verdict = _classify(app_matrix(inst, tuple(QQ.coerce(v) for v in z)))
    logger.debug(f"App at z = {tuple(str(v) for v in z)}: {verdict}")
    return verdict


def app_degenerate_projective(inst: CurveInstance, p1: Slope, p2: Slope) -> AppVerdict:
    """Classify App over a base point of P^1 x P^1 given by affine coordinates, None standing for infinity.

    The chart U0 covers finite points and U_inf the points without a zero coordinate; the two corners
    (inf, 0) and (0, inf) lie in neither and are reported as unsupported.
    """
    if p1 is not None and p2 is not None:
        return app_degenerate(inst, (p1, p2))
    if (p1 is None and p2 == 0) or (p1 == 0 and p2 is None):
        return AppVerdict(AppVerdictKind.UNSUPPORTED)
    big_z = tuple(Fraction(0) if p is None else 1 / QQ.coerce(p) for p in (p1, p2))
    return _classify(app_matrix_infinity(inst, big_z))


def bun_prime_vector(inst: CurveInstance, z: Sequence[Any]) -> Tuple[Any, Any, Any]:
    """(2t - z1 - z2, t(z1 + z2) - 2 z1 z2, r(z1 - z2)) for z over any coefficient field."""
    z1, z2 = z
    t = inst.t
    return (2 * t - z1 - z2, t * (z1 + z2) - 2 * z1 * z2, inst.r * (z1 - z2))


def bun_prime(inst: CurveInstance, z: Sequence[Any]) -> BunPrimeCoords:
    """(2t - z1 - z2 : t(z1 + z2) - 2 z1 z2 : r(z1 - z2)).

    Raises:
        BlownUpPointError: At z = (t, t), where every coordinate vanishes
    """
    t = inst.t
    coords = BunPrimeCoords(*bun_prime_vector(inst, tuple(QQ.coerce(v) for v in z)))
    if not any(coords.as_tuple()):
        raise BlownUpPointError(f"Bun' blows up the point z = ({t}, {t})")
    return coords


def higgs_app(inst: CurveInstance, z: Sequence[Any], c1: Any, c2: Any) -> AppCoords:
    """App coordinates of the Higgs field c1 theta1 + c2 theta2.

    Raises:
        PreconditionError: For the zero Higgs field
    """
    c1, c2 = QQ.coerce(c1), QQ.coerce(c2)
    if c1 == 0 and c2 == 0:
        raise PreconditionError("The zero Higgs field has no App image")
    return AppCoords(*mat3_apply(app_matrix(inst, tuple(QQ.coerce(v) for v in z)), (0, c1, c2)))


def incidence_pairing(inst: CurveInstance, z: Sequence[Any], coeffs: Sequence[Any]) -> Fraction:
    """a . b for a = App_z(c0, c1, c2) and b = Bun'(z)."""
    a = mat3_apply(app_matrix(inst, tuple(QQ.coerce(v) for v in z)), [QQ.coerce(c) for c in coeffs])
    b = bun_prime(inst, z).as_tuple()
    return sum((left * right for left, right in zip(a, b)), Fraction(0))


def incidence_check(inst: CurveInstance, z: Sequence[Any], c1: Any, c2: Any) -> bool:
    """Whether the App image of the Higgs field c1 theta1 + c2 theta2 lies on the line dual to Bun'(z)."""
    a = higgs_app(inst, z, c1, c2).as_tuple()
    b = bun_prime(inst, z).as_tuple()
    return sum((left * right for left, right in zip(a, b)), Fraction(0)) == 0


def nondominant_relation_check(inst: CurveInstance, z: Sequence[Any]) -> bool:
    """For nu1 + nu2 + 1 = 0: App(nabla0) = -nu1/(2(z1 - t)) App(theta1) + (nu1 + 1)/(2(z2 - t)) App(theta2).

    Raises:
        PreconditionError: If nu1 + nu2 + 1 != 0 or some z_i = t
    """
    if inst.nu1 + inst.nu2 + 1 != 0:
        raise PreconditionError("The non-dominant relation needs nu1 + nu2 + 1 = 0")
    z1, z2 = (QQ.coerce(v) for v in z)
    if z1 == inst.t or z2 == inst.t:
        raise PreconditionError("The non-dominant relation needs z1 != t and z2 != t")
    m = app_matrix(inst, (z1, z2))
    first = -inst.nu1 / (2 * (z1 - inst.t))
    second = (inst.nu1 + 1) / (2 * (z2 - inst.t))
    return all(m[i][0] == first * m[i][1] + second * m[i][2] for i in range(3))


def elm_chart_map(inst: CurveInstance, ledger: ExponentLedger, directions: str) -> ExponentLedger:
    """Exponent bookkeeping of the chart maps built from two elementary transformations at t1, t2.

    ``plus`` applies elm+ at both marked points and twists by O(-w_inf): exponents become
    (nu+ - 1/2, nu- + 1/2). ``minus`` applies elm- and twists by O(w_inf): (nu+ + 1/2, nu- - 1/2).
    Degree and class are unchanged because t1 + t2 - 2 w_inf is principal.
    """
    if directions not in ("plus", "minus"):
        raise PreconditionError(f"Unknown direction set {directions!r}")
    shift = Fraction(-1, 2) if directions == "plus" else Fraction(1, 2)
    step = 1 if directions == "plus" else -1
    mapping = ledger.as_mapping()
    bundle_class = ledger.bundle_class
    for point in inst.poles:
        plus, minus = mapping.get(point, (Fraction(0), Fraction(0)))
        mapping[point] = (plus + shift, minus - shift)
        bundle_class = class_add(inst, bundle_class, class_mul(inst, step, point_class(point)))
    bundle_class = class_add(inst, bundle_class, class_mul(inst, -2 * step, point_class(inst.w_inf)))
    return ExponentLedger.of(mapping, ledger.degree, bundle_class)
