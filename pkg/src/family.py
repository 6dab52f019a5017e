"""The universal family of connections over the chart U0 and its companion chart U_inf.

On U0 the family is nabla_c = nabla0(z) + c1 * theta1(z) + c2 * theta2(z), parametrized by the
apparent directions z = (z1, z2) and the Higgs coordinates c = (c1, c2). Every matrix entry is
assembled as a(x) + b(x) * y with the 1/y terms folded into b through 1/y = y / f(x).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Sequence, Tuple

from .connection import (
    HALF,
    Direction,
    ExponentLedger,
    LogConnection,
    Mat2,
    connection_to_record,
    eigendirection,
    residue_data,
    trace_form,
    wedge,
)
from .curve import TRIVIAL_CLASS, CurveElement, CurveInstance, in_linear_system
from .errors import EpsilonFieldRequiredError, LogConnError, TranscriptionError
from .exact import QQ, QQ_EPS, Field, RatFunc, eps_valuation, format_rational, specialize_at_zero
from .report import Report, compare_records

logger = logging.getLogger(__name__)

Pair = Tuple[Any, Any]


@dataclass(frozen=True)
class FamilyBasis:
    """The connection nabla0 and the two Higgs fields spanning the family at fixed z."""

    nabla0: LogConnection
    theta1: LogConnection
    theta2: LogConnection

    def members(self) -> Tuple[LogConnection, LogConnection, LogConnection]:
        return (self.nabla0, self.theta1, self.theta2)


def syst_ledger(inst: CurveInstance) -> ExponentLedger:
    """Exponents of the family: +-1/2 at the finite 2-torsion points, +-nu_k/2 at t_k, trivial bundle."""
    mapping = {w: (HALF, -HALF) for w in inst.finite_two_torsion}
    mapping[inst.t1] = (inst.nu1 / 2, -inst.nu1 / 2)
    mapping[inst.t2] = (inst.nu2 / 2, -inst.nu2 / 2)
    return ExponentLedger.of(mapping, 0, TRIVIAL_CLASS)


def _entry(inst: CurveInstance, coefficient_field: Field, rational_part: RatFunc, over_y: RatFunc) -> CurveElement:
    """rational_part + over_y / y, with over_y / y rewritten as (over_y / f) * y."""
    f = RatFunc(inst.cubic(coefficient_field))
    return inst.element(rational_part, over_y / f, coefficient_field)


def _symbols(inst: CurveInstance, coefficient_field: Field):
    x = RatFunc.x(coefficient_field)
    return x, x - inst.t, inst.lam, inst.t, inst.r


def _nabla0_matrix(inst: CurveInstance, z: Pair, coefficient_field: Field) -> Mat2:
    x, xt, lam, t, r = _symbols(inst, coefficient_field)
    nu1, nu2 = inst.nu1, inst.nu2
    z1, z2 = z
    nsum, ndiff = nu1 + nu2, nu1 - nu2
    weighted_sum = nu1 * z1 + nu2 * z2
    weighted_diff = nu1 * z1 - nu2 * z2

    alpha = _entry(
        inst,
        coefficient_field,
        ((lam + (t - lam - 1) * x) * t * ndiff / (xt * r) + (lam - t + 1) * weighted_diff / r) / 4,
        (
            ((lam + (x - lam - 1) * t) * x * nsum - ((lam + 1) * x * x + (-lam - (lam + 1) * t) * x + t * lam)) / xt
            - 2 * x * weighted_sum
        )
        / 4,
    )
    beta = _entry(
        inst,
        coefficient_field,
        -(t * (nu2 - nu1) + weighted_diff) / (2 * r),
        (2 * weighted_sum - (lam + 1 - x) * (nsum + 1) + 2 * x) / 4,
    )
    gamma = _entry(
        inst,
        coefficient_field,
        x * r * weighted_diff / (2 * t * xt),
        x * (2 * (lam - x * (1 + lam - t)) * weighted_sum / xt + lam * (nsum - 1)) / 4,
    )
    return Mat2(alpha, beta, gamma, -alpha)


def _theta_matrix(inst: CurveInstance, zk: Any, sign: int, coefficient_field: Field) -> Mat2:
    """Higgs field attached to the apparent direction zk; ``sign`` is +1 for t1 and -1 for t2."""
    x, xt, lam, t, r = _symbols(inst, coefficient_field)

    alpha = _entry(
        inst,
        coefficient_field,
        sign
        * (
            -(t * lam + (2 * t - zk) * (t - lam - 1) * zk) * x / (2 * xt * r)
            + t * ((t - 2 * zk) * lam - (t - lam - 1) * zk * zk) / (2 * xt * r)
        ),
        -zk * x * ((t - zk) * x + t * (zk - 1) + lam * (1 - t)) / xt,
    )
    beta = _entry(
        inst,
        coefficient_field,
        sign * ((zk - t) * (zk - t) * x + t * ((2 * t - zk) * zk + lam - t * (lam + 1))) / (r * xt),
        (x * (t - zk) * (x + zk - lam - 1) + t * (zk - lam) * (zk - 1)) / xt,
    )
    gamma = _entry(
        inst,
        coefficient_field,
        -sign * r * zk * zk * x / (t * xt),
        zk * x * (x * (zk * (1 - t) + lam * (zk - 1)) + lam * (t - zk)) / xt,
    )
    return Mat2(alpha, beta, gamma, -alpha)


def _coerce_pair(values: Sequence[Any], coefficient_field: Field) -> Pair:
    first, second = values
    return coefficient_field.coerce(first), coefficient_field.coerce(second)


def nabla0(inst: CurveInstance, z: Sequence[Any], coefficient_field: Field = QQ) -> LogConnection:
    z = _coerce_pair(z, coefficient_field)
    return LogConnection(_nabla0_matrix(inst, z, coefficient_field), inst.divisor_d_prime(), syst_ledger(inst))


def theta1(inst: CurveInstance, z: Sequence[Any], coefficient_field: Field = QQ) -> LogConnection:
    z = _coerce_pair(z, coefficient_field)
    return LogConnection(_theta_matrix(inst, z[0], 1, coefficient_field), inst.divisor_d_prime(), d_weight=Fraction(0))


def theta2(inst: CurveInstance, z: Sequence[Any], coefficient_field: Field = QQ) -> LogConnection:
    z = _coerce_pair(z, coefficient_field)
    return LogConnection(_theta_matrix(inst, z[1], -1, coefficient_field), inst.divisor_d_prime(), d_weight=Fraction(0))


def universal_basis(inst: CurveInstance, z: Sequence[Any], coefficient_field: Field = QQ) -> FamilyBasis:
    """nabla0, theta1 and theta2 at the apparent directions z."""
    return FamilyBasis(
        nabla0(inst, z, coefficient_field), theta1(inst, z, coefficient_field), theta2(inst, z, coefficient_field)
    )


def combine(inst: CurveInstance, basis: FamilyBasis, c0: Any, c1: Any, c2: Any) -> LogConnection:
    """c0 * nabla0 + c1 * theta1 + c2 * theta2 as a c0-connection."""
    matrix = basis.nabla0.matrix * c0 + basis.theta1.matrix * c1 + basis.theta2.matrix * c2
    ledger = basis.nabla0.ledger if c0 == 1 else ExponentLedger()
    d_weight = c0 if isinstance(c0, RatFunc) else Fraction(c0)
    return LogConnection(matrix, inst.divisor_d_prime(), ledger, d_weight)


def nabla_c(inst: CurveInstance, z: Sequence[Any], c1: Any, c2: Any, coefficient_field: Field = QQ) -> LogConnection:
    """The family member nabla0 + c1 * theta1 + c2 * theta2."""
    basis = universal_basis(inst, z, coefficient_field)
    return combine(inst, basis, 1, coefficient_field.coerce(c1), coefficient_field.coerce(c2))


def family_infinity(
    inst: CurveInstance, big_z: Sequence[Any], c0: Any, c1: Any, c2: Any, coefficient_field: Field = QQ
) -> LogConnection:
    """Member of the U_inf chart with coordinates Z = 1/z.

    nabla_inf = nabla0(1/Z) + (nu1/2) Z1 theta1 + (nu2/2) Z2 theta2 and theta_i_inf = Z_i^2 theta_i.

    Raises:
        EpsilonFieldRequiredError: If a coordinate of Z vanishes; substitute eps over QQ(eps) instead
    """
    big_z = _coerce_pair(big_z, coefficient_field)
    if not big_z[0] or not big_z[1]:
        raise EpsilonFieldRequiredError("Z has a zero coordinate; evaluate over QQ(eps) with Z_i = eps")
    z = (coefficient_field.inverse(big_z[0]), coefficient_field.inverse(big_z[1]))
    basis = universal_basis(inst, z, coefficient_field)
    nu_half = (inst.nu1 / 2, inst.nu2 / 2)
    c0 = coefficient_field.coerce(c0)
    c1 = coefficient_field.coerce(c1)
    c2 = coefficient_field.coerce(c2)
    matrix = (
        basis.nabla0.matrix * c0
        + basis.theta1.matrix * (c0 * nu_half[0] * big_z[0] + c1 * big_z[0] * big_z[0])
        + basis.theta2.matrix * (c0 * nu_half[1] * big_z[1] + c2 * big_z[1] * big_z[1])
    )
    ledger = syst_ledger(inst) if c0 == 1 else ExponentLedger()
    return LogConnection(matrix, inst.divisor_d_prime(), ledger, c0)


def is_eps_regular(conn: LogConnection) -> bool:
    """Whether every entry of a connection over QQ(eps) has a limit at eps = 0."""
    for entry in conn.matrix.entries():
        for part in (entry.a, entry.b):
            order = eps_valuation(part)
            if order is not None and order < 0:
                return False
    return True


def family_infinity_limit(inst: CurveInstance, big_z: Sequence[Any], c: Sequence[Any]) -> LogConnection:
    """Member of U_inf at a Z with zero coordinates, as the eps -> 0 limit over QQ(eps).

    Raises:
        TranscriptionError: If the eps-family is not regular at eps = 0
    """
    eps = QQ_EPS.eps
    coordinates = [eps if QQ.coerce(value) == 0 else QQ_EPS.coerce(value) for value in big_z]
    conn = family_infinity(inst, coordinates, *c, coefficient_field=QQ_EPS)
    if not is_eps_regular(conn):
        raise TranscriptionError(f"The U_inf family is not regular as Z -> {tuple(str(v) for v in big_z)}")

    def limit(entry: CurveElement) -> CurveElement:
        return inst.element(specialize_at_zero(entry.a), specialize_at_zero(entry.b), QQ)

    c0 = QQ.coerce(c[0])
    ledger = syst_ledger(inst) if c0 == 1 else ExponentLedger()
    return LogConnection(conn.matrix.map(limit), inst.divisor_d_prime(), ledger, c0)


def chart_transition(inst: CurveInstance, big_z: Sequence[Any], c: Sequence[Any]) -> Tuple[Any, Any, Any]:
    """U0 coefficients (c0, c1, c2) of the U_inf member with coordinates (Z, C)."""
    z1, z2 = big_z
    c0, c1, c2 = c
    return (
        c0,
        c0 * inst.nu1 * z1 / 2 + c1 * z1 * z1,
        c0 * inst.nu2 * z2 / 2 + c2 * z2 * z2,
    )


def chart_coherence_check(inst: CurveInstance, big_z: Sequence[Any], c: Sequence[Any]) -> Report:
    """Compare the U_inf member at (Z, C) with the U0 member at (1/Z, chart_transition(Z, C))."""
    report = Report("chart-coherence")
    big_z = _coerce_pair(big_z, QQ)
    c = tuple(QQ.coerce(value) for value in c)
    at_infinity = family_infinity(inst, big_z, *c)
    z = (1 / big_z[0], 1 / big_z[1])
    at_origin = combine(inst, universal_basis(inst, z), *chart_transition(inst, big_z, c))
    differences = compare_records(connection_to_record(at_infinity), connection_to_record(at_origin))
    report.add("chart_coherence", not differences, "; ".join(differences))
    return report


def _values_detail(**values: Any) -> str:
    return ", ".join(f"{name}={format_rational(value)}" for name, value in values.items())


def verify_family_basis(
    inst: CurveInstance, z: Sequence[Any], c1: Any, c2: Any, basis: Optional[FamilyBasis] = None
) -> Report:
    """Check that nabla0 + c1 theta1 + c2 theta2 built from ``basis`` has the expected local data.

    The checks cover tracelessness, membership of the entries in H^0(D'), apparentness with
    eigenvalues +-1/2 at the finite 2-torsion points and eigenvalues +-nu_k/2 with the plus
    eigendirection (1:z_k) at t_k.
    """
    z = _coerce_pair(z, QQ)
    basis = basis if basis is not None else universal_basis(inst, z)
    conn = combine(inst, basis, 1, QQ.coerce(c1), QQ.coerce(c2))
    report = Report("family-verify")
    report.data["z"] = [format_rational(v) for v in z]
    report.data["c"] = [format_rational(QQ.coerce(c1)), format_rational(QQ.coerce(c2))]

    trace = trace_form(conn)
    report.add("traceless", not trace, "" if not trace else f"trace = {trace}")

    divisor = inst.divisor_d_prime()
    for name, entry in zip(("alpha", "beta", "gamma"), conn.matrix.entries()):
        report.run(f"membership[{name}]", lambda entry=entry: not entry or in_linear_system(inst, entry, divisor))

    for label, point in zip(("w0", "w1", "w_lam"), inst.finite_two_torsion):
        _check_apparent_point(report, inst, conn, label, point)
    for label, point, nu, zk in (("t1", inst.t1, inst.nu1, z[0]), ("t2", inst.t2, inst.nu2, z[1])):
        _check_marked_point(report, inst, conn, label, point, nu, zk)
    return report


def _check_apparent_point(report: Report, inst: CurveInstance, conn: LogConnection, label: str, point) -> None:
    direction = Direction(1, point.x)
    try:
        data = residue_data(inst, conn, point)
    except LogConnError as e:
        report.add(f"apparent[{label}]", False, str(e))
        return
    residual = (data.residue - Mat2.identity() * HALF).apply(direction.vector)
    report.add(f"apparent[{label}].residual", not any(residual), _values_detail(first=residual[0], second=residual[1]))
    twist = wedge(data.constant.apply(direction.vector), direction.vector)
    report.add(f"apparent[{label}].constant", twist == 0, _values_detail(wedge=twist))
    trace, det = data.residue.trace(), data.residue.det()
    report.add(f"eigen[{label}]", trace == 0 and det == -HALF * HALF, _values_detail(trace=trace, det=det))


def _check_marked_point(report: Report, inst: CurveInstance, conn: LogConnection, label: str, point, nu, zk) -> None:
    try:
        data = residue_data(inst, conn, point)
    except LogConnError as e:
        report.add(f"eigen[{label}]", False, str(e))
        return
    trace, det = data.residue.trace(), data.residue.det()
    report.add(f"eigen[{label}].values", trace == 0 and det == -nu * nu / 4, _values_detail(trace=trace, det=det))
    image = data.residue.apply((Fraction(1), zk))
    expected = (nu / 2, nu * zk / 2)
    report.add(
        f"eigen[{label}].plus_direction",
        image == expected,
        _values_detail(first=image[0], second=image[1]),
    )


def verify_family(inst: CurveInstance, z: Sequence[Any], c1: Any, c2: Any) -> Report:
    return verify_family_basis(inst, z, c1, c2, universal_basis(inst, z))


def cross_residues(inst: CurveInstance, z: Sequence[Any]) -> Dict[str, Any]:
    """Residues of theta1 at t2 and of theta2 at t1, with whether each vanishes."""
    basis = universal_basis(inst, z)
    result = {}
    for name, conn, point in (("theta1@t2", basis.theta1, inst.t2), ("theta2@t1", basis.theta2, inst.t1)):
        residue = residue_data(inst, conn, point).residue
        result[name] = {
            "residue": [format_rational(e) for e in residue.entries()],
            "vanishes": residue.is_zero(),
        }
    return result


def plus_direction_at(inst: CurveInstance, conn: LogConnection, point, nu: Fraction) -> Direction:
    """Eigendirection of the residue at a marked point for the eigenvalue nu/2."""
    return eigendirection(residue_data(inst, conn, point).residue, nu / 2)


def higgs_fields_independent(inst: CurveInstance, z: Sequence[Any]) -> bool:
    """Whether theta1 and theta2 are linearly independent over the constants."""
    basis = universal_basis(inst, z)
    first, second = basis.theta1.matrix.entries(), basis.theta2.matrix.entries()
    for left, right in zip(first, second):
        if not right:
            if left:
                return True
            continue
        ratio = left / right
        if ratio.b or not ratio.a.is_constant():
            return True
        scale = ratio.a.constant_value()
        return any(a != b * scale for a, b in zip(first, second))
    return any(first)
