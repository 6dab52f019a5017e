"""Acceptance suites run by the ``selftest`` command.

Each suite takes an instance and a ``quick`` flag and returns a Report; sample points come from the
published seeds in ``data/samples.yaml``. Worked values are checked only on the instance they were
computed for.
"""

import logging
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .connection import (
    Direction,
    ExponentLedger,
    Mat2,
    elm,
    elm_ledger,
    fuchs_check,
    residue_data,
    residue_trace_sum,
    trace_form,
)
from .curve import INSTANCES, W_INF, CurveElement, CurveInstance, DivisorClass, in_linear_system, residue_sum
from .errors import PreconditionError
from .exact import QQ_EPS, format_rational, normalize_projective, projectively_equal
from .family import (
    chart_coherence_check,
    family_infinity,
    family_infinity_limit,
    higgs_fields_independent,
    nabla0,
    nabla_c,
    syst_ledger,
    theta1,
    theta2,
    verify_family,
)
from .maps import (
    AppVerdictKind,
    app,
    app_degenerate,
    app_degenerate_projective,
    app_det,
    app_det_closed_form,
    app_det_infinity,
    app_det_infinity_closed_form,
    app_matrix,
    app_matrix_infinity,
    bun_prime,
    bun_prime_vector,
    cocycle_matrix,
    elm_chart_map,
    higgs_app,
    incidence_check,
    mat3_apply,
    mat3_mul,
    nondominant_relation_check,
    par,
    par_inverse,
)
from .parabolic import (
    Decomposable,
    E0AllOnMax,
    ExponentSet,
    Flag,
    FlagPosition,
    FlatVerdict,
    HalfClass,
    IndecomposableE1,
    exponents_from_nu,
    nu_flat,
)
from .report import Report
from .samples import sample_count, sampler_for
from .symplectic import run_symplectic_suite

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
WORKED_INSTANCE = INSTANCES["A"]

Suite = Callable[[CurveInstance, bool], Report]


def _fmt(values: Iterable) -> List[str]:
    return [format_rational(v) for v in values]


def _family_points(inst: CurveInstance, suite: str, quick: bool) -> List[Tuple[Fraction, ...]]:
    """Samples (z1, z2, c1, c2) with z_i != t and z1 != z2."""
    sampler = sampler_for(suite)

    def admissible(point: Tuple[Fraction, ...]) -> bool:
        z1, z2 = point[0], point[1]
        return z1 != inst.t and z2 != inst.t and z1 != z2

    return [sampler.point(4, admissible) for _ in range(sample_count(suite, quick))]


def family_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("family")
    points = _family_points(inst, "family", quick)
    for index, (z1, z2, c1, c2) in enumerate(points):
        report.merge(verify_family(inst, (z1, z2), c1, c2), f"sample[{index:03d}]")
    report.run("higgs_independent", lambda: higgs_fields_independent(inst, points[0][:2]))
    report.data["samples"] = [_fmt(p) for p in points]
    return report


def par_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("par")
    if inst.nu1 == 0 or inst.nu2 == 0:
        report.data["skipped"] = "nu1 * nu2 = 0"
        return report

    for index, (z1, z2, c1, c2) in enumerate(_family_points(inst, "par", quick)):
        z = (z1, z2)

        def round_trip(z=z, c1=c1, c2=c2):
            data = par(inst, z, c1, c2)
            back = par_inverse(inst, z, data.zeta)
            return back == (c1, c2), f"c = {_fmt((c1, c2))} came back as {_fmt(back)}"

        def inverse_then_par(z=z, c1=c1, c2=c2):
            zeta = par(inst, z, c1, c2).zeta
            again = par(inst, z, *par_inverse(inst, z, zeta))
            return again.zeta == zeta, f"zeta = {zeta} came back as {again.zeta}"

        report.run(f"round_trip[{index:03d}]", round_trip)
        report.run(f"inverse_round_trip[{index:03d}]", inverse_then_par)

    if inst == WORKED_INSTANCE:

        def worked():
            data = par(inst, (1, 2), 1, 1)
            expected = (Direction(1, Fraction(5, 6)), Direction(1, Fraction(19, 10)))
            return (data.p1_minus, data.p2_minus) == expected, f"got {data.to_record()}"

        report.run("worked[z=(1,2),c=(1,1)]", worked)
        report.run("worked_inverse", lambda: par_inverse(inst, (1, 0), (Fraction(5, 6), None))[0] == 1)
    return report


def app_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("app")
    for index, (z1, z2, c1, c2) in enumerate(_family_points(inst, "app", quick)):

        def matches(z=(z1, z2), c=(c1, c2)):
            computed = app(inst, nabla_c(inst, z, *c)).as_tuple()
            expected = mat3_apply(app_matrix(inst, z), (1, c[0], c[1]))
            return projectively_equal(computed, expected), f"{_fmt(computed)} vs {_fmt(expected)}"

        report.run(f"matrix[{index:03d}]", matches)

    if inst == WORKED_INSTANCE:
        z = (1, 2)
        for name, builder, expected in (
            ("nabla0", nabla0, (141, -21, 7)),
            ("theta1", theta1, (48, -48, -16)),
        ):
            report.run(
                f"worked[{name}]",
                lambda builder=builder, expected=expected: projectively_equal(
                    app(inst, builder(inst, z)).as_tuple(), expected
                ),
            )
    return report


def determinant_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("determinant")
    sampler = sampler_for("determinant")
    for index in range(sample_count("determinant", quick)):
        z = sampler.point(2)
        report.run(
            f"closed_form[{index:03d}]",
            lambda z=z: (app_det(inst, z) == app_det_closed_form(inst, z), f"at z = {_fmt(z)}"),
        )
        big_z = sampler.point(2, all)
        report.run(
            f"closed_form_infinity[{index:03d}]",
            lambda big_z=big_z: app_det_infinity(inst, big_z) == app_det_infinity_closed_form(inst, big_z),
        )

    # a generic line z = q + eps * v through the base turns equality into a polynomial identity in eps
    eps = QQ_EPS.eps
    q, v = sampler.point(2), sampler.point(2, all)
    line = (eps * v[0] + q[0], eps * v[1] + q[1])
    report.run("polynomial_identity", lambda: app_det(inst, line) == app_det_closed_form(inst, line))
    report.run(
        "polynomial_identity_infinity",
        lambda: app_det_infinity(inst, line) == app_det_infinity_closed_form(inst, line),
    )

    if inst == WORKED_INSTANCE:
        report.run("worked[z=(1,2)]", lambda: app_det(inst, (1, 2)) == Fraction(35328, 5))
        report.run("worked[Z=(1,1/2)]", lambda: app_det_infinity(inst, (1, HALF)) == Fraction(-8832, 5))
    return report


def degeneration_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("degeneration")
    sampler = sampler_for("nondominant")
    t = inst.t
    count = sample_count("nondominant", quick)

    for index in range(count):
        q = sampler.avoiding([t])
        report.run(
            f"line_image_c1[{index:02d}]",
            lambda q=q: app_degenerate(inst, (t, q)).axis == "c1",
        )
        report.run(
            f"line_image_c2[{index:02d}]",
            lambda q=q: app_degenerate(inst, (q, t)).axis == "c2",
        )

    if inst.nu1 + inst.nu2 != 1:

        def constant_image():
            verdict = app_degenerate(inst, (t, t))
            expected = normalize_projective((t, -1, 0))
            return (
                verdict.kind is AppVerdictKind.CONSTANT_IMAGE and verdict.point == expected,
                f"got {verdict.to_record()}",
            )

        report.run("constant_image", constant_image)

    indeterminate = replace(inst, nu2=1 - inst.nu1)
    report.run(
        "indeterminate",
        lambda: app_degenerate(indeterminate, (t, t)).kind is AppVerdictKind.INDETERMINATE,
    )

    nondominant = replace(inst, nu2=-1 - inst.nu1)
    for index in range(count):
        first = sampler.avoiding([t])
        z = (first, sampler.avoiding([t, first]))
        report.run(f"nondominant_det[{index:02d}]", lambda z=z: app_det(nondominant, z) == 0)
        report.run(f"nondominant_relation[{index:02d}]", lambda z=z: nondominant_relation_check(nondominant, z))

        def line_without_axis(z=z):
            verdict = app_degenerate(nondominant, z)
            return verdict.kind is AppVerdictKind.LINE_IMAGE and verdict.axis is None, f"got {verdict.to_record()}"

        report.run(f"nondominant_image[{index:02d}]", line_without_axis)

    for name, corner in (("inf,0", (None, Fraction(0))), ("0,inf", (Fraction(0), None))):
        report.run(
            f"corner[{name}]",
            lambda corner=corner: app_degenerate_projective(inst, *corner).kind is AppVerdictKind.UNSUPPORTED,
        )
    return report


def chart_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("chart")
    sampler = sampler_for("chart")

    def admissible(point: Tuple[Fraction, ...]) -> bool:
        return all(point[:2]) and 1 / point[0] != inst.t and 1 / point[1] != inst.t and point[0] != point[1]

    for index in range(sample_count("chart", quick)):
        z1, z2, c1, c2 = sampler.point(4, admissible)
        big_z = (z1, z2)
        report.merge(chart_coherence_check(inst, big_z, (1, c1, c2)), f"sample[{index:02d}]")

        def cocycle(big_z=big_z):
            at_origin = mat3_mul(app_matrix(inst, (1 / big_z[0], 1 / big_z[1])), cocycle_matrix(inst, big_z))
            expected = tuple(tuple(-entry for entry in row) for row in at_origin)
            return app_matrix_infinity(inst, big_z) == expected

        def higgs_scaling(big_z=big_z):
            z = (1 / big_z[0], 1 / big_z[1])
            first = family_infinity(inst, big_z, 0, 1, 0).matrix == theta1(inst, z).matrix * (big_z[0] * big_z[0])
            second = family_infinity(inst, big_z, 0, 0, 1).matrix == theta2(inst, z).matrix * (big_z[1] * big_z[1])
            return first and second

        report.run(f"cocycle[{index:02d}]", cocycle)
        report.run(f"higgs_scaling[{index:02d}]", higgs_scaling)

    c = (1, sampler.rational(), sampler.rational())
    nonzero = sampler.rational(nonzero=True)
    for name, big_z in (("Z1=0", (0, nonzero)), ("Z2=0", (nonzero, 0)), ("Z=0", (0, 0))):
        report.run(f"limit[{name}]", lambda big_z=big_z: not trace_form(family_infinity_limit(inst, big_z, c)))
    return report


def symplectic_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("symplectic")
    if inst.nu1 and inst.nu2:
        report.merge(run_symplectic_suite(inst, "par", count=sample_count("par", quick)), "par")
    else:
        report.data["par"] = {"skipped": "nu1 * nu2 = 0"}
    if inst.nu1 + inst.nu2 + 1:
        report.merge(run_symplectic_suite(inst, "eta", count=sample_count("eta", quick)), "eta")
    else:
        report.data["eta"] = {"skipped": "nu1 + nu2 + 1 = 0"}
    report.merge(run_symplectic_suite(inst, "torelli", count=sample_count("torelli", quick)), "torelli")
    return report


def elm_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("elm")
    minus_half = Mat2.identity() * -HALF
    for index, (z1, z2, c1, c2) in enumerate(_family_points(inst, "elm", quick)):
        conn = nabla_c(inst, (z1, z2), c1, c2)
        for label, point in zip(("w0", "w1", "w_lam"), inst.finite_two_torsion):

            def scalar_residue(point=point, conn=conn):
                transformed = elm(inst, conn, point, Direction(1, point.x), "+")
                residue = residue_data(inst, transformed, point).residue
                return residue == minus_half, f"residue {_fmt(residue.entries())}"

            report.run(f"apparent_to_scalar[{index:02d}][{label}]", scalar_residue)

    for label, point in zip(("w0", "w1", "w_lam"), inst.finite_two_torsion):
        for sign in ("+", "-"):
            report.run(
                f"fuchs[{label}][{sign}]",
                lambda point=point, sign=sign: fuchs_check(elm_ledger(inst, syst_ledger(inst), point, sign)),
            )

    example = ExponentLedger.of({inst.t1: (Fraction(-1, 3), Fraction(-2, 3)), inst.t2: (HALF, -HALF)})
    report.run(
        "chart_map_example",
        lambda: elm_chart_map(inst, example, "plus").at(inst.t1) == (Fraction(-5, 6), Fraction(-1, 6)),
    )
    nu = exponents_from_nu(inst)
    ledger = ExponentLedger.of({p: nu.at(p) for p in nu.points}, 1, DivisorClass(1, W_INF))
    for directions in ("plus", "minus"):
        report.run(
            f"chart_map_fuchs[{directions}]",
            lambda directions=directions: fuchs_check(ledger) and fuchs_check(elm_chart_map(inst, ledger, directions)),
        )
    return report


def _dprime_basis(inst: CurveInstance) -> Tuple[CurveElement, ...]:
    """1, 1/y, x/y, 1/(x - t), y/(x(x - t)): a basis of functions with at most simple poles on D'."""
    x, y = inst.x_element(), inst.y_element()
    one = inst.element(1)
    return (one, one / y, x / y, one / (x - inst.t), y / (x * (x - inst.t)))


def conservation_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("conservation")
    sampler = sampler_for("conservation")
    basis = _dprime_basis(inst)
    divisor = inst.divisor_d_prime()
    for index in range(sample_count("conservation", quick)):
        coefficients = sampler.point(len(basis), any)
        g = sum((a * b for a, b in zip(coefficients, basis)), inst.element(0))

        def residues_cancel(g=g, coefficients=coefficients):
            total = residue_sum(inst, g)
            return in_linear_system(inst, g, divisor) and total == 0, f"{_fmt(coefficients)}: sum {total}"

        report.run(f"residue_theorem[{index:03d}]", residues_cancel)

    z1, z2, c1, c2 = _family_points(inst, "conservation", True)[0]
    conn = nabla_c(inst, (z1, z2), c1, c2)
    support = inst.finite_two_torsion + inst.poles
    report.run("trace_residues", lambda: residue_trace_sum(inst, conn, support) == 0)
    report.run("fuchs[family]", lambda: fuchs_check(conn))
    return report


def _flatness_table(inst: CurveInstance) -> List[Tuple[str, object, ExponentSet, FlatVerdict]]:
    t1, t2 = inst.poles

    def exponents(first, second) -> ExponentSet:
        return ExponentSet(((t1, *first), (t2, *second)))

    def flags(first: FlagPosition, second: FlagPosition) -> Tuple[Flag, Flag]:
        return (Flag(t1, first), Flag(t2, second))

    third = Fraction(1, 3)
    generic = exponents((-third, -2 * third), (Fraction(1, 10), Fraction(-1, 10)))
    balanced = exponents((third, -third), (Fraction(1, 5), Fraction(-1, 5)))
    halves = exponents((HALF, -HALF), (HALF, -HALF))
    resonant = exponents((-third, -2 * third), (-2 * third, 2 * third))
    trivial, one = DivisorClass(0, W_INF), DivisorClass(1, W_INF)
    in_l, in_m, loose = FlagPosition.IN_L, FlagPosition.IN_M, FlagPosition.GENERIC
    flat, not_flat, generically = FlatVerdict.FLAT, FlatVerdict.NOT_FLAT, FlatVerdict.GENERICALLY_FLAT
    return [
        ("E1", IndecomposableE1(), generic, flat),
        ("E0_fuchs_fails", E0AllOnMax(inst.poles), generic, not_flat),
        ("E0_balanced", E0AllOnMax(inst.poles), balanced, flat),
        ("split_LM", Decomposable(trivial, one, flags(in_l, in_m)), generic, not_flat),
        ("split_LL", Decomposable(trivial, one, flags(in_l, in_l)), generic, not_flat),
        ("split_MM", Decomposable(trivial, one, flags(in_m, in_m)), generic, not_flat),
        ("E1_resonant", IndecomposableE1(), resonant, flat),
        ("split_MM_resonant", Decomposable(trivial, one, flags(in_m, in_m)), resonant, flat),
        ("equal_summands", Decomposable(trivial, trivial, flags(in_l, in_m)), halves, generically),
        ("distinct_summands", Decomposable(trivial, DivisorClass(0, inst.w0), flags(in_l, in_m)), halves, flat),
        ("degree_zero_fuchs_fails", Decomposable(trivial, trivial, flags(in_l, in_m)), generic, not_flat),
        (
            "half_classes_base_point",
            Decomposable(HalfClass(DivisorClass(0, t2)), HalfClass(DivisorClass(2, t1)), flags(loose, in_m)),
            generic,
            flat,
        ),
        (
            "half_classes_two_generic",
            Decomposable(HalfClass(DivisorClass(0, inst.w0)), HalfClass(DivisorClass(2, inst.w0)), flags(loose, loose)),
            generic,
            generically,
        ),
        ("one_generic_off_base", Decomposable(trivial, one, flags(loose, in_m)), generic, not_flat),
        ("E1_balanced", IndecomposableE1(), balanced, not_flat),
    ]


def flatness_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("flatness")
    for name, desc, nu, expected in _flatness_table(inst):
        report.run(
            f"table[{name}]",
            lambda desc=desc, nu=nu, expected=expected: (
                nu_flat(desc, nu, inst) is expected,
                f"expected {expected.value}, got {nu_flat(desc, nu, inst).value}",
            ),
        )
        if isinstance(desc, Decomposable):
            report.run(
                f"swap_invariant[{name}]",
                lambda desc=desc, nu=nu: nu_flat(desc, nu, inst) is nu_flat(desc.swapped(), nu, inst),
            )
    return report


def incidence_suite(inst: CurveInstance, quick: bool = False) -> Report:
    report = Report("incidence")
    sampler = sampler_for("incidence")

    def admissible(point: Tuple[Fraction, ...]) -> bool:
        return (point[0], point[1]) != (inst.t, inst.t) and any(point[2:])

    for index in range(sample_count("incidence", quick)):
        z1, z2, c1, c2 = sampler.point(4, admissible)
        report.run(f"higgs_on_dual_line[{index:03d}]", lambda z=(z1, z2), c=(c1, c2): incidence_check(inst, z, *c))

    eps = QQ_EPS.eps
    q, v, c = sampler.point(2), sampler.point(2, all), sampler.point(2, any)
    line = (eps * v[0] + q[0], eps * v[1] + q[1])

    def identity():
        a = mat3_apply(app_matrix(inst, line), (0, c[0], c[1]))
        b = bun_prime_vector(inst, line)
        return not (a[0] * b[0] + a[1] * b[1] + a[2] * b[2])

    report.run("polynomial_identity", identity)

    if inst == WORKED_INSTANCE:
        z = (1, 2)
        report.run("worked[bun_prime]", lambda: bun_prime(inst, z).normalized() == (3, 5, -6))
        report.run(
            "worked[theta1]",
            lambda: projectively_equal(higgs_app(inst, z, 1, 0).as_tuple(), (48, -48, -16))
            and incidence_check(inst, z, 1, 0),
        )
        report.run("worked[theta2]", lambda: incidence_check(inst, z, 0, 1))
    return report


SUITES: Dict[str, Suite] = {
    "family": family_suite,
    "par": par_suite,
    "app": app_suite,
    "determinant": determinant_suite,
    "degeneration": degeneration_suite,
    "chart": chart_suite,
    "symplectic": symplectic_suite,
    "elm": elm_suite,
    "conservation": conservation_suite,
    "flatness": flatness_suite,
    "incidence": incidence_suite,
}


def run_selftest(inst: CurveInstance, quick: bool = False, suites: Optional[Iterable[str]] = None) -> Report:
    """Run the named suites (all by default) and merge them into one report, checks sorted by name.

    Raises:
        PreconditionError: For an unknown suite name
    """
    names = list(suites) if suites is not None else list(SUITES)
    unknown = [name for name in names if name not in SUITES]
    if unknown:
        raise PreconditionError(f"Unknown suites: {', '.join(unknown)} (choose from {', '.join(SUITES)})")

    report = Report("selftest")
    for name in names:
        logger.info(f"Running suite {name}{' (quick)' if quick else ''}")
        suite_report = SUITES[name](inst, quick)
        logger.debug(f"Suite {name}: {len(suite_report.failures())}/{len(suite_report.checks)} failed")
        report.merge(suite_report, name)
    report.checks.sort(key=lambda check: check.name)
    report.data["suites"] = names
    report.data["quick"] = quick
    return report
