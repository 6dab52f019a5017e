"""Tests for the connection module."""

from fractions import Fraction

import pytest

from src.connection import (
    HALF,
    Direction,
    ExponentLedger,
    LogConnection,
    Mat2,
    RankOneConnection,
    ResidueData,
    connection_from_record,
    connection_to_record,
    eigen,
    eigendirection,
    elm,
    elm_direction,
    elm_ledger,
    fuchs_check,
    gauge,
    is_apparent,
    polar_of_matrix,
    residue_data,
    residue_trace_sum,
    trace_form,
    twist_ledger,
    wedge,
)
from src.curve import INSTANCES, TRIVIAL_CLASS, W_INF, CurvePoint, DivisorClass, group_mul, point_class
from src.errors import (
    DomainError,
    EigenvaluesOutsideFieldError,
    NonGenericResidueError,
    NotLogarithmicError,
    PreconditionError,
)


@pytest.fixture
def inst():
    return INSTANCES["A"]


@pytest.fixture
def diagonal_connection(inst):
    """d + diag(3/(x-t), -3/(x-t)) dx/y, with residues diag(1/2, -1/2) at t1."""
    g = 3 / (inst.x_element() - inst.t)
    matrix = Mat2(g, inst.element(0), inst.element(0), -g)
    ledger = ExponentLedger.of({inst.t1: (HALF, -HALF), inst.t2: (HALF, -HALF)})
    return LogConnection(matrix, polar_of_matrix(inst, matrix), ledger)


@pytest.fixture
def trivial_connection(inst):
    zero = inst.element(0)
    return LogConnection(Mat2(zero, zero, zero, zero))


class TestMat2:
    """Test cases for 2x2 matrices."""

    def test_product_and_inverse(self):
        m = Mat2(Fraction(2), Fraction(1), Fraction(1), Fraction(1))
        assert m * m.inverse() == Mat2.identity()
        assert m.det() == 1
        assert m.trace() == 3

    def test_singular(self):
        with pytest.raises(DomainError, match="Singular"):
            Mat2(Fraction(1), Fraction(2), Fraction(2), Fraction(4)).inverse()

    def test_apply_and_wedge(self):
        m = Mat2(Fraction(1), Fraction(2), Fraction(3), Fraction(4))
        assert m.apply((1, 1)) == (3, 7)
        assert wedge((1, 0), (0, 1)) == 1
        assert wedge((1, 2), (2, 4)) == 0

    def test_scalar_multiplication(self):
        assert Mat2.identity() * 3 == Mat2.diagonal(3, 3)
        assert not (2 * Mat2.identity()).is_zero()


class TestDirection:
    """Test cases for points of P^1."""

    @pytest.mark.parametrize(
        "u,v,expected",
        [(2, 4, (1, 2)), (0, 5, (0, 1)), (3, 0, (1, 0)), (Fraction(1, 2), Fraction(1, 3), (1, Fraction(2, 3)))],
    )
    def test_normalization(self, u, v, expected):
        assert Direction(u, v).vector == expected

    def test_zero_vector(self):
        with pytest.raises(DomainError):
            Direction(0, 0)

    def test_parse_and_format(self):
        direction = Direction.parse("(6:5)")
        assert direction == Direction(1, Fraction(5, 6))
        assert str(direction) == "(1:5/6)"
        assert direction.slope == Fraction(5, 6)
        assert Direction.from_slope(None).slope is None

    @pytest.mark.parametrize("text", ["1:2", "(1,2)", "(1:2:3)"])
    def test_parse_rejects(self, text):
        with pytest.raises(DomainError):
            Direction.parse(text)


class TestEigen:
    """Test cases for eigenvalues and eigendirections of residues."""

    def test_diagonal(self):
        (high, high_dir), (low, low_dir) = eigen(Mat2.diagonal(-HALF, HALF))
        assert (high, low) == (HALF, -HALF)
        assert high_dir == Direction(0, 1)
        assert low_dir == Direction(1, 0)

    def test_eigendirection_from_first_row(self):
        m = Mat2(Fraction(-2), Fraction(1), Fraction(-4), Fraction(2))
        m = m + Mat2.identity()
        assert eigendirection(m, Fraction(1)) == Direction(1, 2)

    def test_repeated_eigenvalue(self):
        with pytest.raises(NonGenericResidueError):
            eigen(Mat2.identity())

    def test_irrational_eigenvalues(self):
        with pytest.raises(EigenvaluesOutsideFieldError):
            eigen(Mat2(Fraction(0), Fraction(1), Fraction(2), Fraction(0)))

    def test_not_an_eigenvalue(self):
        with pytest.raises(DomainError):
            eigendirection(Mat2.diagonal(Fraction(1), Fraction(2)), Fraction(3))

    def test_scalar_residue(self):
        with pytest.raises(NonGenericResidueError):
            eigendirection(Mat2.identity(), Fraction(1))


class TestExponentLedger:
    """Test cases for exponent bookkeeping."""

    def test_default_exponents(self, inst):
        ledger = ExponentLedger.of({inst.t1: (Fraction(1, 6), Fraction(-1, 6))})
        assert ledger.at(inst.t2) == (0, 0)
        assert ledger.exponent_sum() == 0
        assert fuchs_check(ledger)

    def test_to_record(self, inst):
        ledger = ExponentLedger.of({inst.t1: (Fraction(1, 6), Fraction(-1, 6))}, 1, point_class(inst.t1))
        assert ledger.to_record() == {
            "degree": 1,
            "class": {"degree": 1, "sum": "(3,6)"},
            "exponents": [{"point": "(3,6)", "plus": "1/6", "minus": "-1/6"}],
        }

    def test_elm_plus_then_minus(self, inst):
        ledger = ExponentLedger.of({inst.t1: (Fraction(1, 3), Fraction(-1, 3))})
        raised = elm_ledger(inst, ledger, inst.t1, "+")
        assert raised.at(inst.t1) == (Fraction(-1, 3), Fraction(-2, 3))
        assert raised.degree == 1
        assert raised.bundle_class == point_class(inst.t1)
        assert fuchs_check(raised)
        assert elm_ledger(inst, raised, inst.t1, "-") == ledger

    def test_elm_minus(self, inst):
        ledger = elm_ledger(inst, ExponentLedger(), inst.w0, "-")
        assert ledger.at(inst.w0) == (1, 0)
        assert ledger.degree == -1
        assert ledger.bundle_class == DivisorClass(-1, inst.w0)
        assert fuchs_check(ledger)

    def test_elm_unknown_sign(self, inst):
        with pytest.raises(PreconditionError):
            elm_ledger(inst, ExponentLedger(), inst.w0, "*")

    def test_twist(self, inst):
        xi = RankOneConnection(point_class(inst.t1), ((inst.t1, Fraction(-1)),))
        assert fuchs_check(xi)
        ledger = twist_ledger(inst, ExponentLedger.of({inst.t2: (HALF, -HALF)}), xi)
        assert ledger.at(inst.t1) == (-1, -1)
        assert ledger.at(inst.t2) == (HALF, -HALF)
        assert ledger.degree == 2
        assert ledger.bundle_class == DivisorClass(2, group_mul(inst, 2, inst.t1))
        assert fuchs_check(ledger)

    def test_fuchs_rejects_unknown_type(self):
        with pytest.raises(TypeError):
            fuchs_check(3)


class TestResidues:
    """Test cases for residue data of logarithmic connections."""

    def test_residue_at_marked_points(self, inst, diagonal_connection):
        assert residue_data(inst, diagonal_connection, inst.t1).residue == Mat2.diagonal(HALF, -HALF)
        assert residue_data(inst, diagonal_connection, inst.t2).residue == Mat2.diagonal(-HALF, HALF)

    def test_regular_point(self, inst, diagonal_connection):
        assert residue_data(inst, diagonal_connection, inst.w0).residue.is_zero()

    def test_polar_divisor(self, inst, diagonal_connection):
        assert diagonal_connection.polar == inst.divisor_d()

    def test_trace(self, inst, diagonal_connection):
        assert not trace_form(diagonal_connection)
        assert residue_trace_sum(inst, diagonal_connection, inst.poles) == 0

    def test_not_logarithmic(self, inst):
        g = 1 / (inst.x_element() - inst.t) ** 2
        conn = LogConnection(Mat2(g, inst.element(0), inst.element(0), -g))
        with pytest.raises(NotLogarithmicError):
            residue_data(inst, conn, inst.t1)

    def test_is_apparent(self, inst):
        data = ResidueData(inst.w1, Mat2.identity() * HALF, Mat2(Fraction(0), Fraction(1), Fraction(0), Fraction(0)))
        assert is_apparent(data, Direction(1, 0))
        assert not is_apparent(data, Direction(0, 1))

    def test_not_apparent_with_generic_residue(self, inst):
        data = ResidueData(inst.w1, Mat2.diagonal(HALF, -HALF), Mat2.diagonal(Fraction(0), Fraction(0)))
        assert not is_apparent(data, Direction(0, 1))


class TestGauge:
    """Test cases for gauge changes."""

    def test_constant_gauge_conjugates(self, inst, diagonal_connection):
        swap = Mat2(Fraction(0), Fraction(1), Fraction(1), Fraction(0))
        swapped = gauge(inst, diagonal_connection, swap)
        assert residue_data(inst, swapped, inst.t1).residue == Mat2.diagonal(-HALF, HALF)
        assert swapped.ledger == diagonal_connection.ledger

    def test_derivative_term(self, inst, trivial_connection):
        xt = inst.x_element() - inst.t
        conn = gauge(inst, trivial_connection, Mat2(inst.element(1), inst.element(0), inst.element(0), xt))
        assert conn.matrix.d == -inst.y_element() / xt
        assert residue_data(inst, conn, inst.t1).residue == Mat2.diagonal(Fraction(0), Fraction(-1))

    def test_higgs_field_ignores_derivative(self, inst, diagonal_connection):
        higgs = LogConnection(diagonal_connection.matrix, d_weight=Fraction(0))
        xt = inst.x_element() - inst.t
        conn = gauge(inst, higgs, Mat2(inst.element(1), inst.element(0), inst.element(0), xt))
        assert conn.matrix == higgs.matrix

    def test_zero_determinant(self, inst, diagonal_connection):
        zero = inst.element(0)
        with pytest.raises(DomainError):
            gauge(inst, diagonal_connection, Mat2(zero, zero, zero, inst.element(1)))


class TestElementaryTransformation:
    """Test cases for elementary transformations."""

    def test_elm_plus_on_trivial_connection(self, inst, trivial_connection):
        conn = elm(inst, trivial_connection, inst.t1, Direction(1, 0), "+")
        assert residue_data(inst, conn, inst.t1).residue == Mat2.diagonal(Fraction(-1), Fraction(0))
        assert conn.ledger.at(inst.t1) == (0, -1)
        assert conn.ledger.degree == 1
        assert fuchs_check(conn)

    def test_elm_minus_along_vertical(self, inst, trivial_connection):
        conn = elm(inst, trivial_connection, inst.t1, Direction(0, 1), "-")
        residue = residue_data(inst, conn, inst.t1).residue
        assert residue.trace() == sum(conn.ledger.at(inst.t1))
        assert residue.det() == 0

    def test_elm_at_two_torsion(self, inst, trivial_connection):
        conn = elm(inst, trivial_connection, inst.w0, Direction(1, 0), "+")
        residue = residue_data(inst, conn, inst.w0).residue
        assert residue.trace() == sum(conn.ledger.at(inst.w0))

    def test_elm_rejects_infinity(self, inst, trivial_connection):
        with pytest.raises(PreconditionError):
            elm(inst, trivial_connection, W_INF, Direction(1, 0), "+")

    def test_elm_rejects_sign(self, inst, trivial_connection):
        with pytest.raises(PreconditionError):
            elm(inst, trivial_connection, inst.t1, Direction(1, 0), "plus")

    def test_elm_direction(self):
        assert elm_direction(Direction(1, 5)) == Direction(0, 1)
        assert elm_direction(Direction(0, 1)) == Direction(1, 0)


class TestRecords:
    """Test cases for connection records."""

    def test_record_round_trip(self, inst, diagonal_connection):
        record = connection_to_record(diagonal_connection)
        assert record["d_weight"] == "1"
        assert connection_from_record(inst, record) == diagonal_connection

    def test_record_defaults(self, inst, trivial_connection):
        record = {"matrix": connection_to_record(trivial_connection)["matrix"]}
        conn = connection_from_record(inst, record)
        assert conn.ledger.bundle_class == TRIVIAL_CLASS
        assert conn.matrix.is_zero()

    def test_point_parsing_in_record(self, inst, diagonal_connection):
        record = connection_to_record(diagonal_connection)
        points = {CurvePoint.parse(item["point"]) for item in record["polar"]}
        assert points == {inst.t1, inst.t2}
