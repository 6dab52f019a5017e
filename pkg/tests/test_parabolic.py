"""Tests for the parabolic bundle decisions."""

from fractions import Fraction

import pytest

from src.curve import INSTANCES, W_INF, DivisorClass
from src.errors import PreconditionError
from src.parabolic import (
    Chamber,
    Decomposability,
    Decomposable,
    E0AllOnMax,
    ExponentSet,
    Flag,
    FlagPosition,
    FlatVerdict,
    HalfClass,
    IndecomposableE1,
    Stability,
    WeightVector,
    chamber,
    decomposable_by_degree,
    desc_from_record,
    elm_weight_transform,
    embedding_family_dimension,
    exponents_from_nu,
    exponents_from_record,
    fiber_dimension,
    flatness_report_data,
    genericity,
    indecomposable_n2,
    is_mu_stable,
    not_simple_types,
    nu_flat,
    on_wall,
    parabolic_degree,
    stab_index,
)

TRIVIAL = DivisorClass(0, W_INF)
DET = DivisorClass(1, W_INF)


@pytest.fixture
def inst():
    return INSTANCES["A"]


@pytest.fixture
def nu(inst):
    return exponents_from_nu(inst)


def flags(inst, first, second):
    return (Flag(inst.t1, first), Flag(inst.t2, second))


class TestExponents:
    """Test cases for exponent sets and genericity."""

    def test_from_nu(self, inst, nu):
        assert nu.at(inst.t1) == (Fraction(-1, 3), Fraction(-2, 3))
        assert nu.at(inst.t2) == (Fraction(1, 10), Fraction(-1, 10))
        assert nu.total() == -1

    def test_missing_point(self, inst, nu):
        with pytest.raises(PreconditionError):
            nu.at(inst.w0)

    def test_from_record(self, inst, nu):
        assert exponents_from_record(inst, None) == nu
        record = {"t1": ["-1/3", "-2/3"], "t2": ["1/10", "-1/10"]}
        assert exponents_from_record(inst, record) == nu

    def test_from_record_rejects_malformed_pair(self, inst):
        with pytest.raises(PreconditionError, match="pair"):
            exponents_from_record(inst, {"t1": "1/3"})

    def test_generic_instance(self, nu):
        assert genericity(nu).generic

    def test_odd_sum(self):
        report = genericity(exponents_from_nu(INSTANCES["B"]))
        assert not report.odd_free
        assert not report.generic

    def test_coinciding_exponents(self, inst):
        report = genericity(exponents_from_nu(inst, nu1=0))
        assert report.distinct == {"(3,-6)": True, "(3,6)": False}
        assert report.to_record()["generic"] is False

    def test_integral_sign_sum(self, inst):
        values = ExponentSet(((inst.t1, Fraction(1, 2), Fraction(-1, 4)), (inst.t2, Fraction(1, 2), Fraction(1, 4))))
        assert not genericity(values).sign_sums_nonintegral


class TestParabolicDegree:
    """Test cases for the parabolic degree of a summand."""

    def test_split_flags(self, inst, nu):
        desc = Decomposable(TRIVIAL, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M), DET)
        assert parabolic_degree(desc, "L", nu) == Fraction(-13, 30)

    def test_both_flags_in_l(self, inst, nu):
        desc = Decomposable(TRIVIAL, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_L))
        assert parabolic_degree(desc, "L", nu) == Fraction(-7, 30)

    @pytest.mark.parametrize(
        "first,second",
        [
            (FlagPosition.IN_L, FlagPosition.IN_L),
            (FlagPosition.IN_L, FlagPosition.IN_M),
            (FlagPosition.IN_M, FlagPosition.IN_L),
            (FlagPosition.IN_M, FlagPosition.IN_M),
        ],
    )
    def test_counting_identity(self, inst, nu, first, second):
        desc = Decomposable(TRIVIAL, DET, flags(inst, first, second))
        total = parabolic_degree(desc, "L", nu) + parabolic_degree(desc, "M", nu)
        assert total == desc.degree + nu.total()

    def test_generic_flag(self, inst, nu):
        desc = Decomposable(TRIVIAL, DET, flags(inst, FlagPosition.GENERIC, FlagPosition.IN_M))
        with pytest.raises(PreconditionError):
            parabolic_degree(desc, "L", nu)

    def test_unknown_summand(self, inst, nu):
        desc = Decomposable(TRIVIAL, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M))
        with pytest.raises(PreconditionError):
            parabolic_degree(desc, "N", nu)

    def test_degree_mismatch(self, inst):
        with pytest.raises(PreconditionError):
            Decomposable(TRIVIAL, TRIVIAL, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M), DET)

    def test_duplicate_flags(self, inst):
        with pytest.raises(PreconditionError):
            Decomposable(TRIVIAL, DET, (Flag(inst.t1, FlagPosition.IN_L), Flag(inst.t1, FlagPosition.IN_M)))


class TestIndecomposable:
    """Test cases for the two-point indecomposability decision."""

    def test_given_splitting(self, inst):
        verdict, t_base = indecomposable_n2(inst, TRIVIAL, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M))
        assert verdict is Decomposability.DECOMPOSABLE
        assert t_base == W_INF

    def test_not_simple_configuration(self, inst):
        line = HalfClass(DivisorClass(0, inst.t2))
        verdict, t_base = indecomposable_n2(inst, line, DET, flags(inst, FlagPosition.GENERIC, FlagPosition.IN_M))
        assert verdict is Decomposability.INDECOMPOSABLE
        assert t_base == inst.t1

    def test_base_point_off_parabolics(self, inst):
        line = HalfClass(DivisorClass(0, inst.w0))
        verdict, t_base = indecomposable_n2(inst, line, DET, flags(inst, FlagPosition.GENERIC, FlagPosition.GENERIC))
        assert verdict is Decomposability.GENERICALLY_INDECOMPOSABLE
        assert t_base == inst.w0

    def test_degree_preconditions(self, inst):
        with pytest.raises(PreconditionError):
            indecomposable_n2(inst, DET, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M))

    def test_flags_over_wrong_points(self, inst):
        wrong = (Flag(inst.t1, FlagPosition.IN_L), Flag(inst.w0, FlagPosition.IN_M))
        with pytest.raises(PreconditionError):
            indecomposable_n2(inst, TRIVIAL, DET, wrong)

    def test_half_class(self):
        assert HalfClass(DivisorClass(2, W_INF)).degree == 1
        with pytest.raises(PreconditionError):
            HalfClass(DivisorClass(1, W_INF))

    def test_not_simple_types(self, inst):
        types = not_simple_types(inst)
        assert len(types) == 8
        assert types[0].flags == (FlagPosition.GENERIC, FlagPosition.IN_M)
        assert types[-1].flags == (FlagPosition.IN_M, FlagPosition.GENERIC)

    @pytest.mark.parametrize("k,expected", [(-1, True), (0, False), (1, False), (2, True)])
    def test_decomposable_by_degree(self, k, expected):
        assert decomposable_by_degree(2, k) is expected

    def test_embedding_family_dimension(self, inst):
        assert embedding_family_dimension(inst, 0) == 1
        assert embedding_family_dimension(inst, -1) == 3
        assert embedding_family_dimension(inst, 1) == 0


class TestNuFlat:
    """Test cases for the flatness criterion."""

    def test_indecomposable_e1(self, nu):
        assert nu_flat(IndecomposableE1(), nu) is FlatVerdict.FLAT

    def test_fuchs_failure(self, inst):
        balanced = exponents_from_nu(inst)
        shifted = ExponentSet(tuple((p, plus + 1, minus) for p, plus, minus in balanced.values))
        assert nu_flat(IndecomposableE1(), shifted) is FlatVerdict.NOT_FLAT

    def test_e0_all_on_max(self, inst):
        values = ExponentSet(((inst.t1, Fraction(1, 6), Fraction(-1, 6)), (inst.t2, Fraction(1, 10), Fraction(-1, 10))))
        assert nu_flat(E0AllOnMax(inst.poles), values) is FlatVerdict.FLAT

    def test_nonzero_summand_degree(self, inst, nu):
        desc = Decomposable(TRIVIAL, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M), DET)
        assert nu_flat(desc, nu) is FlatVerdict.NOT_FLAT
        assert nu_flat(desc.swapped(), nu) is FlatVerdict.NOT_FLAT

    def test_generic_flag_defers_to_indecomposability(self, inst, nu):
        line = HalfClass(DivisorClass(0, inst.t2))
        desc = Decomposable(line, DET, flags(inst, FlagPosition.GENERIC, FlagPosition.IN_M), DET)
        assert nu_flat(desc, nu, inst) is FlatVerdict.FLAT
        assert nu_flat(desc, nu) is FlatVerdict.GENERICALLY_FLAT

    def test_fiber_dimension(self, nu, inst):
        assert fiber_dimension(IndecomposableE1(), nu) == 2
        with pytest.raises(PreconditionError):
            fiber_dimension(Decomposable(TRIVIAL, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M)), nu)
        with pytest.raises(PreconditionError):
            fiber_dimension(IndecomposableE1(), exponents_from_nu(inst, nu1=0))


class TestStability:
    """Test cases for weights, stability indices and chambers."""

    def test_index_on_both_parabolics(self):
        mu = WeightVector(Fraction(1, 4), Fraction(1, 3))
        assert stab_index(1, 0, (True, True), mu) == Fraction(5, 12)

    def test_zero_weights(self):
        assert stab_index(1, 0, (True, False), WeightVector(0, 0)) == 1

    @pytest.mark.parametrize(
        "mu,expected",
        [
            ((Fraction(1, 4), Fraction(1, 3)), Stability.STABLE),
            ((Fraction(1, 2), Fraction(1, 2)), Stability.STRICTLY_SEMISTABLE),
            ((Fraction(3, 4), Fraction(1, 2)), Stability.UNSTABLE),
        ],
    )
    def test_is_mu_stable(self, mu, expected):
        assert is_mu_stable(1, [(0, (True, True)), (0, (False, False))], WeightVector(*mu)) is expected

    def test_no_subbundles(self):
        assert is_mu_stable(1, [], WeightVector(0, 0)) is Stability.STABLE

    @pytest.mark.parametrize(
        "mu,expected",
        [
            ((Fraction(1, 4), Fraction(1, 3)), Chamber.LESS),
            ((Fraction(3, 4), Fraction(1, 2)), Chamber.GREATER),
            ((Fraction(1, 2), Fraction(1, 2)), Chamber.WALL),
            ((0, 0), Chamber.DEGENERATE),
            ((1, 0), Chamber.DEGENERATE),
        ],
    )
    def test_chamber(self, mu, expected):
        assert chamber(WeightVector(*mu)) is expected

    def test_on_wall(self):
        assert on_wall(WeightVector(Fraction(2, 5), Fraction(3, 5)))
        assert not on_wall(WeightVector(1, 0))

    def test_weight_range(self):
        with pytest.raises(PreconditionError):
            WeightVector(Fraction(3, 2), 0)

    def test_elm_weight_transform(self):
        mu = WeightVector(Fraction(1, 4), Fraction(1, 3))
        assert elm_weight_transform(1, 0, (True, False), mu, 1) == (
            0,
            0,
            (False, False),
            WeightVector(Fraction(3, 4), Fraction(1, 3)),
        )
        assert elm_weight_transform(1, 0, (True, False), mu, 2) == (
            0,
            -1,
            (True, True),
            WeightVector(Fraction(1, 4), Fraction(2, 3)),
        )


class TestRecords:
    """Test cases for bundle descriptions read from mappings."""

    def test_decomposable(self, inst):
        record = {
            "kind": "Decomposable",
            "L": {"degree": 0, "sum": "inf"},
            "M": {"degree": 1, "sum": "inf"},
            "det": {"degree": 1, "sum": "inf"},
            "flags": {"t1": "InL", "t2": "InM"},
        }
        desc = desc_from_record(inst, record)
        assert desc == Decomposable(TRIVIAL, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M), DET)

    def test_half_class(self, inst):
        record = {"kind": "Decomposable", "L": {"square": {"degree": 0, "sum": "(3,-6)"}, "index": 2}}
        assert desc_from_record(inst, record).L == HalfClass(DivisorClass(0, inst.t2), 2)

    def test_other_kinds(self, inst):
        assert desc_from_record(inst, {"kind": "IndecomposableE1", "p1": "(1:2)"}).p1.slope == 2
        assert desc_from_record(inst, {"kind": "E0AllOnMax"}).points == inst.poles

    @pytest.mark.parametrize(
        "record",
        [{"kind": "Split"}, {"kind": "Decomposable", "flags": {"t1": "Above"}}, {"kind": "Decomposable", "L": 3}],
    )
    def test_rejects(self, inst, record):
        with pytest.raises(PreconditionError):
            desc_from_record(inst, record)

    def test_report_data(self, inst, nu):
        desc = Decomposable(TRIVIAL, DET, flags(inst, FlagPosition.IN_L, FlagPosition.IN_M), DET)
        data = flatness_report_data(inst, desc, nu)
        assert data["verdict"] == "NotFlat"
        assert data["fuchs"] is True
        assert data["parabolic_degrees"]["L"] == "-13/30"
        assert data["kind"] == "Decomposable"

    def test_report_data_without_degrees(self, inst, nu):
        data = flatness_report_data(inst, IndecomposableE1(), nu)
        assert data["verdict"] == "Flat"
        assert "parabolic_degrees" not in data
