"""Exact symbolic layer: monomials, free vectors, coproducts, D^k, assumptions."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regpara.algebra import (
    BaseSymbol,
    FreeVector,
    PlusMonomial,
    mi_binom,
    mi_factorial,
    mi_range,
    polynomial_structure,
)
from regpara.library import structure


@pytest.fixture(scope="module")
def poly1():
    return polynomial_structure(1, Fraction(3))


def X(k):
    return PlusMonomial.of_poly((k,))


class TestFreeVector:
    def test_zero_coefficients_never_stored(self):
        v = FreeVector([(X(1), 1), (X(1), -1), (X(2), 2)])
        assert len(v) == 1
        assert v.coeff(X(2)) == 2
        assert v.coeff(X(1)) == 0

    def test_equality_is_coefficientwise(self):
        a = FreeVector([(X(1), Fraction(1, 2)), (X(2), 1)])
        b = FreeVector([(X(2), 1), (X(1), Fraction(1, 2))])
        assert a == b
        assert a - b == FreeVector.zero()

    def test_serialization_is_sorted_and_deterministic(self):
        v = FreeVector([(X(2), 1), (X(0), Fraction(-1, 3))])
        assert v.serialize() == "-1/3 1 + 1 X(2)"

    @given(st.lists(st.tuples(st.integers(0, 4), st.fractions()), max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_addition_commutes(self, terms):
        a = FreeVector([(X(k), c) for k, c in terms[: len(terms) // 2]])
        b = FreeVector([(X(k), c) for k, c in terms[len(terms) // 2:]])
        assert a + b == b + a


class TestPolynomialCoproduct:
    def test_primitive_monomial(self, poly1):
        got = poly1.delta_plus(X(1))
        want = FreeVector([((X(1), X(0)), 1), ((X(0), X(1)), 1)])
        assert got == want

    def test_unit(self, poly1):
        u = PlusMonomial.unit(1)
        assert poly1.delta_plus(u) == FreeVector.single((u, u))

    def test_square_collects_binomials(self, poly1):
        # oracle: square the primitive coproduct of X and collect terms
        prim = poly1.delta_plus(X(1))
        sq = prim.tensor_mul(prim, PlusMonomial.mul, PlusMonomial.mul)
        assert poly1.delta_plus(X(2)) == sq
        assert sq.coeff((X(1), X(1))) == 2

    def test_base_unit_comodule(self, poly1):
        u = BaseSymbol.unit(1)
        assert poly1.delta(u) == FreeVector.single((u, PlusMonomial.unit(1)))

    def test_underlined_primitive(self, poly1):
        got = poly1.delta(BaseSymbol("1", (1,)))
        want = FreeVector(
            [((BaseSymbol("1", (1,)), X(0)), 1), ((BaseSymbol.unit(1), X(1)), 1)]
        )
        assert got == want


class TestQuotients:
    def test_diagonal_gives_unit(self, poly1):
        assert poly1.quotient_plus(X(2), X(2)) == FreeVector.single(X(0))

    def test_square_over_x(self, poly1):
        assert poly1.quotient_plus(X(2), X(1)) == FreeVector.single(X(1), 2)

    def test_unrelated_gives_zero(self, toy_structure):
        gens = sorted(toy_structure.plus_gens)
        a = PlusMonomial.of_gen(gens[0], 1)
        assert not toy_structure.quotient_plus(X(1), a)


class TestDOperator:
    def test_identity_at_zero(self, poly1, toy_structure):
        for S in (poly1, toy_structure):
            for mono in S.plus_monomials():
                assert S.d_op((0,) * S.dim, mono) == FreeVector.single(mono)

    def test_factorial_convention_against_coproduct(self, poly1):
        # D^l X^k must equal l! times the X^l-slot of the coproduct; for
        # polynomials that is (k!/(k-l)!) X^{k-l}, not binom(l,k) X^{k-l}
        for k in range(3):
            for l in range(k + 1):
                got = poly1.d_op((l,), X(k))
                coeff = mi_factorial((l,)) * mi_binom((k,), (l,))
                assert got == FreeVector.single(X(k - l), coeff)
                assert coeff == mi_factorial((k,)) // mi_factorial((k - l,))

    def test_composition(self, toy_structure):
        S = toy_structure
        for mono in S.plus_monomials():
            d1 = S.d_op((1,), mono)
            assert S.d_op((1,), d1) == S.d_op((2,), mono)

    def test_leibniz_rule(self, bhz_structure):
        S = bhz_structure
        gens = sorted(S.plus_gens)
        a = PlusMonomial.of_gen(gens[0], 1)
        b = PlusMonomial.of_gen(gens[1], 1)
        prod = a.mul(b)
        for k in ((1,), (2,)):
            want = FreeVector.zero()
            for kp in mi_range(1, k[0]):
                rest = (k[0] - kp[0],)
                da = S.d_op(kp, a)
                db = S.d_op(rest, b)
                for ma, ca in da.items():
                    for mb, cb in db.items():
                        want = want + FreeVector.single(
                            ma.mul(mb), ca * cb * mi_binom(k, kp)
                        )
            assert S.d_op(k, prod) == want

    def test_orbit_shift_on_integrated_trees(self, bhz_structure):
        # e-decorations shift under D^l: the orbit data of the assumption
        # check certifies D^l I_k = I_{k+l} with coefficient one
        rep = bhz_structure.check_assumptions()
        shifted = {n: rk for n, rk in rep.c_orbit.items() if any(rk[1])}
        assert shifted, "expected at least one derived generator"
        for name, (root, k) in shifted.items():
            got = bhz_structure.d_op(k, PlusMonomial.of_gen(root, 1))
            assert got == FreeVector.single(PlusMonomial.of_gen(name, 1))


class TestHopfExactness:
    @pytest.mark.parametrize("name", ["polynomial", "toy", "bhz", "twonoise"])
    def test_coassociativity_and_comodule(self, name):
        S = structure(name)
        for mono in S.plus_monomials():
            assert not S.coassociativity_defect(mono)
        for sym in S.base_symbols():
            assert not S.comodule_defect(sym)

    @pytest.mark.parametrize("name", ["toy", "bhz"])
    def test_grading_and_triangularity(self, name):
        S = structure(name)
        for mono in S.plus_monomials():
            h = S.homog_plus(mono)
            for (left, right), _c in S.delta_plus(mono).items():
                assert S.homog_plus(left) + S.homog_plus(right) == h
                if left != mono and not left.is_unit:
                    assert 0 < S.homog_plus(left) < h
        for sym in S.base_symbols():
            h = S.homog_base(sym)
            for (left, right), _c in S.delta(sym).items():
                assert S.homog_base(left) + S.homog_plus(right) == h
                assert left == sym or S.homog_base(left) < h


class TestAssumptions:
    def test_polynomial_structure_passes_all(self, poly1):
        rep = poly1.check_assumptions()
        assert rep.a_ok and rep.b_ok and rep.c_ok and rep.d_ok
        assert rep.c_generators == []

    def test_toy_satisfies_d(self, toy_structure):
        assert toy_structure.check_assumptions().d_ok

    def test_canonical_bhz_fails_d_with_named_witness(self, bhz_structure):
        rep = bhz_structure.check_assumptions()
        assert not rep.d_ok
        assert rep.d_witness == (
            "I[t;(0)](I[th;(0)](1)) (x) X(1) in Delta(I[t;(0)](X(1)*I[th;(0)](1)))"
        )

    def test_noncanonical_bhz_passes_d(self):
        S = structure("bhz", noncanonical=True)
        rep = S.check_assumptions()
        assert rep.d_ok

    def test_orbit_partition_covers_generators(self, bhz_structure):
        rep = bhz_structure.check_assumptions()
        assert rep.c_ok
        assert set(rep.c_orbit) == set(bhz_structure.plus_gens)
        roots = set(rep.c_generators)
        for name, (root, _k) in rep.c_orbit.items():
            assert root in roots


class TestFExtension:
    def test_single_unit_extension_is_primitive(self, poly1):
        S = polynomial_structure(1, Fraction(1))
        ext = S.extend_with_F(Fraction(1, 2))
        fname = "F[1]"
        assert ext.plus_gens[fname] == Fraction(1, 2)
        gen = PlusMonomial.of_gen(fname, 1)
        got = ext.dplus_table[fname]
        want = FreeVector(
            [((gen, PlusMonomial.unit(1)), 1), ((PlusMonomial.unit(1), gen), 1)]
        )
        assert got == want

    def test_extended_coproduct_is_coassociative(self, toy_structure):
        ext = toy_structure.extend_with_F(Fraction(9, 8))
        for name in ext.plus_gens:
            if name.startswith("F["):
                assert not ext.coassociativity_defect(PlusMonomial.of_gen(name, 1))

    def test_antiderivative_relation_under_d(self, toy_structure):
        # with no sigma (x) X^k terms in any Delta tau, the only polynomial
        # quotient is (X^k tau)/tau = X^k, so D^k F_tau = k! F_{X^k tau}
        gamma = Fraction(9, 8)
        ext = toy_structure.extend_with_F(gamma)
        assert toy_structure.check_assumptions().d_ok
        for sym in toy_structure.base_symbols(gamma):
            fname = f"F[{sym}]"
            for k in ((1,), (2,)):
                target = BaseSymbol(sym.core, (sym.poly[0] + k[0],))
                dk = ext.d_op(k, PlusMonomial.of_gen(fname, 1))
                tname = f"F[{target}]"
                if tname in ext.plus_gens:
                    want = FreeVector.single(
                        PlusMonomial.of_gen(tname, 1), mi_factorial(k)
                    )
                    assert dk == want
                else:
                    assert not dk
