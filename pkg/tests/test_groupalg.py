from __future__ import annotations

from fractions import Fraction

import pytest

from wallforge.complexes import CertificateError, homology_dims, is_exact
from wallforge.groupalg import (
    AlgebraPresentation,
    CocycleTable,
    FiniteGroupTable,
    ModulePresentation,
    averaging_idempotent,
    crossed_ext_compare,
    crossed_module,
    crossed_product,
    ext_dims,
    ext_dims_via_hom_complex,
    free_resolution,
    hopf_untwist,
    invariants,
    koszul_commuting_operators,
    module_direct_sum,
    standard_groups,
    two_periodic_resolution,
)
from wallforge.linalg import RationalMatrix


class TestGroupTables:
    def test_catalog_is_complete_through_order_8(self):
        groups = standard_groups(8)
        assert len(groups) == 14
        assert sorted(g.order for g in groups) == [1, 2, 3, 4, 4, 5, 6, 6, 7, 8, 8, 8, 8, 8]

    def test_catalog_entries_distinct(self):
        # the two order-6 groups differ by commutativity; order 8 splits
        # into three abelian plus dihedral and quaternion
        def is_abelian(G):
            return all(
                G.mul(a, b) == G.mul(b, a) for a in range(G.order) for b in range(G.order)
            )

        by_order = {}
        for G in standard_groups(8):
            by_order.setdefault(G.order, []).append(G)
        assert sorted(is_abelian(G) for G in by_order[6]) == [False, True]
        abelians8 = [G for G in by_order[8] if is_abelian(G)]
        assert len(abelians8) == 3
        # exponent separates the three abelian order-8 groups
        def exponent(G):
            e = 1
            for g in range(G.order):
                k, x = 1, g
                while x != G.identity:
                    x = G.mul(x, g)
                    k += 1
                e = e * k // __import__("math").gcd(e, k)
            return e

        assert sorted(exponent(G) for G in abelians8) == [2, 4, 8]
        nonab8 = [G for G in by_order[8] if not is_abelian(G)]
        # quaternion group has a unique element of order 2, dihedral has five
        def order2_count(G):
            return sum(1 for g in range(G.order) if g != G.identity and G.mul(g, g) == G.identity)

        assert sorted(order2_count(G) for G in nonab8) == [1, 5]

    def test_bad_tables_rejected(self):
        with pytest.raises(ValueError):
            FiniteGroupTable([[0, 1], [1, 1]])  # 1 has no inverse
        with pytest.raises(ValueError):
            FiniteGroupTable([[1, 0], [1, 0]])  # no identity

    def test_dihedral_relations(self):
        D4 = FiniteGroupTable.dihedral(4)
        assert D4.order == 8
        # some reflection s and the rotation r satisfy s r s = r^(-1)
        r, s = 1, 4
        assert D4.mul(D4.mul(s, r), s) == D4.inv(r)

    def test_max_order_cap(self):
        with pytest.raises(ValueError):
            standard_groups(9)


def test_averaging_idempotent_is_idempotent():
    for Q in (FiniteGroupTable.cyclic(3), FiniteGroupTable.symmetric3()):
        A = AlgebraPresentation.group_algebra(Q)
        e = averaging_idempotent(Q)
        assert A.multiply(e, e) == e
        # e is central
        for i in range(Q.order):
            b = A.basis_vector(i)
            assert A.multiply(b, e) == A.multiply(e, b)


def test_invariants_of_regular_representation():
    Q = FiniteGroupTable.symmetric3()
    fixed = invariants(Q.left_regular_matrices())
    assert len(fixed) == 1
    v = fixed[0]
    assert all(x == v[0] for x in v)


class TestAlgebraPresentation:
    def test_group_algebra_multiplication(self):
        Q = FiniteGroupTable.cyclic(4)
        A = AlgebraPresentation.group_algebra(Q)
        g1 = A.basis_vector(1)
        g3 = A.basis_vector(3)
        assert A.multiply(g1, g3) == A.basis_vector(0)
        assert A.inverse(g1) == g3

    def test_exterior_algebra_relations(self):
        A = AlgebraPresentation.exterior_algebra(2)
        assert A.dim == 4
        x0 = A.basis_vector(1)
        x1 = A.basis_vector(2)
        assert A.multiply(x0, x0) == tuple([0] * 4)
        anti = tuple(-c for c in A.multiply(x1, x0))
        assert A.multiply(x0, x1) == anti
        assert A.multiply(x0, x1)[3] == 1  # lands on the top class
        assert A.inverse(x0) is None

    def test_exterior_augmentation(self):
        A = AlgebraPresentation.exterior_algebra(2)
        eps = A.augmentation_values()
        assert eps is not None
        assert eps[0] == 1 and all(c == 0 for c in eps[1:])

    def test_tensor_product_of_group_algebras(self):
        Z2 = FiniteGroupTable.cyclic(2)
        A = AlgebraPresentation.group_algebra(Z2)
        T = AlgebraPresentation.tensor_product(A, A)
        assert T.dim == 4
        # (g (x) 1) * (1 (x) g) = g (x) g, and it squares to the unit
        g1 = T.basis_vector(2)
        g2 = T.basis_vector(1)
        gg = T.multiply(g1, g2)
        assert T.multiply(gg, gg) == T.unit

    def test_invalid_structure_constants_rejected(self):
        # (b1 b1) b1 = b2 b1 = 0 but b1 (b1 b1) = b1 b2 = b0
        z = [0, 0, 0]
        products = [
            [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
            [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
            [[0, 0, 1], z, z],
        ]
        with pytest.raises(ValueError):
            AlgebraPresentation(products, [1, 0, 0])


class TestModules:
    def test_one_dimensional_needs_algebra_hom(self):
        Q = FiniteGroupTable.cyclic(2)
        A = AlgebraPresentation.group_algebra(Q)
        triv = ModulePresentation.one_dimensional(A, [1, 1])
        sgn = ModulePresentation.one_dimensional(A, [1, -1])
        assert triv.dim == 1 and sgn.dim == 1
        with pytest.raises(ValueError):
            ModulePresentation.one_dimensional(A, [1, 2])

    def test_module_direct_sum_blocks(self):
        Q = FiniteGroupTable.cyclic(2)
        A = AlgebraPresentation.group_algebra(Q)
        triv = ModulePresentation.one_dimensional(A, [1, 1])
        sgn = ModulePresentation.one_dimensional(A, [1, -1])
        both = module_direct_sum([triv, sgn])
        assert both.dim == 2
        assert both.actions[1] == RationalMatrix.diagonal([1, -1])

    def test_regular_module_matches_left_multiplication(self):
        A = AlgebraPresentation.exterior_algebra(1)
        reg = ModulePresentation.regular(A)
        assert reg.actions[1] == A.left_mult_matrix(A.basis_vector(1))


class TestResolutions:
    def test_two_periodic_is_exact_in_positive_degrees(self):
        for Q in standard_groups(6):
            res = two_periodic_resolution(Q, 5)
            aug = res.augmented()
            hd = homology_dims(aug)
            for n in range(-1, 5):
                assert hd.get(n, 0) == 0, (Q, n, hd)

    def test_free_resolution_over_exterior_algebra(self):
        A = AlgebraPresentation.exterior_algebra(1)
        E = ModulePresentation.one_dimensional(A, A.augmentation_values())
        res = free_resolution(A, E, 4)
        assert res.ranks == (1, 1, 1, 1, 1)
        assert is_exact(res.augmented(), skip_degrees=[4])
        entries = res.algebra_entries(1)
        # the connecting entry is x (the augmentation ideal generator)
        assert entries == [[(Fraction(0), Fraction(1))]]

    def test_free_resolution_reversed_order_is_still_exact(self):
        A = AlgebraPresentation.exterior_algebra(2)
        E = ModulePresentation.one_dimensional(A, A.augmentation_values())
        res = free_resolution(A, E, 3, order="reversed")
        # reversed greedy picks a fatter but still exact resolution
        assert is_exact(res.augmented(), skip_degrees=[3])
        assert res.ranks[0] == 1 and all(r > 0 for r in res.ranks)

    def test_zero_module_resolves_to_nothing(self):
        A = AlgebraPresentation.exterior_algebra(1)
        res = free_resolution(A, ModulePresentation.zero(A), 3)
        assert res.ranks[0] == 0


class TestExt:
    def test_group_algebra_is_semisimple(self):
        for Q in (FiniteGroupTable.cyclic(4), FiniteGroupTable.symmetric3()):
            A = AlgebraPresentation.group_algebra(Q)
            E = ModulePresentation.one_dimensional(A, [1] * Q.order)
            assert ext_dims(A, E, E, 4) == [1, 0, 0, 0, 0]

    def test_hom_and_sign_modules(self):
        Q = FiniteGroupTable.cyclic(2)
        A = AlgebraPresentation.group_algebra(Q)
        E = ModulePresentation.one_dimensional(A, [1, 1])
        sgn = ModulePresentation.one_dimensional(A, [1, -1])
        assert ext_dims(A, E, sgn, 3) == [0, 0, 0, 0]
        assert ext_dims(A, E, module_direct_sum([E, sgn]), 2) == [1, 0, 0]

    def test_exterior_algebra_ext_is_one_per_degree(self):
        A = AlgebraPresentation.exterior_algebra(1)
        E = ModulePresentation.one_dimensional(A, A.augmentation_values())
        assert ext_dims(A, E, E, 5) == [1, 1, 1, 1, 1, 1]

    def test_exterior_rank2_ext_grows_linearly(self):
        A = AlgebraPresentation.exterior_algebra(2)
        E = ModulePresentation.one_dimensional(A, A.augmentation_values())
        assert ext_dims(A, E, E, 3) == [1, 2, 3, 4]

    def test_two_routes_agree(self):
        """The resolution route and the constrained-hom route must match."""
        A = AlgebraPresentation.exterior_algebra(2)
        E = ModulePresentation.one_dimensional(A, A.augmentation_values())
        reg = ModulePresentation.regular(A)
        for target in (E, reg):
            for order in ("forward", "reversed"):
                a = ext_dims(A, E, target, 3, order=order)
                b = ext_dims_via_hom_complex(A, E, target, 3, order=order)
                assert a == b, (order, a, b)

    def test_ext_of_free_target_is_concentrated(self):
        A = AlgebraPresentation.exterior_algebra(1)
        E = ModulePresentation.one_dimensional(A, A.augmentation_values())
        reg = ModulePresentation.regular(A)
        assert ext_dims(A, E, reg, 3) == [1, 0, 0, 0]


class TestCrossedProduct:
    def _sign_setup(self):
        """Z/2 flipping the exterior generator, trivial cocycle."""
        Q = FiniteGroupTable.cyclic(2)
        A = AlgebraPresentation.exterior_algebra(1)
        action = [RationalMatrix.identity(2), RationalMatrix.diagonal([1, -1])]
        return Q, A, crossed_product(A, Q, action)

    def test_crossed_product_multiplication(self):
        Q, A, cp = self._sign_setup()
        assert cp.algebra.dim == 4
        # (x # g)(x # g) = x sigma_g(x) # 1 = -x^2 # 1 = 0
        xg = [Fraction(0)] * 4
        xg[cp.basis_index(1, 1)] = Fraction(1)
        assert cp.algebra.multiply(xg, xg) == tuple([0] * 4)
        # (1 # g)(1 # g) = 1 # 1
        g = cp.group_unit_element(1)
        assert cp.algebra.multiply(g, g) == cp.algebra.unit

    def test_cocycle_validation_rejects_non_automorphism(self):
        Q = FiniteGroupTable.cyclic(2)
        A = AlgebraPresentation.exterior_algebra(1)
        bad = [RationalMatrix.identity(2), RationalMatrix([[1, 0], [0, 0]])]
        with pytest.raises(ValueError):
            crossed_product(A, Q, bad)

    def test_trivial_cocycle_has_no_violations(self):
        Q, A, cp = self._sign_setup()
        assert cp.cocycle.violations() == []

    def test_compare_trivial_module(self):
        Q, A, cp = self._sign_setup()
        triv = crossed_module(
            cp,
            [RationalMatrix.identity(1), RationalMatrix.zeros(1, 1)],
            [RationalMatrix.identity(1), RationalMatrix.identity(1)],
        )
        report = crossed_ext_compare(cp, triv, [1, 0], 4)
        assert report.ok
        assert list(report.lhs_dims) == [1, 0, 1, 0, 1]
        assert list(report.base_ext_dims) == [1, 1, 1, 1, 1]

    def test_compare_determinant_module(self):
        Q, A, cp = self._sign_setup()
        det = crossed_module(
            cp,
            [RationalMatrix.identity(1), RationalMatrix.zeros(1, 1)],
            [RationalMatrix.identity(1), RationalMatrix.diagonal([-1])],
        )
        report = crossed_ext_compare(cp, det, [1, 0], 4)
        assert report.ok
        assert list(report.lhs_dims) == [0, 1, 0, 1, 0]

    def test_report_json_keys(self):
        Q, A, cp = self._sign_setup()
        triv = crossed_module(
            cp,
            [RationalMatrix.identity(1), RationalMatrix.zeros(1, 1)],
            [RationalMatrix.identity(1), RationalMatrix.identity(1)],
        )
        data = crossed_ext_compare(cp, triv, [1, 0], 2).to_json()
        assert set(data) == {"crossed_ext_dims", "base_ext_dims", "invariant_dims", "ok"}


class TestHopfUntwist:
    def test_untwist_cyclic3_regular(self):
        Q = FiniteGroupTable.cyclic(3)
        record = hopf_untwist(Q, Q.left_regular_matrices())
        n = Q.order * Q.order
        ident = RationalMatrix.identity(n)
        assert record.matrix @ record.inverse == ident

    def test_untwist_sign_representation(self):
        Q = FiniteGroupTable.cyclic(2)
        mats = [RationalMatrix.identity(1), RationalMatrix.diagonal([-1])]
        record = hopf_untwist(Q, mats)
        assert record.matrix == RationalMatrix.diagonal([1, -1])

    def test_untwist_rejects_non_representation(self):
        Q = FiniteGroupTable.cyclic(2)
        mats = [RationalMatrix.identity(1), RationalMatrix.diagonal([2])]
        with pytest.raises(ValueError):
            hopf_untwist(Q, mats)


class TestKoszulOperators:
    def test_identity_operators(self):
        I2 = RationalMatrix.identity(2)
        assert koszul_commuting_operators([I2]) == [2, 2]
        assert koszul_commuting_operators([I2, I2]) == [2, 4, 2]

    def test_mixed_spectrum(self):
        A = RationalMatrix.diagonal([1, 2])
        assert koszul_commuting_operators([A]) == [1, 1]

    def test_rejects_noncommuting(self):
        A = RationalMatrix([[1, 1], [0, 1]])
        B = RationalMatrix([[1, 0], [1, 1]])
        with pytest.raises(ValueError):
            koszul_commuting_operators([A, B])

    def test_rejects_singular(self):
        with pytest.raises(ValueError):
            koszul_commuting_operators([RationalMatrix.zeros(2, 2)])
