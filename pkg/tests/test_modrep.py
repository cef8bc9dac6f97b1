"""Tests for the order-8 flag group module layer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coho.f2linalg import BitMatrix, pack_vector, unpack_vector
from coho.groups import dihedral_group, find_isomorphism
from coho.modrep import (
    D1,
    D2,
    D4,
    PHI,
    THETA,
    KGModule,
    ModuleConstructionError,
    direct_sum,
    dual_module,
    fixed_subspace,
    invariants_by_degree,
    lambda_power,
    is_isomorphic,
    module_from_rows,
    module_hom_space,
    named_module,
    natural_module_u3,
    permutation_module,
    poly_degree,
    poly_mul,
    poly_pow,
    poly_to_vec,
    regular_module,
    socle,
    socle_and_permutation_report,
    submodule_generated,
    sym_basis,
    symmetric_power,
    tensor_product,
    trivial_module,
    u3_group,
    vec_to_poly,
    verify_exact_sequences,
    verify_symmetric_factorization,
    verify_tensor_table,
)


def basis_vec(i, dim):
    dense = np.zeros(dim, dtype=np.uint8)
    dense[i] = 1
    return pack_vector(dense)


class TestGroupAndNaturalModule:
    def test_group_order_and_shape(self):
        g = u3_group()
        assert g.order == 8
        assert find_isomorphism(g, dihedral_group(8)) is not None

    def test_generator_actions_on_basis(self):
        m = natural_module_u3()
        g = m.group
        x, y, z = (basis_vec(i, 3) for i in range(3))
        b, c, d = (g.generators[n] for n in "bcd")
        assert np.array_equal(m.act(b, x), x)
        assert np.array_equal(m.act(b, z), z)
        assert np.array_equal(m.act(b, y), x ^ y)
        assert np.array_equal(m.act(c, z), x ^ z)
        assert np.array_equal(m.act(d, z), y ^ z)

    def test_element_matrices_multiply(self):
        m = natural_module_u3()
        g = m.group
        for a in range(g.order):
            for b in range(g.order):
                prod = m.element_matrices[a].multiply(m.element_matrices[b])
                assert prod == m.element_matrices[int(g.mult[a, b])]

    def test_singular_action_rejected(self):
        g = u3_group()
        bad = BitMatrix.zeros(1, 1)
        with pytest.raises(ModuleConstructionError):
            KGModule(g, 1, {"b": bad, "c": bad, "d": bad})

    def test_relation_violation_rejected(self):
        # b squares to the identity, so an order-3 action matrix for b can
        # never extend consistently.
        g = u3_group()
        order3 = BitMatrix.from_dense([[0, 1], [1, 1]])
        eye = BitMatrix.identity(2)
        with pytest.raises(ModuleConstructionError):
            KGModule(g, 2, {"b": order3, "c": eye, "d": eye})
        # Factoring through the quotient by the commutator is fine: this
        # sends b and d to the swap and kills c.
        swap = BitMatrix.from_dense([[0, 1], [1, 0]])
        KGModule(g, 2, {"b": swap, "c": eye, "d": swap})


class TestPolynomials:
    def test_defining_invariants(self):
        assert D1 == frozenset({(1, 0, 0)})
        assert poly_degree(D2) == 2
        assert poly_degree(D4) == 4
        assert len(D4) >= 2

    def test_roundtrip(self):
        p = poly_mul(D2, THETA)
        d = poly_degree(p)
        assert vec_to_poly(poly_to_vec(p, d), d) == p

    def test_sym_basis_counts(self):
        assert [len(sym_basis(n)) for n in range(5)] == [1, 3, 6, 10, 15]

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=4))
    def test_poly_mul_commutes(self, pairs):
        p = frozenset({(a, b, 0) for a, b in pairs})
        q = frozenset({(0, 1, 1), (1, 0, 1)})
        assert poly_mul(p, q) == poly_mul(q, p)

    def test_poly_pow_char_two(self):
        square = poly_pow(frozenset({(1, 0, 0), (0, 1, 0)}), 2)
        assert square == frozenset({(2, 0, 0), (0, 2, 0)})


class TestSymmetricPowers:
    def test_dimensions(self):
        assert symmetric_power(2).dim == 6
        assert symmetric_power(3).dim == 10

    def test_invariant_dimension_profile(self):
        assert invariants_by_degree(6) == [1, 1, 2, 2, 4, 4, 6]

    def test_degree_one_invariants_span_x(self):
        fixed = fixed_subspace(symmetric_power(1))
        assert fixed.rows == 1
        assert vec_to_poly(fixed.row(0), 1) == D1

    def test_named_invariants_are_fixed(self):
        for poly in (D1, D2, D4):
            deg = poly_degree(poly)
            s = symmetric_power(deg)
            v = poly_to_vec(poly, deg)
            for name in s.action:
                assert np.array_equal(s.action[name].matvec(v), v)

    def test_exterior_powers(self):
        assert lambda_power(0).dim == 1
        assert lambda_power(3).dim == 1
        assert is_isomorphic(lambda_power(2), named_module("Mstar")) is True


class TestNamedModules:
    def test_dimensions(self):
        dims = {"k": 1, "M": 3, "Mstar": 3, "N": 4, "K": 2, "W": 6,
                "Wstar": 6, "F": 8, "T": 4, "Y9": 9, "X10": 10}
        for name, dim in dims.items():
            assert named_module(name).dim == dim, name

    def test_m_selfdual_fails(self):
        assert is_isomorphic(named_module("M"), named_module("Mstar")) is False

    def test_socle_dims(self):
        g = u3_group()
        assert socle(regular_module(g)).rows == 1
        assert socle(named_module("Y9")).rows == 2
        assert socle(named_module("N")).rows == 1
        assert socle(named_module("K")).rows == 1

    def test_structural_identifications(self):
        report = socle_and_permutation_report()
        assert report["all_identified"]
        assert report["socle_Y9_dim"] == 2

    def test_free_module_is_regular(self):
        assert is_isomorphic(named_module("F"), regular_module(u3_group())) is True

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            named_module("Z99")

    def test_n_generated_by_phi(self):
        s2 = symmetric_power(2)
        mod, rows = submodule_generated(s2, poly_to_vec(PHI, 2))
        assert mod.dim == 4
        # Membership is basis-independent: reduce against the echelon rows.
        from coho.f2linalg import EchelonAccumulator
        acc = EchelonAccumulator(rows.cols)
        for i in range(rows.rows):
            acc.insert(rows.row(i))
        assert acc.contains(poly_to_vec(PHI, 2))
        assert acc.contains(poly_to_vec(poly_pow(D1, 2), 2))

    def test_k_generated_by_theta(self):
        s2 = symmetric_power(2)
        mod, rows = submodule_generated(s2, poly_to_vec(THETA, 2))
        assert mod.dim == 2
        from coho.f2linalg import EchelonAccumulator
        acc = EchelonAccumulator(rows.cols)
        for i in range(rows.rows):
            acc.insert(rows.row(i))
        assert acc.contains(poly_to_vec(D2, 2))


class TestConstructionHelpers:
    def test_tensor_dims_multiply(self):
        w = tensor_product(named_module("M"), named_module("K"))
        assert w.dim == 6
        assert is_isomorphic(w, named_module("W")) is True

    def test_dual_of_dual(self):
        m = named_module("M")
        assert is_isomorphic(dual_module(dual_module(m)), m) is True

    def test_direct_sum_dims(self):
        s = direct_sum(named_module("M"), named_module("K"), named_module("k"))
        assert s.dim == 6
        assert socle(s).rows == socle(named_module("M")).rows + 2

    def test_permutation_module_of_trivial_subgroup(self):
        g = u3_group()
        reg = permutation_module(g, [g.identity])
        assert reg.dim == 8
        assert fixed_subspace(reg).rows == 1

    def test_module_from_rows_rejects_noninvariant(self):
        # The line through z (x) z is moved by c, unlike the socle line x (x) x.
        m = named_module("Y9")
        rows = BitMatrix.from_packed_rows([basis_vec(8, 9)], 9)
        with pytest.raises(ModuleConstructionError):
            module_from_rows(m, rows)
        module_from_rows(m, BitMatrix.from_packed_rows([basis_vec(0, 9)], 9))

    def test_hom_space_endomorphisms_of_free(self):
        f = named_module("F")
        homs = module_hom_space(f, f)
        assert len(homs) == 8
        g = module_hom_space(named_module("k"), named_module("M"))
        # Maps k -> M land in the fixed space of M, which is <x> here.
        assert len(g) == 1

    def test_hom_commutes_with_action(self):
        x, y = named_module("N"), named_module("W")
        for h in module_hom_space(x, y):
            for name in x.action:
                assert h.multiply(x.action[name]) == y.action[name].multiply(h)


class TestDecompositions:
    def test_tensor_table(self):
        report = verify_tensor_table()
        assert report["all_certified"], report

    def test_exact_sequences(self):
        report = verify_exact_sequences()
        assert report["all_found"], report

    def test_symmetric_factorization_small(self):
        report = verify_symmetric_factorization(8)
        assert report["multiplication_isomorphism"]
        assert report["decomposition_dims_match"]
        assert report["d1_M_inside_N"]
        by_deg = {r["degree"]: r for r in report["per_degree"]}
        assert by_deg[2]["triples"] == 6
        assert by_deg[3]["triples"] == 10
        assert all(r["rank"] == r["monomials"] for r in report["per_degree"])


class TestActionConsistency:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 511))
    def test_act_is_homomorphism(self, a, b, bits):
        m = named_module("Y9")
        dense = np.array([(bits >> i) & 1 for i in range(9)], dtype=np.uint8)
        v = pack_vector(dense)
        g = m.group
        lhs = m.act(a, m.act(b, v))
        rhs = m.act(int(g.mult[a, b]), v)
        assert np.array_equal(lhs, rhs)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 7), st.integers(1, 63))
    def test_dual_pairing_invariant(self, a, bits):
        m = named_module("M")
        ms = named_module("Mstar")
        v = pack_vector(np.array([(bits >> i) & 1 for i in range(3)], dtype=np.uint8))
        f = pack_vector(np.array([(bits >> (i + 3)) & 1 for i in range(3)], dtype=np.uint8))
        pair = lambda u, w: int(np.bitwise_count(u & w).sum()) % 2
        lhs = pair(m.act(a, v), ms.act(a, f))
        assert lhs == pair(v, f)
