#include <catch2/catch_amalgamated.hpp>

#include "cqed/errors.hpp"
#include "cqed/fockspace.hpp"
#include "support.hpp"

using namespace cqed;

TEST_CASE("basis labels", "[fockspace]") {
  CHECK(parse_label("g0") == BasisLabel{0, 0});
  CHECK(parse_label("e0") == BasisLabel{1, 0});
  CHECK(parse_label("f3") == BasisLabel{2, 3});
  CHECK(parse_label("|e,2>") == BasisLabel{1, 2});
  CHECK(parse_label("1,0") == BasisLabel{1, 0});
  CHECK(BasisLabel{3, 11}.str() == "h11");
  CHECK_THROWS_AS(parse_label("x0"), ValidationError);
  CHECK_THROWS_AS(parse_label(""), ValidationError);
  CHECK_THROWS_AS(parse_label("e"), ValidationError);
}

TEST_CASE("qubit-major basis ordering", "[fockspace]") {
  const HilbertSpec h{4, 12};
  CHECK(basis_index(h, {0, 0}) == 0);
  CHECK(basis_index(h, {0, 1}) == 1);
  CHECK(basis_index(h, {1, 0}) == 12);
  CHECK(basis_index(h, {3, 11}) == 47);
  for (int i = 0; i < h.dim(); ++i) CHECK(basis_index(h, label_of(h, i)) == i);
  CHECK_THROWS_AS(basis_index(h, {4, 0}), DimensionError);
  CHECK_THROWS_AS(basis_index(h, {0, 12}), DimensionError);
  CHECK_THROWS_AS(basis_index(h, {-1, 0}), DimensionError);

  const auto psi = basis_state(h, {1, 2});
  CHECK(psi.norm() == 1.0);
  CHECK(psi(14) == cplx(1.0));
}

TEST_CASE("mode operators match explicit ladder matrices", "[fockspace]") {
  const int n_q = GENERATE(1, 2, 4);
  const int n_c = GENERATE(1, 3, 7);
  const HilbertSpec h{n_q, n_c};
  const auto ops = build_mode_ops(h);
  const reference::Ladder L(n_q, n_c);
  CHECK((ops.b - L.b).norm() == 0.0);
  CHECK((ops.a - L.a).norm() == 0.0);
  CHECK((ops.b_dag - L.bd).norm() == 0.0);
  CHECK((ops.n_c - L.ad * L.a).norm() < 1e-14);
  CHECK((ops.identity - L.id).norm() == 0.0);
}

TEST_CASE("truncated commutator is the identity except at the top level", "[fockspace]") {
  const HilbertSpec h{5, 1};
  const auto ops = build_mode_ops(h);
  const Operator c = ops.b * ops.b_dag - ops.b_dag * ops.b;
  for (int k = 0; k < 4; ++k) CHECK(std::abs(c(k, k) - 1.0) < 1e-14);
  CHECK(std::abs(c(4, 4) + 4.0) < 1e-14);
}

TEST_CASE("dimension cap", "[fockspace]") {
  CHECK_THROWS_AS(build_mode_ops({100, 100}), DimensionError);
  CHECK_THROWS_AS(build_mode_ops({0, 3}), DimensionError);
  CHECK_NOTHROW(build_mode_ops({4, 12}, 48));
}

TEST_CASE("monomial action equals the product of ladder powers", "[fockspace][property]") {
  const HilbertSpec h{GENERATE(2, 4), GENERATE(3, 5)};
  const reference::Ladder L(h.n_q, h.n_c);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; q <= 3; ++q)
      for (int r = 0; r <= 3; ++r)
        for (int s = 0; s <= 3; ++s) {
          const Monomial m{p, q, r, s};
          const Operator expect = reference::power(L.bd, p) * reference::power(L.b, q) * reference::power(L.ad, r) *
                                  reference::power(L.a, s);
          INFO(m.signature());
          CHECK((materialize(m, h) - expect).norm() < 1e-12);
          CHECK((materialize(m.adjoint(), h) - expect.adjoint()).norm() < 1e-12);
        }
}

TEST_CASE("monomial bookkeeping", "[fockspace]") {
  const Monomial m{2, 1, 0, 1};
  CHECK(m.signature() == "b†2 b1 a†0 a1");
  CHECK(m.adjoint() == Monomial{1, 2, 1, 0});
  CHECK(m.degree() == 4);
  CHECK(m.qubit_shift() == 1);
  CHECK(m.cavity_shift() == -1);
  CHECK_FALSE(m.self_adjoint());
  CHECK(ops::n_q.self_adjoint());
}

TEST_CASE("expectation values and hermiticity defect", "[fockspace]") {
  const HilbertSpec h{3, 4};
  const auto ops = build_mode_ops(h);
  const auto psi = basis_state(h, {2, 3});
  CHECK(std::abs(expectation(ops.n_q, psi) - 2.0) < 1e-14);
  CHECK(std::abs(expectation(ops.n_c, psi) - 3.0) < 1e-14);
  const DensityMatrix rho = psi * psi.adjoint();
  CHECK(std::abs(expectation(ops.n_c, rho) - 3.0) < 1e-14);
  CHECK(hermiticity_defect(ops.n_q) == 0.0);
  CHECK(hermiticity_defect(ops.b) == Catch::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(expectation(ops.n_q, basis_state({2, 2}, {0, 0})), DimensionError);
}
