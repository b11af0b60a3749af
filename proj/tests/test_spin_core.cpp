#include <doctest.h>

#include "spindrops/operator.hpp"
#include "support.hpp"

using namespace spindrops;

TEST_SUITE("spin_core") {

TEST_CASE("half integers parse and print") {
    CHECK(HalfInteger::parse("1/2").twice() == 1);
    CHECK(HalfInteger::parse("3").twice() == 6);
    CHECK(HalfInteger::parse(" -3/2 ").twice() == -3);
    CHECK(HalfInteger::parse("1/2").to_string() == "1/2");
    CHECK(HalfInteger::parse("2/1").twice() == 4);
    CHECK_THROWS_AS(HalfInteger::parse("1/3"), ParseError);
    CHECK_THROWS_AS(HalfInteger::parse("a"), ParseError);
    CHECK_THROWS_AS(HalfInteger::parse(""), ParseError);
}

TEST_CASE("spin systems") {
    auto s = SpinSystem::parse("1/2,1/2,1");
    CHECK(s.size() == 3);
    CHECK(s.dim() == 12);
    CHECK(s.local_dims() == std::vector<int>{2, 2, 3});
    CHECK_FALSE(s.all_spin_half());
    CHECK_FALSE(s.uniform());
    CHECK(SpinSystem::qubits(4).dim() == 16);
    CHECK(SpinSystem::qubits(4).all_spin_half());
    CHECK(s.subsystem({2, 0}).to_string() == SpinSystem::parse("1,1/2").to_string());
    CHECK_THROWS_AS(SpinSystem::parse("1/2,,1"), ParseError);
    CHECK_THROWS_AS(SpinSystem::parse(""), ParseError);
    try {
        SpinSystem::parse("1/2,x");
        FAIL("no throw");
    } catch (const ParseError &e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("Hilbert-Schmidt inner product examples") {
    auto sys = SpinSystem::qubits(1);
    Operator x(sys, oracle::pauli('x') / 2.0), y(sys, oracle::pauli('y') / 2.0), z(sys, oracle::pauli('z') / 2.0);
    CHECK(std::abs(hs_inner(x, x) - 0.5) < 1e-15);
    CHECK(std::abs(hs_inner(x, y)) < 1e-15);
    CHECK(std::abs(hs_inner(Operator::identity(sys), Operator::identity(sys)) - 2.0) < 1e-15);
    Operator plus = x + cplx(0, 1) * y;
    CHECK(std::abs(hs_inner(plus, plus) - 1.0) < 1e-15);
    CHECK(std::abs(hs_inner(plus, x) - 0.5) < 1e-15);
    CHECK(std::abs(hs_norm(z) - std::sqrt(0.5)) < 1e-15);
    CHECK_THROWS_AS(hs_inner(x, Operator::identity(SpinSystem::qubits(2))), DimensionError);
}

TEST_CASE("inner product is conjugate symmetric and sesquilinear") {
    auto sys = SpinSystem::parse("1/2,1");
    for (unsigned seed = 0; seed < 20; ++seed) {
        Operator a(sys, oracle::random_matrix(6, seed)), b(sys, oracle::random_matrix(6, seed + 100));
        cplx alpha(0.3, -1.2);
        CHECK(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) < 1e-12);
        CHECK(std::abs(hs_inner(a, alpha * b) - alpha * hs_inner(a, b)) < 1e-12);
        CHECK(std::abs(hs_inner(alpha * a, b) - std::conj(alpha) * hs_inner(a, b)) < 1e-12);
        CHECK(hs_inner(a, a).real() > 0);
    }
}

TEST_CASE("tensor products") {
    auto one = SpinSystem::qubits(1);
    Operator z(one, oracle::pauli('z') / 2.0), x(one, oracle::pauli('x') / 2.0);
    Operator zx = tensor_product(z, x);
    CHECK(zx.system() == SpinSystem::qubits(2));
    CHECK((zx.matrix() - oracle::kron(z.matrix(), x.matrix())).norm() < 1e-15);
    // (A (x) B)(C (x) D) = AC (x) BD
    auto q = SpinSystem::parse("1");
    Operator a(one, oracle::random_matrix(2, 1)), b(q, oracle::random_matrix(3, 2));
    Operator c(one, oracle::random_matrix(2, 3)), d(q, oracle::random_matrix(3, 4));
    CHECK(max_abs_diff(tensor_product(a, b) * tensor_product(c, d), tensor_product(a * c, b * d)) < 1e-12);
    CHECK(std::abs(hs_inner(tensor_product(a, b), tensor_product(c, d)) - hs_inner(a, c) * hs_inner(b, d)) < 1e-12);
}

TEST_CASE("operator algebra") {
    auto sys = SpinSystem::qubits(2);
    Operator a(sys, oracle::random_matrix(4, 7));
    CHECK(max_abs_diff(a.dagger().dagger(), a) < 1e-15);
    CHECK(max_abs_diff(a - a, Operator::zero(sys)) < 1e-15);
    CHECK((a + a.dagger()).is_hermitian(1e-12));
    CHECK_FALSE(a.is_hermitian(1e-12));
    CHECK(std::abs(Operator::identity(sys).trace() - 4.0) < 1e-15);
    CHECK_THROWS_AS(Operator(sys, Matrix::Zero(3, 3)), DimensionError);
    CHECK_THROWS_AS(a + Operator::zero(SpinSystem::qubits(1)), DimensionError);
}

TEST_CASE("operator JSON round trip is bit exact") {
    auto sys = SpinSystem::parse("1/2,3/2");
    Operator a(sys, oracle::random_matrix(8, 11));
    auto j = operator_to_json(a);
    CHECK(j["dims"] == nlohmann::json({2, 4}));
    Operator back = operator_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.system() == sys);
    CHECK(back.matrix() == a.matrix());
    nlohmann::json bad = j;
    bad["re"][0].erase(0);
    CHECK_THROWS_AS(operator_from_json(bad), SchemaError);
    CHECK_THROWS_AS(operator_from_json(nlohmann::json{{"dims", {2}}}), SchemaError);
    CHECK_THROWS_AS(operator_from_json(nlohmann::json{{"dims", {0}}, {"re", {}}, {"im", {}}}), SchemaError);
}

}
