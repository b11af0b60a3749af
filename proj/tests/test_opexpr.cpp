#include <doctest.h>

#include <random>

#include "spindrops/opexpr.hpp"
#include "corpus.hpp"
#include "support.hpp"

using namespace spindrops;
using namespace spindrops::opexpr;

namespace {

using corpus::Case;
using corpus::kCorpus;
using corpus::random_expr;

} // namespace

TEST_SUITE("opexpr") {

TEST_CASE("grammar corpus") {
    int accepted = 0, rejected = 0;
    for (const auto &c : kCorpus) {
        CAPTURE(c.text);
        auto sys = SpinSystem::parse(c.spins);
        if (c.accept) {
            CHECK_NOTHROW(parse(c.text, sys));
            ++accepted;
        } else {
            try {
                parse(c.text, sys);
                FAIL("accepted");
            } catch (const ParseError &e) {
                CHECK(e.position() == c.position);
            }
            ++rejected;
        }
    }
    CHECK(accepted + rejected >= 30);
    CHECK(rejected >= 15);
}

TEST_CASE("end of input is flagged in the message") {
    try {
        parse_expr("I1x +");
        FAIL("accepted");
    } catch (const ParseError &e) {
        CHECK(std::string(e.what()).find("end of input") != std::string::npos);
    }
}

TEST_CASE("operators match explicit Kronecker products") {
    auto sys = SpinSystem::qubits(2);
    Matrix want = oracle::kron(oracle::pauli('x') / 2.0, oracle::pauli('z') / 2.0);
    CHECK((parse("I1x*I2z", sys).matrix() - want).norm() < 1e-15);
    Matrix plus = (oracle::pauli('x') + cplx(0, 1) * oracle::pauli('y')) / 2.0;
    CHECK((parse("I1p", SpinSystem::qubits(1)).matrix() - plus).norm() < 1e-15);
    CHECK((parse("I1m", SpinSystem::qubits(1)).matrix() - plus.adjoint()).norm() < 1e-15);
    Matrix mixed = cplx(1, 2) * want - 0.5 * Matrix::Identity(4, 4);
    CHECK((parse("(1+2i)*I1x*I2z - 0.5", sys).matrix() - mixed).norm() < 1e-15);
    CHECK((parse("2i*I1z", SpinSystem::qubits(1)).matrix() - cplx(0, 1) * oracle::pauli('z')).norm() < 1e-15);
    CHECK((parse("-I1z + I2z", sys).matrix() -
           (oracle::kron(Matrix::Identity(2, 2), oracle::pauli('z')) - oracle::kron(oracle::pauli('z'), Matrix::Identity(2, 2))) / 2.0)
              .norm() < 1e-15);
    CHECK(max_abs_diff(parse("Id", sys), Operator::identity(sys)) < 1e-15);
    CHECK(max_abs_diff(parse("S1z", SpinSystem::parse("1")), Operator(SpinSystem::parse("1"), Matrix(Eigen::Vector3cd(1, 0, -1).asDiagonal()))) < 1e-15);
}

TEST_CASE("factors on distinct sites commute and sums reorder freely") {
    std::mt19937 rng(5);
    auto sys = SpinSystem::qubits(3);
    const char axes[] = {'x', 'y', 'z', 'p', 'm'};
    for (int trial = 0; trial < 50; ++trial) {
        std::string a = std::string("I1") + axes[trial % 5], b = std::string("I3") + axes[(trial / 5) % 5];
        CHECK(max_abs_diff(parse(a + "*" + b, sys), parse(b + "*" + a, sys)) < 1e-15);
        std::string x = random_expr(rng, 3), y = random_expr(rng, 3);
        CHECK(max_abs_diff(parse(x + " + " + y, sys), parse(y + " + " + x, sys)) < 1e-14);
    }
}

TEST_CASE("canonical ordering sorts atoms by site and drops Id") {
    auto c = canonical(parse_expr("I3z*Id*I1x*I2y"));
    REQUIRE(c.terms.size() == 1);
    REQUIRE(c.terms[0].atoms.size() == 3);
    CHECK(c.terms[0].atoms[0].site == 1);
    CHECK(c.terms[0].atoms[1].site == 2);
    CHECK(c.terms[0].atoms[2].site == 3);
    CHECK(to_string(parse_expr("I2x*I1z")) == "I1z*I2x");
    CHECK(to_string(parse_expr("-I1z + 2*I2x")) == "-I1z + 2*I2x");
    CHECK(to_string(parse_expr("i*I1y - 0.5i*I2y")) == "i*I1y - 0.5i*I2y");
    CHECK(to_string(parse_expr("(1-2i)*I1x")) == "(1-2i)*I1x");
    CHECK(to_string(parse_expr("Id")) == "1");
    CHECK(to_string(parse_expr("I1x - I2x")) == "I1x - I2x");
}

TEST_CASE("pretty printing round trips") {
    std::mt19937 rng(17);
    for (int n = 1; n <= 4; ++n) {
        auto sys = SpinSystem::qubits(n);
        for (int trial = 0; trial < 40; ++trial) {
            std::string text = random_expr(rng, n);
            auto e = parse_expr(text);
            std::string printed = to_string(e);
            CAPTURE(text);
            CAPTURE(printed);
            CHECK(max_abs_diff(parse(printed, sys), parse(text, sys)) < 1e-14);
            CHECK(to_string(parse_expr(printed)) == printed);
        }
    }
}

TEST_CASE("site operators") {
    auto sys = SpinSystem::parse("1/2,1");
    CHECK(max_abs_diff(site_operator(sys, 2, 'z'), parse("S2z", sys)) < 1e-15);
    CHECK_THROWS_AS(site_operator(sys, 3, 'z'), DimensionError);
}

}
