// Acceptance runner: one PASS/FAIL line per primary criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "spindrops/cfp.hpp"
#include "spindrops/drops.hpp"
#include "spindrops/dynamics.hpp"
#include "spindrops/lisa.hpp"
#include "spindrops/opexpr.hpp"
#include "spindrops/symgroup.hpp"
#include "spindrops/tolerance.hpp"

#include "catalog.hpp"
#include "corpus.hpp"
#include "support.hpp"
#include "tables.hpp"

using namespace spindrops;
using symgroup::Partition;

namespace {

bool g_long = false;

/// Collects failed expectations for one criterion.
struct Report {
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string &what) {
        if (!ok)
            failures.push_back(what);
    }
    void note(const std::string &s) { notes.push_back(s); }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const lisa::LisaBasis &qubit_basis(int n) {
    static std::map<int, lisa::LisaBasis> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, lisa::build_basis(SpinSystem::qubits(n))).first;
    return it->second;
}

// ---------------------------------------------------------------- 1

void basis_completeness(Report &r) {
    std::vector<SpinSystem> systems;
    for (int n = 1; n <= (g_long ? 6 : 5); ++n)
        systems.push_back(SpinSystem::qubits(n));
    for (const char *s : {"1/2,1", "1,1", "1,3/2"})
        systems.push_back(SpinSystem::parse(s));
    double worst = 0;
    for (const auto &sys : systems) {
        auto t0 = std::chrono::steady_clock::now();
        const lisa::LisaBasis *b = nullptr;
        lisa::LisaBasis local;
        if (sys.all_spin_half())
            b = &qubit_basis(static_cast<int>(sys.size()));
        else {
            local = lisa::build_basis(sys);
            b = &local;
        }
        std::size_t dim = sys.dim();
        r.expect(b->size() == dim * dim, sys.to_string() + ": " + std::to_string(b->size()) + " entries");
        double err = b->orthonormality_error();
        worst = std::max(worst, err);
        r.expect(err < 1e-10, sys.to_string() + ": Gram error " + fmt(err));
        if (sys.size() == 6)
            r.note("N=6 in " + fmt(seconds_since(t0)) + " s");
    }
    r.note("max |Gram - I| = " + fmt(worst));
    if (!g_long)
        r.note("N=6 needs --long");
}

// ---------------------------------------------------------------- 2

void droplet_inventories(Report &r) {
    r.expect(qubit_basis(4).groups.size() == 36, "N=4: " + std::to_string(qubit_basis(4).groups.size()));
    r.expect(qubit_basis(5).groups.size() == 122, "N=5: " + std::to_string(qubit_basis(5).groups.size()));
    if (g_long)
        r.expect(qubit_basis(6).groups.size() == 423, "N=6: " + std::to_string(qubit_basis(6).groups.size()));
    else
        r.note("N=6 needs --long");
    int pairs = 0;
    for (int a = 1; a <= 4; ++a)
        for (int b = a; b <= 4; ++b) {
            auto sys = SpinSystem({HalfInteger::from_twice(a), HalfInteger::from_twice(b)});
            auto basis = lisa::build_basis(sys);
            // (2J)^2 + 3 and 4 J1 J2 + 3 in twice-J units
            int want = a * b + 3;
            r.expect(static_cast<int>(basis.groups.size()) == want,
                     sys.to_string() + ": " + std::to_string(basis.groups.size()) + " groups, want " +
                         std::to_string(want));
            ++pairs;
        }
    r.note(std::to_string(pairs) + " qudit pairs");
}

// ---------------------------------------------------------------- 3

void rank_catalogs(Report &r) {
    auto render = [](const std::vector<int> &v) {
        std::string s = "{";
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + std::to_string(v[i]);
        return s + "}";
    };
    auto lookup = [](tables::RankCatalog &c, const std::string &key) {
        return c.count(key) ? c[key] : std::vector<int>{};
    };
    for (int g = 2; g <= 6; ++g) {
        bool consistent = false;
        auto cat = catalog::catalog_of(lisa::raw_cfp_tensors(g), g, consistent);
        r.expect(consistent, "g=" + std::to_string(g) + ": tableaux of one shape disagree");
        if (g <= 4) {
            for (const auto &parts : oracle::partitions(g)) {
                std::string key = Partition{parts}.to_string();
                std::vector<int> want;
                for (auto [j, n] : oracle::rank_multiplicities(parts, {1}))
                    want.insert(want.end(), static_cast<std::size_t>(n), j);
                auto got = lookup(cat, key);
                r.expect(got == want, "g=" + std::to_string(g) + " " + key + ": " + render(got));
            }
            auto proj = catalog::catalog_of(lisa::raw_projection_tensors(g), g, consistent);
            r.expect(proj == cat, "g=" + std::to_string(g) + ": projection catalog differs");
        }
        if (g == 3 || g >= 5)
            for (const auto &[key, ranks] : tables::printed_catalog(g)) {
                auto got = lookup(cat, key);
                r.expect(got == ranks, "g=" + std::to_string(g) + " " + key + ": " + render(got));
            }
        if (g == 4) {
            r.expect(lookup(cat, "[4]") == std::vector<int>{0, 2, 4}, "g=4 [4]");
            r.expect(lookup(cat, "[3,1]") == std::vector<int>{1, 2, 3}, "g=4 [3,1]");
            r.expect(lookup(cat, "[2,2]") == std::vector<int>{0, 2}, "g=4 [2,2]");
            r.expect(lookup(cat, "[2,1,1]") == std::vector<int>{1}, "g=4 [2,1,1]");
            r.expect(lookup(cat, "[1,1,1,1]").empty(), "g=4 [1,1,1,1] not empty");
        }
        if (g == 6)
            r.expect(lookup(cat, "[4,2]/II") == std::vector<int>{2}, "g=6 [4,2]/II: " + render(lookup(cat, "[4,2]/II")));
    }
    int rows = 0;
    for (const auto &row : tables::pair_rows()) {
        auto b = lisa::build_two_qudit_basis(HalfInteger::from_twice(row.twice_j1), HalfInteger::from_twice(row.twice_j2));
        std::map<int, int> sym, anti;
        for (const auto &e : b.entries) {
            if (e.label.linearity() != 2 || e.label.m != e.label.j)
                continue;
            bool is_anti = e.label.tableau && e.label.tableau->rows.size() == 2;
            ++(is_anti ? anti : sym)[e.label.j];
        }
        auto matches = [](const std::map<int, int> &got, const std::vector<int> &want) {
            std::map<int, int> w;
            for (std::size_t j = 0; j < want.size(); ++j)
                if (want[j] > 0)
                    w[static_cast<int>(j)] = want[j];
            return got == w;
        };
        std::string name = HalfInteger::from_twice(row.twice_j1).to_string() + "," +
                           HalfInteger::from_twice(row.twice_j2).to_string();
        r.expect(matches(sym, row.sym), "multiplicity row " + name);
        if (!row.anti.empty())
            r.expect(matches(anti, row.anti), "antisymmetric multiplicity row " + name);
        ++rows;
    }
    r.note("g=2..6 catalogs, " + std::to_string(rows) + " multiplicity rows");
}

// ---------------------------------------------------------------- 4

void cfp_integrity(Report &r) {
    const auto &t = lisa::CfpTable::builtin();
    const long want[] = {7, 19, 51, 141};
    for (int g = 3; g <= 6; ++g) {
        long d = t.assembled_dimension(g);
        r.expect(d == want[g - 3], "CFP^" + std::to_string(g) + " dimension " + std::to_string(d));
    }
    int blocks = 0;
    for (const auto &b : t.blocks()) {
        r.expect(lisa::CfpTable::rows_orthonormal(b), "block g=" + std::to_string(b.g) + " j=" + std::to_string(b.j) +
                                                          " " + b.parent_shape.to_string() + " not orthonormal");
        ++blocks;
    }
    auto row_is = [](const lisa::CfpRow &row, const Partition &shape, const std::vector<std::string> &coeffs) {
        if (!(row.shape == shape) || row.coeffs.size() != coeffs.size())
            return false;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            auto s = lisa::Surd::parse(coeffs[i]);
            if (row.coeffs[i].sign != s.sign || row.coeffs[i].square != s.square)
                return false;
        }
        return true;
    };
    const auto &sym = t.block(4, 1, Partition{{3}});
    const auto &mixed = t.block(4, 1, Partition{{2, 1}});
    const auto &anti = t.block(4, 1, Partition{{1, 1, 1}});
    bool verbatim = sym.input_ranks == std::vector<int>{1} && sym.rows.size() == 1 &&
                    row_is(sym.rows[0], Partition{{3, 1}}, {"1"}) && mixed.input_ranks == std::vector<int>{1, 2} &&
                    mixed.rows.size() == 2 && row_is(mixed.rows[0], Partition{{3, 1}}, {"-5/8", "3/8"}) &&
                    row_is(mixed.rows[1], Partition{{2, 1, 1}}, {"3/8", "5/8"}) &&
                    anti.input_ranks == std::vector<int>{0} && anti.rows.size() == 1 &&
                    row_is(anti.rows[0], Partition{{2, 1, 1}}, {"1"});
    r.expect(verbatim, "rank-1 four-spin block differs");
    r.note(std::to_string(blocks) + " blocks");
}

// ---------------------------------------------------------------- 5

void method_equivalence(Report &r) {
    double worst = 0;
    for (int n = 1; n <= 4; ++n) {
        auto a = lisa::build_basis(SpinSystem::qubits(n), lisa::Method::projection);
        auto c = lisa::build_basis(SpinSystem::qubits(n), lisa::Method::cfp);
        r.expect(a.size() == c.size(), "N=" + std::to_string(n) + " sizes differ");
        for (const auto &e : a.entries) {
            int k = c.find(e.label);
            if (k < 0) {
                r.expect(false, "N=" + std::to_string(n) + ": " + e.label.to_string() + " missing");
                continue;
            }
            worst = std::max(worst, (e.matrix - c.entries[static_cast<std::size_t>(k)].matrix).cwiseAbs().maxCoeff());
        }
    }
    r.expect(worst < 1e-9, "max difference " + fmt(worst));
    r.note("max difference " + fmt(worst));
}

// ---------------------------------------------------------------- 6

void diagnostics(Report &r) {
    auto half = HalfInteger::from_twice(1);
    r.expect(symgroup::upsilon_kernel_dim(4, half) == 0, "g=4 kernel");
    r.expect(symgroup::upsilon_kernel_dim(5, half) == 1, "g=5 kernel");
    r.expect(symgroup::upsilon_kernel_dim(6, half) == 26, "g=6 kernel");
    auto d4 = symgroup::diagnose(4);
    r.expect(d4.corrupted.empty() && d4.kernel_dim == 0, "g=4 diagnostics");
    auto d5 = symgroup::diagnose(5);
    r.expect(d5.corrupted == std::vector<int>{16}, "g=5 corrupted set");
    r.expect(d5.kernel_dim == 1, "g=5 kernel dim");
    r.expect(d5.pairs == std::vector<std::pair<int, int>>{{6, 10}, {17, 21}}, "g=5 pairs");
    auto t0 = std::chrono::steady_clock::now();
    auto d6 = symgroup::diagnose(6);
    double elapsed = seconds_since(t0);
    r.expect(d6.corrupted == std::vector<int>{15, 21, 24, 25}, "g=6 corrupted set");
    r.expect(d6.kernel_dim == 26, "g=6 kernel dim");
    r.expect(d6.pairs.size() == 13, "g=6: " + std::to_string(d6.pairs.size()) + " pairs");
    auto has = [&](int a, int b) {
        return std::find(d6.pairs.begin(), d6.pairs.end(), std::pair{a, b}) != d6.pairs.end();
    };
    r.expect(has(8, 15) && has(9, 15), "g=6 pairs lack (8,15) or (9,15)");
    std::set<std::string> shapes;
    for (auto [a, b] : d6.pairs) {
        shapes.insert(symgroup::tableau_catalog(6)[static_cast<std::size_t>(a - 1)].shape().to_string());
        shapes.insert(symgroup::tableau_catalog(6)[static_cast<std::size_t>(b - 1)].shape().to_string());
    }
    r.expect(shapes == std::set<std::string>{"[4,2]", "[3,3]", "[3,2,1]", "[2,2,2]"}, "g=6 pair shapes");
    r.expect(elapsed < 120, "g=6 took " + fmt(elapsed) + " s");
    r.note("g=6 in " + fmt(elapsed) + " s");
}

// ---------------------------------------------------------------- 7

const drops::DropletFunction *find_droplet(const std::vector<drops::DropletFunction> &ds, const std::vector<int> &sites,
                                           const std::string &tableau = "") {
    for (const auto &d : ds)
        if (d.label.sites == sites && (d.label.tableau ? d.label.tableau->to_string() : "") == tableau)
            return &d;
    return nullptr;
}

Operator pure_state(const std::vector<int> &indices) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
    for (int i : indices)
        psi(i) = 0.5;
    return Operator(SpinSystem::qubits(4), psi * psi.adjoint());
}

void golden_values(Report &r) {
    const double tol = tol::simulation;
    auto near = [&](const drops::DropletFunction *f, int j, int m, double want, const std::string &what) {
        r.expect(f && std::abs(f->coeff(j, m) - want) < tol, what + " j=" + std::to_string(j) + " m=" + std::to_string(m));
    };
    auto w = drops::decompose(pure_state({7, 11, 13, 14}), qubit_basis(4), drops::Scaling::density);
    near(find_droplet(w, {}), 0, 0, 1.0, "W Id");
    for (int k = 1; k <= 4; ++k)
        near(find_droplet(w, {k}), 1, 0, -0.5, "W {" + std::to_string(k) + "}");
    for (int k = 1; k <= 4; ++k)
        for (int l = k + 1; l <= 4; ++l) {
            auto f = find_droplet(w, {k, l});
            near(f, 0, 0, 1 / std::sqrt(3.0), "W pair");
            near(f, 2, 0, -1 / std::sqrt(6.0), "W pair");
        }
    for (auto sites : {std::vector<int>{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}}) {
        auto f = find_droplet(w, sites, "123");
        near(f, 1, 0, -3 / std::sqrt(60.0), "W triple");
        near(f, 3, 0, 4 / std::sqrt(10.0), "W triple");
    }
    auto w4 = find_droplet(w, {1, 2, 3, 4}, "1234");
    near(w4, 0, 0, 2 / std::sqrt(20.0), "W 1234");
    near(w4, 2, 0, -1 / std::sqrt(7.0), "W 1234");
    near(w4, 4, 0, -16 / std::sqrt(70.0), "W 1234");
    int nonzero = 0;
    for (const auto &f : w)
        nonzero += f.zero ? 0 : 1;
    r.expect(nonzero == 16, "W: " + std::to_string(nonzero) + " nonzero droplets");

    auto e = drops::decompose(pure_state({0, 3, 12, 15}), qubit_basis(4), drops::Scaling::density);
    for (const auto &f : e)
        if (f.label.sites.size() == 1 || f.label.sites.size() == 3)
            r.expect(f.zero, "EPR " + f.label.to_string() + " should vanish");
    for (auto pair : {std::vector<int>{1, 2}, {3, 4}}) {
        auto f = find_droplet(e, pair);
        near(f, 0, 0, 1 / std::sqrt(3.0), "EPR pair");
        near(f, 2, -2, 1.0, "EPR pair");
        near(f, 2, 2, 1.0, "EPR pair");
        near(f, 2, 0, 2 / std::sqrt(6.0), "EPR pair");
        near(f, 1, 0, 0.0, "EPR pair");
    }
    for (auto pair : {std::vector<int>{1, 3}, {1, 4}, {2, 3}, {2, 4}}) {
        auto f = find_droplet(e, pair);
        r.expect(f && f->zero, "EPR cross pair should vanish");
    }
    auto e1 = find_droplet(e, {1, 2, 3, 4}, "1234");
    near(e1, 0, 0, 7 / std::sqrt(45.0), "EPR 1234");
    near(e1, 2, 0, 2 / std::sqrt(63.0), "EPR 1234");
    near(e1, 4, 0, 6 / std::sqrt(70.0), "EPR 1234");
    for (int m : {-2, 2}) {
        near(e1, 2, m, 2 / std::sqrt(42.0), "EPR 1234");
        near(e1, 4, m, 2 * std::sqrt(6.0) / std::sqrt(42.0), "EPR 1234");
    }
    near(e1, 4, 4, 1.0, "EPR 1234");
    near(e1, 4, -4, 1.0, "EPR 1234");
    auto e5 = find_droplet(e, {1, 2, 3, 4}, "12/34");
    near(e5, 0, 0, -2.0 / 3, "EPR 12/34");
    near(e5, 2, 0, -4 / std::sqrt(18.0), "EPR 12/34");
    near(e5, 2, 2, -2 / std::sqrt(3.0), "EPR 12/34");
    near(e5, 2, -2, -2 / std::sqrt(3.0), "EPR 12/34");
    auto e6 = find_droplet(e, {1, 2, 3, 4}, "13/24");
    r.expect(e6 && e6->zero, "EPR 13/24 should vanish");

    // invariants on random operators
    std::vector<SpinSystem> systems;
    for (int n = 1; n <= (g_long ? 6 : 5); ++n)
        systems.push_back(SpinSystem::qubits(n));
    for (const char *s : {"1", "3/2", "2"})
        systems.push_back(SpinSystem::parse(s));
    for (int a = 1; a <= 4; ++a)
        for (int b = std::max(a, 2); b <= 4; ++b)
            systems.push_back(SpinSystem({HalfInteger::from_twice(a), HalfInteger::from_twice(b)}));
    double parseval = 0, hermitian = 0;
    for (const auto &sys : systems) {
        lisa::LisaBasis local;
        const lisa::LisaBasis *b = nullptr;
        if (sys.all_spin_half())
            b = &qubit_basis(static_cast<int>(sys.size()));
        else {
            local = lisa::build_basis(sys);
            b = &local;
        }
        int d = static_cast<int>(sys.dim());
        for (unsigned seed = 0; seed < 100; ++seed) {
            Operator a(sys, oracle::random_matrix(d, 1000 + seed));
            double total = 0;
            for (const auto &f : drops::decompose(a, *b))
                total += f.weight();
            parseval = std::max(parseval, std::abs(total - hs_inner(a, a).real()) / hs_inner(a, a).real());
            Operator h(sys, oracle::random_hermitian(d, 2000 + seed));
            for (const auto &f : drops::decompose(h, *b))
                for (const auto &c : f.coeffs)
                    hermitian = std::max(hermitian, std::abs(f.coeff(c.j, -c.m) - (c.m % 2 ? -1.0 : 1.0) * std::conj(c.value)));
        }
    }
    r.expect(parseval < tol::basis, "Parseval relative error " + fmt(parseval));
    r.expect(hermitian < tol::basis, "Hermitian symmetry error " + fmt(hermitian));
    r.note(std::to_string(systems.size()) + " systems x 100 operators, Parseval " + fmt(parseval) + ", symmetry " +
           fmt(hermitian));
}

// ---------------------------------------------------------------- 8

void maxq_check(Report &r, int n, double &elapsed) {
    auto t0 = std::chrono::steady_clock::now();
    auto d = dynamics::scenario("maxq-" + std::to_string(n));
    auto tr = d.run();
    auto ds = drops::decompose(tr.states.back(), qubit_basis(n));
    double total = 0, inside = 0;
    bool top = false, bottom = false;
    for (const auto &f : ds) {
        total += f.weight();
        if (static_cast<int>(f.label.sites.size()) == n && f.label.tableau && symgroup::tableau_index(*f.label.tableau) == 1) {
            inside += f.weight();
            top = std::abs(f.coeff(n, n)) > 1e-6;
            bottom = std::abs(f.coeff(n, -n)) > 1e-6;
        }
    }
    elapsed = seconds_since(t0);
    std::string tag = "maxq-" + std::to_string(n);
    r.expect(inside / total >= 1 - 1e-9, tag + ": weight fraction " + fmt(inside / total));
    r.expect(top && bottom, tag + ": m = +-" + std::to_string(n) + " missing");
    r.expect(elapsed < 10, tag + " took " + fmt(elapsed) + " s");
}

void dynamics_scenarios(Report &r) {
    double t4 = 0, t5 = 0;
    maxq_check(r, 4, t4);
    maxq_check(r, 5, t5);

    auto t0 = std::chrono::steady_clock::now();
    auto sol = dynamics::scenario("soliton-6");
    auto tr = sol.run();
    auto target = opexpr::parse(*sol.target, sol.system);
    const auto &end = tr.states.back();
    double fidelity = std::abs(hs_inner(end, target)) / std::sqrt(hs_inner(end, end).real() * hs_inner(target, target).real());
    double ts = seconds_since(t0);
    double J = sol.hamiltonian.couplings.front().hz;
    r.expect(std::abs(fidelity - 1) < 1e-9, "soliton-6 fidelity " + fmt(fidelity));
    r.expect(std::abs(sol.sequence.total_delay() - 7 / (2 * J)) < 1e-12, "soliton-6 total delay");
    r.expect(ts < 10, "soliton-6 took " + fmt(ts) + " s");

    t0 = std::chrono::steady_clock::now();
    auto iso = dynamics::scenario("iso-12-1");
    auto curve = iso.run();
    auto obs = opexpr::parse(*iso.observable, iso.system);
    double Jiso = iso.hamiltonian.couplings.front().hz;
    double worst = 0;
    for (std::size_t k = 0; k < curve.states.size(); ++k) {
        double want = (11 + 16 * std::cos(3 * M_PI * Jiso * curve.times[k])) / 18;
        worst = std::max(worst, std::abs(dynamics::expectation(curve.states[k], obs) - want));
    }
    double ti = seconds_since(t0);
    r.expect(curve.states.size() == 101 && std::abs(curve.times.back() - 0.1) < 1e-12, "iso-12-1 grid");
    r.expect(worst < 1e-9, "iso-12-1 max error " + fmt(worst));
    r.expect(curve.states.size() > 30 && dynamics::expectation(curve.states[30], obs).real() < 0, "iso-12-1 not negative at 30 ms");
    r.expect(ti < 10, "iso-12-1 took " + fmt(ti) + " s");
    r.note("maxq-4 " + fmt(t4) + " s, maxq-5 " + fmt(t5) + " s, soliton-6 " + fmt(ts) + " s, iso-12-1 " + fmt(ti) +
           " s, curve error " + fmt(worst));
}

// ---------------------------------------------------------------- 9

void structure(Report &r) {
    for (int n = 1; n <= 5; ++n) {
        auto sys = SpinSystem::qubits(n);
        const auto &b = qubit_basis(n);
        std::string xs, ps, cs = "I1x";
        for (int k = 1; k <= n; ++k) {
            xs += (k > 1 ? "*" : "") + std::string("I") + std::to_string(k) + "x";
            ps += (k > 1 ? "*" : "") + std::string("I") + std::to_string(k) + "p";
            if (k > 1)
                cs += "*I" + std::to_string(k) + "z";
        }
        auto support = [&](const std::string &text) {
            std::vector<const lisa::BasisEntry *> out;
            Operator a = opexpr::parse(text, sys);
            for (const auto &e : b.entries)
                if (std::abs((e.matrix.adjoint() * a.matrix()).trace()) > tol::basis)
                    out.push_back(&e);
            return out;
        };
        std::string tag = "N=" + std::to_string(n) + " ";
        for (const auto *e : support(xs))
            r.expect(e->label.linearity() == n && symgroup::tableau_index(*e->label.tableau) == 1, tag + xs + " on " + e->label.to_string());
        for (const auto *e : support(ps))
            r.expect(e->label.m == n && symgroup::tableau_index(*e->label.tableau) == 1, tag + ps + " on " + e->label.to_string());
        std::set<std::string> tableaux;
        for (const auto *e : support(cs)) {
            auto shape = e->label.tableau->shape();
            bool allowed = shape == Partition{{n}} || (n >= 2 && shape == Partition{{n - 1, 1}});
            r.expect(allowed && std::abs(e->label.m) == 1, tag + cs + " on " + e->label.to_string());
            tableaux.insert(e->label.tableau->to_string());
        }
        r.expect(static_cast<int>(tableaux.size()) == n, tag + cs + ": " + std::to_string(tableaux.size()) + " tableaux");
    }
}

// ---------------------------------------------------------------- 10

void parser(Report &r) {
    int count = 0;
    for (const auto &c : corpus::kCorpus) {
        auto sys = SpinSystem::parse(c.spins);
        ++count;
        try {
            opexpr::parse(c.text, sys);
            r.expect(c.accept, std::string("accepted '") + c.text + "'");
        } catch (const ParseError &e) {
            r.expect(!c.accept && e.position() == c.position,
                     std::string("'") + c.text + "' rejected at " + std::to_string(e.position()));
        }
    }
    r.expect(count >= 30, "corpus has " + std::to_string(count) + " cases");
    std::mt19937 rng(11);
    int props = 0;
    const char axes[] = {'x', 'y', 'z', 'p', 'm'};
    for (int n = 2; n <= 4; ++n) {
        auto sys = SpinSystem::qubits(n);
        for (int trial = 0; trial < 40; ++trial) {
            std::string a = "I1" + std::string(1, axes[trial % 5]), b = "I" + std::to_string(n) + axes[(trial / 5) % 5];
            r.expect(max_abs_diff(opexpr::parse(a + "*" + b, sys), opexpr::parse(b + "*" + a, sys)) < 1e-15, a + "*" + b);
            std::string x = corpus::random_expr(rng, n), y = corpus::random_expr(rng, n);
            r.expect(max_abs_diff(opexpr::parse(x + " + " + y, sys), opexpr::parse(y + " + " + x, sys)) < 1e-14, x + " + " + y);
            std::string printed = opexpr::to_string(opexpr::parse_expr(x));
            r.expect(opexpr::to_string(opexpr::parse_expr(printed)) == printed, "print of " + x + " not stable");
            r.expect(max_abs_diff(opexpr::parse(printed, sys), opexpr::parse(x, sys)) < 1e-14, "print of " + x + " changes value");
            auto c = opexpr::canonical(opexpr::parse_expr(x));
            for (const auto &t : c.terms)
                for (std::size_t k = 1; k < t.atoms.size(); ++k)
                    r.expect(t.atoms[k - 1].site < t.atoms[k].site, "canonical order of " + x);
            props += 4;
        }
    }
    r.expect(opexpr::to_string(opexpr::parse_expr("I2x*I1z")) == "I1z*I2x", "canonical I2x*I1z");
    r.note(std::to_string(count) + " corpus cases, " + std::to_string(props) + " property checks");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"spindrops acceptance checks"};
    app.add_flag("--long", g_long, "include six spins 1/2");
    CLI11_PARSE(app, argc, argv);
    if (const char *env = std::getenv("SPINDROPS_LONG_TESTS"); env && std::string(env) != "0")
        g_long = true;

    const std::vector<std::pair<std::string, std::function<void(Report &)>>> criteria = {
        {"basis completeness and orthonormality", basis_completeness},
        {"droplet inventories", droplet_inventories},
        {"rank catalogs and bilinear multiplicities", rank_catalogs},
        {"fractional parentage integrity", cfp_integrity},
        {"projection and CFP methods agree", method_equivalence},
        {"projector diagnostics", diagnostics},
        {"decomposition golden values and invariants", golden_values},
        {"dynamics scenarios", dynamics_scenarios},
        {"structure of prominent operators", structure},
        {"operator expression parser", parser},
    };
    int failed = 0;
    for (const auto &[name, run] : criteria) {
        Report r;
        auto t0 = std::chrono::steady_clock::now();
        try {
            run(r);
        } catch (const std::exception &e) {
            r.failures.push_back(std::string("exception: ") + e.what());
        }
        double dt = seconds_since(t0);
        bool ok = r.failures.empty();
        failed += ok ? 0 : 1;
        std::ostringstream line;
        line << (ok ? "PASS" : "FAIL") << "  " << name << "  [" << fmt(dt) << " s]";
        for (const auto &n : r.notes)
            line << "; " << n;
        std::cout << line.str() << "\n";
        for (std::size_t i = 0; i < r.failures.size() && i < 10; ++i)
            std::cout << "    " << r.failures[i] << "\n";
        if (r.failures.size() > 10)
            std::cout << "    ... " << r.failures.size() - 10 << " more\n";
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - static_cast<std::size_t>(failed) << "/"
              << criteria.size() << "\n";
    return failed ? 1 : 0;
}
