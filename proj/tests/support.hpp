#pragma once

// Independent reference computations shared by the unit tests and the acceptance runner.

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat random_matrix(int dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Mat m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            m(r, c) = cplx(n(rng), n(rng));
    return m;
}

inline Mat random_hermitian(int dim, unsigned seed) {
    Mat m = random_matrix(dim, seed);
    return (m + m.adjoint()) / 2.0;
}

inline Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

// Pauli matrices in the basis (up, down)
inline Mat pauli(char axis) {
    Mat m = Mat::Zero(2, 2);
    switch (axis) {
    case 'x':
        m(0, 1) = m(1, 0) = 1;
        break;
    case 'y':
        m(0, 1) = cplx(0, -1);
        m(1, 0) = cplx(0, 1);
        break;
    case 'z':
        m(0, 0) = 1;
        m(1, 1) = -1;
        break;
    default:
        m = Mat::Identity(2, 2);
    }
    return m;
}

/// Single-spin-1/2 operator sigma_axis/2 on site k (1-based) of n spins.
inline Mat spin_half_site(int n, int k, char axis) {
    Mat acc = Mat::Identity(1, 1);
    for (int s = 1; s <= n; ++s)
        acc = kron(acc, s == k ? Mat(pauli(axis) / 2.0) : Mat(Mat::Identity(2, 2)));
    return acc;
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1, p2 = 0;
            for (int k = 1; k <= n; ++k) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * k - 1) * z * p2 - (k - 1.0) * p3) / k;
            }
            pp = n * (z * p1 - p2) / (z * z - 1);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2 / ((1 - z * z) * pp * pp);
    }
}

/// Sphere inner product <f, g> by product Gauss quadrature.
template <class F, class G>
cplx sphere_inner(F f, G g, int n_theta = 40, int n_phi = 80) {
    std::vector<double> x, w;
    gauss_legendre(n_theta, x, w);
    cplx acc = 0;
    for (int i = 0; i < n_theta; ++i) {
        double theta = std::acos(x[static_cast<std::size_t>(i)]);
        for (int k = 0; k < n_phi; ++k) {
            double phi = 2 * M_PI * k / n_phi;
            acc += w[static_cast<std::size_t>(i)] * (2 * M_PI / n_phi) * std::conj(f(theta, phi)) * g(theta, phi);
        }
    }
    return acc;
}

// ------------------------------------------------------------------ characters

inline std::vector<std::vector<int>> partitions(int n, int max_part = -1) {
    if (max_part < 0)
        max_part = n;
    if (n == 0)
        return {{}};
    std::vector<std::vector<int>> out;
    for (int p = std::min(n, max_part); p >= 1; --p)
        for (auto rest : partitions(n - p, p)) {
            rest.insert(rest.begin(), p);
            out.push_back(rest);
        }
    return out;
}

inline double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

/// Class size of cycle type mu in S_n.
inline double class_size(const std::vector<int> &mu) {
    int n = 0;
    std::map<int, int> mult;
    for (int p : mu) {
        n += p;
        ++mult[p];
    }
    double z = 1;
    for (auto [p, k] : mult)
        z *= std::pow(p, k) * factorial(k);
    return factorial(n) / z;
}

/// Irreducible character chi_lambda(mu) by the Murnaghan-Nakayama rule on beta numbers.
inline long mn_character(std::set<int> beta, std::vector<int> mu) {
    if (mu.empty())
        return 1;
    int r = mu.back();
    mu.pop_back();
    long total = 0;
    for (int b : std::set<int>(beta)) {
        int nb = b - r;
        if (nb < 0 || beta.count(nb))
            continue;
        int between = 0;
        for (int c : beta)
            if (c > nb && c < b)
                ++between;
        std::set<int> next = beta;
        next.erase(b);
        next.insert(nb);
        total += (between % 2 ? -1 : 1) * mn_character(next, mu);
    }
    return total;
}

inline long character(const std::vector<int> &lambda, const std::vector<int> &mu) {
    std::set<int> beta;
    int len = static_cast<int>(lambda.size());
    for (int i = 0; i < len; ++i)
        beta.insert(lambda[static_cast<std::size_t>(i)] + len - 1 - i);
    return mn_character(beta, mu);
}

/// Multiplicity of rank j attached to each tableau of shape lambda, for g-linear tensors whose
/// single-site factors carry ranks `local_ranks`.
inline std::map<int, int> rank_multiplicities(const std::vector<int> &lambda, const std::vector<int> &local_ranks) {
    int g = 0;
    for (int p : lambda)
        g += p;
    std::map<int, double> weight_mult; // weight m -> multiplicity of (lambda, weight m)
    for (const auto &mu : partitions(g)) {
        std::map<int, double> poly{{0, 1.0}};
        for (int c : mu) {
            std::map<int, double> next;
            for (auto [w, a] : poly)
                for (int k : local_ranks)
                    for (int m = -k; m <= k; ++m)
                        next[w + c * m] += a;
            poly = next;
        }
        double coef = class_size(mu) * static_cast<double>(character(lambda, mu)) / factorial(g);
        for (auto [w, a] : poly)
            weight_mult[w] += coef * a;
    }
    std::map<int, int> out;
    for (auto [w, a] : weight_mult) {
        if (w < 0)
            continue;
        double above = weight_mult.count(w + 1) ? weight_mult[w + 1] : 0.0;
        int n = static_cast<int>(std::lround(a - above));
        if (n != 0)
            out[w] = n;
    }
    return out;
}

/// Rank multiplicities of the bilinear tensors of two spins with distinct spin numbers.
inline std::map<int, int> unequal_pair_multiplicities(int twice_j1, int twice_j2) {
    std::map<int, int> out;
    for (int k = 1; k <= twice_j1; ++k)
        for (int l = 1; l <= twice_j2; ++l)
            for (int j = std::abs(k - l); j <= k + l; ++j)
                ++out[j];
    return out;
}

// ------------------------------------------------------------------ Clebsch-Gordan by diagonalization

/// <1/2 m1; 1/2 m2 | S M> from the eigenvectors of total S^2 on two qubits, phase fixed so the
/// component with the largest m1 is positive.
inline double two_qubit_cg(int twice_m1, int twice_m2, int S, int M) {
    Mat s2 = Mat::Zero(4, 4);
    for (char a : {'x', 'y', 'z'}) {
        Mat f = spin_half_site(2, 1, a) + spin_half_site(2, 2, a);
        s2 += f * f;
    }
    Mat fz = spin_half_site(2, 1, 'z') + spin_half_site(2, 2, 'z');
    // restrict to the M sector
    std::vector<int> idx;
    for (int i = 0; i < 4; ++i)
        if (std::abs(fz(i, i).real() - M) < 1e-12)
            idx.push_back(i);
    Mat sub(static_cast<int>(idx.size()), static_cast<int>(idx.size()));
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b)
            sub(static_cast<int>(a), static_cast<int>(b)) = s2(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<Mat> es(sub);
    for (int e = 0; e < es.eigenvalues().size(); ++e) {
        if (std::abs(es.eigenvalues()(e) - S * (S + 1.0)) > 1e-9)
            continue;
        Eigen::VectorXcd v = es.eigenvectors().col(e);
        cplx lead = v(0);
        v *= std::abs(lead) / lead;
        int state = (twice_m1 > 0 ? 0 : 2) + (twice_m2 > 0 ? 0 : 1);
        for (std::size_t a = 0; a < idx.size(); ++a)
            if (idx[a] == state)
                return v(static_cast<int>(a)).real();
        return 0.0;
    }
    return 0.0;
}

} // namespace oracle
