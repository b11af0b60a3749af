#include "spindrops/angular.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "spindrops/error.hpp"

namespace spindrops::angular {

namespace {

mpz_class factorial(long n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

bool valid_projection(HalfInteger j, HalfInteger m) {
    return j.twice() >= 0 && std::abs(m.twice()) <= j.twice() && (j.twice() - m.twice()) % 2 == 0;
}

} // namespace

double CgCoefficient::value() const {
    if (sign == 0)
        return 0.0;
    return sign * std::sqrt(magnitude_squared.get_d());
}

CgCoefficient clebsch_gordan(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2, HalfInteger j,
                             HalfInteger m) {
    if (!valid_projection(j1, m1) || !valid_projection(j2, m2) || !valid_projection(j, m))
        throw Error("clebsch_gordan: invalid angular momentum arguments");
    CgCoefficient out;
    if (m1 + m2 != m)
        return out;
    // doubled quantities keep everything integral
    int J1 = j1.twice(), J2 = j2.twice(), J = j.twice();
    int M1 = m1.twice(), M2 = m2.twice(), M = m.twice();
    if (J > J1 + J2 || J < std::abs(J1 - J2) || (J1 + J2 + J) % 2 != 0)
        return out;
    auto h = [](int twice) { return static_cast<long>(twice / 2); };
    long a = h(J1 + J2 - J), b = h(J1 - M1), c = h(J2 + M2), d = h(J - J2 + M1), e = h(J - J1 - M2);
    long kmin = std::max({0L, -d, -e});
    long kmax = std::min({a, b, c});
    mpq_class sum = 0;
    for (long k = kmin; k <= kmax; ++k) {
        mpz_class den = factorial(k) * factorial(a - k) * factorial(b - k) * factorial(c - k) * factorial(d + k) *
                        factorial(e + k);
        mpq_class term(1, 1);
        term /= den;
        if (k % 2)
            sum -= term;
        else
            sum += term;
    }
    if (sum == 0)
        return out;
    mpq_class pref = mpq_class(J + 1) * factorial(h(J + J1 - J2)) * factorial(h(J - J1 + J2)) *
                     factorial(h(J1 + J2 - J));
    pref /= factorial(h(J1 + J2 + J) + 1);
    pref *= factorial(h(J + M)) * factorial(h(J - M)) * factorial(h(J1 - M1)) * factorial(h(J1 + M1)) *
            factorial(h(J2 - M2)) * factorial(h(J2 + M2));
    out.sign = sgn(sum);
    out.magnitude_squared = pref * sum * sum;
    out.magnitude_squared.canonicalize();
    return out;
}

double cg(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2, HalfInteger j, HalfInteger m) {
    if (m1 + m2 != m)
        return 0.0;
    using Key = std::tuple<int, int, int, int, int, int>;
    static std::map<Key, double> cache;
    static std::mutex mu;
    Key key{j1.twice(), m1.twice(), j2.twice(), m2.twice(), j.twice(), m.twice()};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    double v = clebsch_gordan(j1, m1, j2, m2, j, m).value();
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, v);
    return v;
}

cplx spherical_harmonic(int j, int m, double theta, double phi) {
    if (j < 0 || std::abs(m) > j)
        throw Error("spherical_harmonic: need |m| <= j, got j=" + std::to_string(j) + " m=" + std::to_string(m));
    int am = std::abs(m);
    double x = std::cos(theta), s = std::sin(theta);
    // P_am^am with the Condon-Shortley phase, then upward in degree
    double pmm = 1.0;
    for (int k = 1; k <= am; ++k)
        pmm *= -(2.0 * k - 1.0) * s;
    double p = pmm;
    if (j > am) {
        double pm1 = x * (2.0 * am + 1.0) * pmm;
        double pm0 = pmm;
        for (int l = am + 2; l <= j; ++l) {
            double pl = ((2.0 * l - 1.0) * x * pm1 - (l + am - 1.0) * pm0) / (l - am);
            pm0 = pm1;
            pm1 = pl;
        }
        p = pm1;
    }
    double lognorm = std::log((2.0 * j + 1.0) / (4.0 * M_PI)) + std::lgamma(j - am + 1.0) - std::lgamma(j + am + 1.0);
    cplx y = std::exp(0.5 * lognorm) * p * std::polar(1.0, am * phi);
    if (m < 0)
        y = ((am % 2) ? -1.0 : 1.0) * std::conj(y);
    return y;
}

Matrix spin_z(HalfInteger J) {
    int d = J.twice() + 1;
    Matrix z = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
        z(i, i) = (J.twice() - 2 * i) / 2.0;
    return z;
}

Matrix spin_plus(HalfInteger J) {
    int d = J.twice() + 1;
    Matrix p = Matrix::Zero(d, d);
    double jj = J.value();
    for (int i = 1; i < d; ++i) {
        double m = (J.twice() - 2 * i) / 2.0;
        p(i - 1, i) = std::sqrt(jj * (jj + 1) - m * (m + 1));
    }
    return p;
}

Matrix spin_minus(HalfInteger J) { return spin_plus(J).adjoint(); }

Matrix spin_x(HalfInteger J) { return (spin_plus(J) + spin_minus(J)) * 0.5; }

Matrix spin_y(HalfInteger J) { return (spin_plus(J) - spin_minus(J)) * cplx(0, -0.5); }

Matrix single_spin_tensor_matrix(HalfInteger J, int j, int m) {
    if (j < 0 || j > J.twice())
        throw Error("single_spin_tensor: rank " + std::to_string(j) + " not available for spin " + J.to_string());
    if (std::abs(m) > j)
        throw Error("single_spin_tensor: |m| > j");
    int d = J.twice() + 1;
    Matrix t = Matrix::Zero(d, d);
    auto hj = HalfInteger::from_int(j), hm = HalfInteger::from_int(m);
    for (int r = 0; r < d; ++r) {
        auto m1 = HalfInteger::from_twice(J.twice() - 2 * r);
        for (int c = 0; c < d; ++c) {
            auto m2 = HalfInteger::from_twice(J.twice() - 2 * c);
            if (m1 - m2 != hm)
                continue;
            int phase = ((J - m2).as_int() % 2) ? -1 : 1;
            t(r, c) = phase * cg(J, m1, J, -m2, hj, hm);
        }
    }
    return t;
}

Operator single_spin_tensor(HalfInteger J, int j, int m) {
    return Operator(SpinSystem({J}), single_spin_tensor_matrix(J, j, m));
}

} // namespace spindrops::angular
