#pragma once

#include <gmpxx.h>

#include "spindrops/half_integer.hpp"
#include "spindrops/operator.hpp"

namespace spindrops::angular {

/// Exact Clebsch-Gordan coefficient, value = sign * sqrt(magnitude_squared).
struct CgCoefficient {
    int sign = 0;
    mpq_class magnitude_squared = 0;

    double value() const;
    bool is_zero() const { return sign == 0; }
};

/// <j1 m1; j2 m2 | j m> with Condon-Shortley phase, evaluated exactly.
CgCoefficient clebsch_gordan(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2, HalfInteger j,
                             HalfInteger m);

/// Cached double precision value of clebsch_gordan.
double cg(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2, HalfInteger j, HalfInteger m);

/// Integer-argument shortcut.
inline double cg(int j1, int m1, int j2, int m2, int j, int m) {
    return cg(HalfInteger::from_int(j1), HalfInteger::from_int(m1), HalfInteger::from_int(j2),
              HalfInteger::from_int(m2), HalfInteger::from_int(j), HalfInteger::from_int(m));
}

struct SphericalSample {
    double theta = 0, phi = 0;
    cplx value;
};

/// Orthonormal spherical harmonic Y_jm(theta, phi), Condon-Shortley phase.
cplx spherical_harmonic(int j, int m, double theta, double phi);

/// Spin-J operators in the basis m = J, J-1, ..., -J.
Matrix spin_z(HalfInteger J);
Matrix spin_plus(HalfInteger J);
Matrix spin_minus(HalfInteger J);
Matrix spin_x(HalfInteger J);
Matrix spin_y(HalfInteger J);

/// Irreducible tensor T_jm of a single spin J, unit Hilbert-Schmidt norm.
Matrix single_spin_tensor_matrix(HalfInteger J, int j, int m);
Operator single_spin_tensor(HalfInteger J, int j, int m);

} // namespace spindrops::angular
