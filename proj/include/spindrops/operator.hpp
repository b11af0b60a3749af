#pragma once

#include <complex>

#include <Eigen/Dense>
#include <json.hpp>

#include "spindrops/spin_system.hpp"

namespace spindrops {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Dense operator on the joint Hilbert space of a spin system.
class Operator {
  public:
    Operator() = default;
    Operator(SpinSystem system, Matrix matrix);

    static Operator zero(const SpinSystem &system);
    static Operator identity(const SpinSystem &system);

    const SpinSystem &system() const { return system_; }
    const Matrix &matrix() const { return matrix_; }
    std::size_t dim() const { return system_.dim(); }

    Operator dagger() const;
    Operator operator+(const Operator &o) const;
    Operator operator-(const Operator &o) const;
    Operator operator-() const;
    Operator operator*(const Operator &o) const;
    Operator operator*(cplx s) const;
    friend Operator operator*(cplx s, const Operator &a) { return a * s; }

    cplx trace() const { return matrix_.trace(); }
    bool is_hermitian(double tol) const;

  private:
    SpinSystem system_;
    Matrix matrix_;
};

/// Hilbert-Schmidt inner product Tr(A^dagger B).
cplx hs_inner(const Operator &a, const Operator &b);
/// Frobenius norm.
double hs_norm(const Operator &a);
/// Kronecker product on the concatenated system.
Operator tensor_product(const Operator &a, const Operator &b);
/// Largest entrywise modulus of a - b.
double max_abs_diff(const Operator &a, const Operator &b);

nlohmann::json operator_to_json(const Operator &a);
Operator operator_from_json(const nlohmann::json &j);

} // namespace spindrops
