#include "spindrops/operator.hpp"

#include "spindrops/error.hpp"

namespace spindrops {

namespace {
void require_same(const Operator &a, const Operator &b, const char *what) {
    if (a.system() != b.system() || a.matrix().rows() != b.matrix().rows())
        throw DimensionError(std::string(what) + ": operands live on different spin systems (" +
                             a.system().to_string() + " vs " + b.system().to_string() + ")");
}
} // namespace

Operator::Operator(SpinSystem system, Matrix matrix) : system_(std::move(system)), matrix_(std::move(matrix)) {
    auto d = static_cast<Eigen::Index>(system_.dim());
    if (matrix_.rows() != d || matrix_.cols() != d)
        throw DimensionError("matrix is " + std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()) +
                             " but system dimension is " + std::to_string(d));
}

Operator Operator::zero(const SpinSystem &system) {
    auto d = static_cast<Eigen::Index>(system.dim());
    return Operator(system, Matrix::Zero(d, d));
}

Operator Operator::identity(const SpinSystem &system) {
    auto d = static_cast<Eigen::Index>(system.dim());
    return Operator(system, Matrix::Identity(d, d));
}

Operator Operator::dagger() const { return Operator(system_, matrix_.adjoint()); }

Operator Operator::operator+(const Operator &o) const {
    require_same(*this, o, "add");
    return Operator(system_, matrix_ + o.matrix_);
}

Operator Operator::operator-(const Operator &o) const {
    require_same(*this, o, "subtract");
    return Operator(system_, matrix_ - o.matrix_);
}

Operator Operator::operator-() const { return Operator(system_, -matrix_); }

Operator Operator::operator*(const Operator &o) const {
    require_same(*this, o, "multiply");
    return Operator(system_, matrix_ * o.matrix_);
}

Operator Operator::operator*(cplx s) const { return Operator(system_, matrix_ * s); }

bool Operator::is_hermitian(double tol) const { return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol; }

cplx hs_inner(const Operator &a, const Operator &b) {
    require_same(a, b, "hs_inner");
    return (a.matrix().conjugate().cwiseProduct(b.matrix())).sum();
}

double hs_norm(const Operator &a) { return a.matrix().norm(); }

Operator tensor_product(const Operator &a, const Operator &b) {
    std::vector<HalfInteger> spins = a.system().spins();
    spins.insert(spins.end(), b.system().spins().begin(), b.system().spins().end());
    const Matrix &x = a.matrix();
    const Matrix &y = b.matrix();
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return Operator(SpinSystem(std::move(spins)), std::move(out));
}

double max_abs_diff(const Operator &a, const Operator &b) {
    require_same(a, b, "max_abs_diff");
    if (a.dim() == 0)
        return 0.0;
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

nlohmann::json operator_to_json(const Operator &a) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    const Matrix &m = a.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json rr = nlohmann::json::array(), ii = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ii.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return {{"dims", a.system().local_dims()}, {"re", re}, {"im", im}};
}

Operator operator_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("re") || !j.contains("im"))
        throw SchemaError("operator JSON needs 'dims', 're' and 'im'");
    std::vector<HalfInteger> spins;
    for (const auto &d : j.at("dims")) {
        if (!d.is_number_integer() || d.get<int>() < 1)
            throw SchemaError("operator 'dims' entries must be positive integers");
        spins.push_back(HalfInteger::from_twice(d.get<int>() - 1));
    }
    SpinSystem sys(spins);
    auto n = static_cast<Eigen::Index>(sys.dim());
    const auto &re = j.at("re");
    const auto &im = j.at("im");
    if (!re.is_array() || !im.is_array() || static_cast<Eigen::Index>(re.size()) != n ||
        static_cast<Eigen::Index>(im.size()) != n)
        throw SchemaError("operator 're'/'im' must have " + std::to_string(n) + " rows");
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto &rr = re[static_cast<std::size_t>(r)];
        const auto &ii = im[static_cast<std::size_t>(r)];
        if (!rr.is_array() || !ii.is_array() || static_cast<Eigen::Index>(rr.size()) != n ||
            static_cast<Eigen::Index>(ii.size()) != n)
            throw SchemaError("operator row " + std::to_string(r) + " has the wrong length");
        for (Eigen::Index c = 0; c < n; ++c) {
            auto k = static_cast<std::size_t>(c);
            if (!rr[k].is_number() || !ii[k].is_number())
                throw SchemaError("operator entries must be numbers");
            m(r, c) = cplx(rr[k].get<double>(), ii[k].get<double>());
        }
    }
    return Operator(std::move(sys), std::move(m));
}

} // namespace spindrops
