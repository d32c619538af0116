#include "bornlab/gleason_fit.hpp"

#include <cmath>
#include <optional>

namespace bornlab {

Eigen::VectorXd hermitian_design_row(const Vector &x) {
    const auto d = x.size();
    Eigen::VectorXd row(d * d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        row(k++) = std::norm(x(i));
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const Complex z = std::conj(x(i)) * x(j);
            row(k++) = 2.0 * z.real();
            row(k++) = 2.0 * z.imag();
        }
    }
    return row;
}

namespace {

// Inverse of hermitian_design_row's parametrization:
// rho = sum_i c_i E_ii + sum_{i<j} [a_ij (E_ij + E_ji) + b_ij (-i E_ij + i E_ji)].
Matrix assemble(const Eigen::VectorXd &c, Eigen::Index d) {
    Matrix rho = Matrix::Zero(d, d);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        rho(i, i) = c(k++);
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double a = c(k++);
            const double b = c(k++);
            rho(i, j) = Complex(a, -b);
            rho(j, i) = Complex(a, b);
        }
    }
    return rho;
}

} // namespace

FitResult fit_density(const Assignment &a, std::size_t d, std::size_t n_frames, std::uint64_t seed,
                      const State *state) {
    if (d == 0) {
        throw Error(ErrorKind::InvalidDimension, "dimension must be positive");
    }
    const Consumes uses = a.consumes();
    if (a.domain() != Domain::Operators || uses.tags || !a.defined_in_dim(d)) {
        throw Error(ErrorKind::NotApplicable,
                    std::string(a.name()) + " is not defined on bare rank-one projectors in dimension " +
                        std::to_string(d));
    }
    if (n_frames * d < d * d) {
        throw Error(ErrorKind::UnderdeterminedFit, "need n_frames * d >= d^2 equations");
    }
    Rng rng(seed);
    std::optional<State> hidden;
    if (uses.state && state == nullptr) {
        hidden.emplace(random_density_matrix(d, rng));
        state = &*hidden;
    }

    const auto n_params = static_cast<Eigen::Index>(d * d);
    const auto n_rows = static_cast<Eigen::Index>(n_frames * d);
    Eigen::MatrixXd design(n_rows, n_params);
    Eigen::VectorXd target(n_rows);
    Eigen::Index row = 0;
    for (std::size_t f = 0; f < n_frames; ++f) {
        const Matrix u = haar_random_unitary(d, rng);
        std::vector<HermitianOperator> members;
        members.reserve(d);
        for (Eigen::Index k = 0; k < u.cols(); ++k) {
            members.push_back(HermitianOperator::rank_one(u.col(k)));
        }
        const Context ctx(members);
        for (Eigen::Index k = 0; k < u.cols(); ++k) {
            design.row(row) = hermitian_design_row(u.col(k)).transpose();
            target(row) = a.evaluate(EvalInput{ctx[static_cast<std::size_t>(k)], &ctx, state, {}}).real.finite();
            ++row;
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < n_params) {
        throw Error(ErrorKind::UnderdeterminedFit, "design matrix has rank " + std::to_string(qr.rank()) +
                                                       " < " + std::to_string(n_params));
    }
    const Eigen::VectorXd coeffs = qr.solve(target);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(design).singularValues();

    const Matrix rho = assemble(coeffs, static_cast<Eigen::Index>(d));
    FitResult out{HermitianOperator(rho), 0.0, 0.0, static_cast<std::size_t>(n_rows), rho.trace().real()};
    out.residual_rms = std::sqrt((design * coeffs - target).squaredNorm() / static_cast<double>(n_rows));
    out.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    return out;
}

std::string_view to_string(Regularity r) { return r == Regularity::Regular ? "regular" : "non-regular"; }

Regularity regularity_verdict(const FitResult &fit, double threshold) {
    return fit.residual_rms <= threshold ? Regularity::Regular : Regularity::NonRegular;
}

} // namespace bornlab
