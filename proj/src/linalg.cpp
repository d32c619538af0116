#include "bornlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bornlab {

// --- XReal ------------------------------------------------------------------

XReal::XReal(double v) {
    if (std::isnan(v)) {
        throw Error(ErrorKind::UndefinedArithmetic, "NaN is not an extended real");
    }
    if (std::isinf(v)) {
        kind_ = v > 0 ? Kind::PosInf : Kind::NegInf;
    } else {
        v_ = v;
    }
}

double XReal::value() const {
    switch (kind_) {
    case Kind::PosInf: return std::numeric_limits<double>::infinity();
    case Kind::NegInf: return -std::numeric_limits<double>::infinity();
    case Kind::Finite: break;
    }
    return v_;
}

double XReal::finite() const {
    if (!is_finite()) {
        throw Error(ErrorKind::UndefinedArithmetic, "value is infinite");
    }
    return v_;
}

XReal XReal::operator-() const {
    switch (kind_) {
    case Kind::PosInf: return neg_inf();
    case Kind::NegInf: return pos_inf();
    case Kind::Finite: break;
    }
    return XReal(-v_);
}

XReal operator+(const XReal &a, const XReal &b) {
    using K = XReal::Kind;
    if (a.kind_ == K::Finite && b.kind_ == K::Finite) {
        return XReal(a.v_ + b.v_);
    }
    if (a.kind_ != K::Finite && b.kind_ != K::Finite && a.kind_ != b.kind_) {
        throw Error(ErrorKind::UndefinedArithmetic, "inf - inf");
    }
    return a.kind_ != K::Finite ? a : b;
}

XReal operator*(double s, const XReal &a) {
    if (a.is_finite()) {
        return XReal(s * a.v_);
    }
    if (s == 0.0) {
        throw Error(ErrorKind::UndefinedArithmetic, "0 * inf");
    }
    return s > 0 ? a : -a;
}

bool operator==(const XReal &a, const XReal &b) {
    return a.kind_ == b.kind_ && (a.kind_ != XReal::Kind::Finite || a.v_ == b.v_);
}

bool operator<(const XReal &a, const XReal &b) { return a.value() < b.value(); }

// --- PureState ----------------------------------------------------------------

PureState::PureState(Vector v) : v_(std::move(v)) {
    if (v_.size() == 0) {
        throw Error(ErrorKind::InvalidDimension, "empty state vector");
    }
    if (std::abs(v_.norm() - 1.0) > tol::unit_norm) {
        throw Error(ErrorKind::InvalidState,
                    "state vector norm " + std::to_string(v_.norm()) + " is not 1");
    }
}

PureState PureState::normalized(const Vector &v) {
    const double n = v.norm();
    if (v.size() == 0 || n == 0.0) {
        throw Error(ErrorKind::InvalidState, "cannot normalize a zero vector");
    }
    return PureState(v / n);
}

PureState PureState::basis(std::size_t d, std::size_t k) {
    if (k >= d) {
        throw Error(ErrorKind::InvalidDimension, "basis index out of range");
    }
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
    v(static_cast<Eigen::Index>(k)) = 1.0;
    return PureState(std::move(v));
}

// --- HermitianOperator ------------------------------------------------------

HermitianOperator::HermitianOperator(const Matrix &m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorKind::InvalidOperator, "operator must be a nonempty square matrix");
    }
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tol::hermitian) {
        throw Error(ErrorKind::InvalidOperator,
                    "matrix is not hermitian (max |M - M^+| = " + std::to_string(asym) + ")");
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::identity(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return {Matrix::Identity(n, n), Trusted{}};
}

HermitianOperator HermitianOperator::zero(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return {Matrix::Zero(n, n), Trusted{}};
}

HermitianOperator HermitianOperator::rank_one(const Vector &v) {
    const double n2 = v.squaredNorm();
    if (n2 == 0.0) {
        throw Error(ErrorKind::InvalidState, "rank-one projector of a zero vector");
    }
    Matrix p = v * v.adjoint() / n2;
    return {0.5 * (p + p.adjoint()), Trusted{}};
}

HermitianOperator HermitianOperator::projector_onto(const Matrix &cols) {
    Matrix p = cols * cols.adjoint();
    return {0.5 * (p + p.adjoint()), Trusted{}};
}

bool HermitianOperator::is_projector() const {
    return (m_ * m_ - m_).norm() <= tol::projector;
}

std::pair<double, double> HermitianOperator::eigen_range() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    const auto &ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

bool HermitianOperator::is_effect() const {
    const auto [lo, hi] = eigen_range();
    return lo >= -tol::effect && hi <= 1.0 + tol::effect;
}

bool HermitianOperator::is_density_matrix() const {
    const auto [lo, hi] = eigen_range();
    (void)hi;
    return lo >= -tol::trace && std::abs(trace() - 1.0) <= tol::trace;
}

HermitianOperator HermitianOperator::scaled(double s) const { return {s * m_, Trusted{}}; }

HermitianOperator operator+(const HermitianOperator &a, const HermitianOperator &b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::InvalidDims, "operator dimensions differ");
    }
    return {a.m_ + b.m_, HermitianOperator::Trusted{}};
}

HermitianOperator operator-(const HermitianOperator &a, const HermitianOperator &b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::InvalidDims, "operator dimensions differ");
    }
    return {a.m_ - b.m_, HermitianOperator::Trusted{}};
}

// --- State --------------------------------------------------------------------

State::State(const PureState &psi) : rho_(psi.density()), pure_(psi.vector()) {}

State::State(const HermitianOperator &rho) : rho_(rho.matrix()) {
    if (!rho.is_density_matrix()) {
        throw Error(ErrorKind::InvalidState, "operator is not a density matrix");
    }
}

// --- Context ------------------------------------------------------------------

Context::Context(std::vector<HermitianOperator> members) : members_(std::move(members)) {
    if (members_.empty()) {
        throw Error(ErrorKind::InvalidPartition, "context has no members");
    }
    const std::size_t d = members_.front().dim();
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (const auto &m : members_) {
        if (m.dim() != d) {
            throw Error(ErrorKind::InvalidDims, "context members have different dimensions");
        }
        if (!m.is_effect()) {
            throw Error(ErrorKind::InvalidOperator, "context member is not an effect");
        }
        sum += m.matrix();
    }
    complete_ = frobenius_distance(sum, Matrix::Identity(sum.rows(), sum.cols())) <=
                tol::completeness;
    projective_ = std::all_of(members_.begin(), members_.end(),
                              [](const HermitianOperator &m) { return m.is_projector(); });
    for (std::size_t i = 0; projective_ && i < members_.size(); ++i) {
        for (std::size_t j = i + 1; j < members_.size(); ++j) {
            if ((members_[i].matrix() * members_[j].matrix()).norm() > tol::orthogonality) {
                projective_ = false;
                break;
            }
        }
    }
}

bool Context::rank_one() const {
    return projective_ && std::all_of(members_.begin(), members_.end(), [](const auto &m) {
               return std::abs(m.trace() - 1.0) <= tol::projector;
           });
}

double frobenius_distance(const Matrix &a, const Matrix &b) { return (a - b).norm(); }

// --- Sampling -----------------------------------------------------------------

namespace {

Matrix complex_gaussian(std::size_t rows, std::size_t cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

} // namespace

Matrix haar_random_unitary(std::size_t d, Rng &rng) {
    if (d == 0) {
        throw Error(ErrorKind::InvalidDimension, "unitary dimension must be >= 1");
    }
    const Matrix g = complex_gaussian(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix &r = qr.matrixQR();
    // Fix the phase ambiguity of QR so the distribution is Haar.
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        if (mag > 0.0) {
            q.col(j) *= rjj / mag;
        }
    }
    return q;
}

Matrix haar_random_unitary(std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    return haar_random_unitary(d, rng);
}

PureState random_pure_state(std::size_t d, Rng &rng) {
    if (d == 0) {
        throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 1");
    }
    Matrix g = complex_gaussian(d, 1, rng);
    return PureState::normalized(g.col(0));
}

HermitianOperator random_density_matrix(std::size_t d, Rng &rng) {
    if (d == 0) {
        throw Error(ErrorKind::InvalidDimension, "state dimension must be >= 1");
    }
    const Matrix g = complex_gaussian(d, d, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return HermitianOperator(0.5 * (rho + rho.adjoint()));
}

HermitianOperator random_hermitian(std::size_t d, Rng &rng) {
    const Matrix g = complex_gaussian(d, d, rng);
    return HermitianOperator(0.5 * (g + g.adjoint()));
}

std::vector<std::vector<std::size_t>> random_partition(std::size_t d, std::size_t n_blocks,
                                                       Rng &rng) {
    if (n_blocks < 1 || n_blocks > d) {
        throw Error(ErrorKind::InvalidPartition, "need 1 <= n_blocks <= d, got n_blocks=" +
                                                     std::to_string(n_blocks) +
                                                     ", d=" + std::to_string(d));
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::size_t> cut_candidates(d - 1);
    std::iota(cut_candidates.begin(), cut_candidates.end(), 1);
    std::shuffle(cut_candidates.begin(), cut_candidates.end(), rng);
    std::vector<std::size_t> cuts(cut_candidates.begin(),
                                  cut_candidates.begin() + static_cast<std::ptrdiff_t>(n_blocks - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(d);

    std::vector<std::vector<std::size_t>> blocks;
    std::size_t start = 0;
    for (std::size_t cut : cuts) {
        blocks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                            order.begin() + static_cast<std::ptrdiff_t>(cut));
        start = cut;
    }
    return blocks;
}

Context context_from_frame(const Matrix &frame,
                           const std::vector<std::vector<std::size_t>> &blocks) {
    std::vector<HermitianOperator> members;
    members.reserve(blocks.size());
    for (const auto &block : blocks) {
        Matrix cols(frame.rows(), static_cast<Eigen::Index>(block.size()));
        for (std::size_t k = 0; k < block.size(); ++k) {
            cols.col(static_cast<Eigen::Index>(k)) = frame.col(static_cast<Eigen::Index>(block[k]));
        }
        members.push_back(HermitianOperator::projector_onto(cols));
    }
    return Context(std::move(members));
}

Context random_projective_context(std::size_t d, std::size_t n_blocks, Rng &rng) {
    if (d == 0) {
        throw Error(ErrorKind::InvalidDimension, "context dimension must be >= 1");
    }
    if (n_blocks < 1 || n_blocks > d) {
        throw Error(ErrorKind::InvalidPartition, "n_blocks must lie in [1, d]");
    }
    const Matrix u = haar_random_unitary(d, rng);
    return context_from_frame(u, random_partition(d, n_blocks, rng));
}

Context random_projective_context(std::size_t d, std::size_t n_blocks, std::uint64_t seed) {
    Rng rng(seed);
    return random_projective_context(d, n_blocks, rng);
}

// --- Tensor products ----------------------------------------------------------

Matrix tensor_product(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector tensor_product(const Vector &a, const Vector &b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

LinearObject tensor_product(const LinearObject &a, const LinearObject &b) {
    if (a.index() != b.index()) {
        throw Error(ErrorKind::TypeMismatch, "tensor product of a vector with an operator");
    }
    if (const auto *va = std::get_if<Vector>(&a)) {
        return tensor_product(*va, std::get<Vector>(b));
    }
    return tensor_product(std::get<Matrix>(a), std::get<Matrix>(b));
}

// --- Coarse graining ----------------------------------------------------------

Context coarse_grain(const Context &ctx, const Partition &partition) {
    std::vector<int> seen(ctx.size(), 0);
    for (const auto &group : partition) {
        if (group.empty()) {
            throw Error(ErrorKind::InvalidPartition, "empty group in partition");
        }
        for (std::size_t idx : group) {
            if (idx >= ctx.size()) {
                throw Error(ErrorKind::InvalidPartition,
                            "member index " + std::to_string(idx) + " out of range");
            }
            if (seen[idx]++ != 0) {
                throw Error(ErrorKind::InvalidPartition,
                            "member index " + std::to_string(idx) + " appears twice");
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw Error(ErrorKind::InvalidPartition, "partition does not cover every member");
    }
    std::vector<HermitianOperator> merged;
    merged.reserve(partition.size());
    for (const auto &group : partition) {
        HermitianOperator sum = ctx[group.front()];
        for (std::size_t k = 1; k < group.size(); ++k) {
            sum = sum + ctx[group[k]];
        }
        merged.push_back(std::move(sum));
    }
    return Context(std::move(merged));
}

// --- Spectral decomposition ---------------------------------------------------

std::vector<SpectralComponent> spectral_decompose(const HermitianOperator &a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
    const auto &vals = es.eigenvalues();
    const Matrix &vecs = es.eigenvectors();
    const auto n = vals.size();

    // Ascending from the solver; walk it backwards so clusters come out descending.
    std::vector<SpectralComponent> out;
    Eigen::Index hi = n - 1;
    while (hi >= 0) {
        Eigen::Index lo = hi;
        while (lo > 0 && vals(hi) - vals(lo - 1) <= tol::degeneracy) {
            --lo;
        }
        const Matrix cols = vecs.middleCols(lo, hi - lo + 1);
        const double mean = vals.segment(lo, hi - lo + 1).mean();
        out.push_back({mean, HermitianOperator::projector_onto(cols)});
        hi = lo - 1;
    }
    return out;
}

std::vector<SpectralComponent> spectral_decompose(const Matrix &a) {
    return spectral_decompose(HermitianOperator(a));
}

Matrix reconstruct(std::span<const SpectralComponent> parts) {
    if (parts.empty()) {
        return {};
    }
    Matrix out = Matrix::Zero(parts.front().projector.matrix().rows(),
                              parts.front().projector.matrix().cols());
    for (const auto &p : parts) {
        out += p.eigenvalue * p.projector.matrix();
    }
    return out;
}

Matrix range_basis(const HermitianOperator &projector) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(projector.matrix());
    const auto &vals = es.eigenvalues();
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) > 0.5) {
            ++count;
        }
    }
    // Eigenvalues ascend, so the range is the trailing block.
    return es.eigenvectors().rightCols(count);
}

} // namespace bornlab
