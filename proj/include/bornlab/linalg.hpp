#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bornlab/error.hpp"
#include "bornlab/random.hpp"

namespace bornlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double projector = 1e-10;
inline constexpr double effect = 1e-10;
inline constexpr double trace = 1e-12;
inline constexpr double completeness = 1e-10;
inline constexpr double orthogonality = 1e-10;
inline constexpr double unit_norm = 1e-12;
inline constexpr double degeneracy = 1e-9;
} // namespace tol

/// Extended real: finite, +inf or -inf. Arithmetic saturates; the
/// indeterminate forms (inf - inf, 0 * inf) throw instead of producing NaN.
class XReal {
  public:
    enum class Kind { Finite, PosInf, NegInf };

    constexpr XReal() = default;
    XReal(double v); // NOLINT(google-explicit-constructor)

    static XReal pos_inf() { return XReal(Kind::PosInf); }
    static XReal neg_inf() { return XReal(Kind::NegInf); }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_finite() const { return kind_ == Kind::Finite; }
    /// Finite value, or +/-infinity as a double.
    [[nodiscard]] double value() const;
    /// Throws unless finite.
    [[nodiscard]] double finite() const;

    XReal operator-() const;
    friend XReal operator+(const XReal &a, const XReal &b);
    friend XReal operator-(const XReal &a, const XReal &b) { return a + (-b); }
    friend XReal operator*(double s, const XReal &a);
    friend bool operator==(const XReal &a, const XReal &b);
    friend bool operator<(const XReal &a, const XReal &b);

  private:
    explicit XReal(Kind k) : kind_(k) {}
    Kind kind_ = Kind::Finite;
    double v_ = 0.0;
};

/// Unit vector in C^d.
class PureState {
  public:
    /// Validates ||v|| = 1 within 1e-12.
    explicit PureState(Vector v);
    /// Rescales a nonzero vector to unit norm.
    static PureState normalized(const Vector &v);
    static PureState basis(std::size_t d, std::size_t k);

    [[nodiscard]] const Vector &vector() const { return v_; }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(v_.size()); }
    [[nodiscard]] Matrix density() const { return v_ * v_.adjoint(); }

  private:
    Vector v_;
};

/// d x d complex Hermitian matrix; refinements are checked on demand.
class HermitianOperator {
  public:
    /// Throws invalid-operator if max |M - M^dagger| > 1e-12 or M is not square.
    explicit HermitianOperator(const Matrix &m);

    static HermitianOperator identity(std::size_t d);
    static HermitianOperator zero(std::size_t d);
    /// |v><v| / <v|v>.
    static HermitianOperator rank_one(const Vector &v);
    /// Projector onto the span of orthonormal columns.
    static HermitianOperator projector_onto(const Matrix &orthonormal_columns);

    [[nodiscard]] const Matrix &matrix() const { return m_; }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    [[nodiscard]] double trace() const { return m_.trace().real(); }

    [[nodiscard]] bool is_projector() const;
    [[nodiscard]] bool is_effect() const;
    [[nodiscard]] bool is_density_matrix() const;
    [[nodiscard]] std::pair<double, double> eigen_range() const;

    [[nodiscard]] HermitianOperator scaled(double s) const;
    friend HermitianOperator operator+(const HermitianOperator &a, const HermitianOperator &b);
    friend HermitianOperator operator-(const HermitianOperator &a, const HermitianOperator &b);

  private:
    struct Trusted {};
    HermitianOperator(Matrix m, Trusted) : m_(std::move(m)) {}
    Matrix m_;
};

/// A quantum state as seen by assignments: always a density matrix, plus the
/// state vector when the state is pure.
class State {
  public:
    explicit State(const PureState &psi);
    /// Validates the density-matrix refinement.
    explicit State(const HermitianOperator &rho);

    [[nodiscard]] const Matrix &rho() const { return rho_; }
    [[nodiscard]] const std::optional<Vector> &pure() const { return pure_; }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }

  private:
    Matrix rho_;
    std::optional<Vector> pure_;
};

/// Ordered list of effects with completeness and projectivity flags computed
/// from the members.
class Context {
  public:
    /// Members must be effects of one common dimension.
    explicit Context(std::vector<HermitianOperator> members);

    [[nodiscard]] const std::vector<HermitianOperator> &members() const { return members_; }
    [[nodiscard]] const HermitianOperator &operator[](std::size_t i) const { return members_[i]; }
    [[nodiscard]] std::size_t size() const { return members_.size(); }
    [[nodiscard]] std::size_t dim() const { return members_.front().dim(); }
    [[nodiscard]] bool complete() const { return complete_; }
    [[nodiscard]] bool projective() const { return projective_; }
    [[nodiscard]] bool rank_one() const;

  private:
    std::vector<HermitianOperator> members_;
    bool complete_ = false;
    bool projective_ = false;
};

double frobenius_distance(const Matrix &a, const Matrix &b);

// Sampling. Every routine is deterministic in its seed or generator state.
Matrix haar_random_unitary(std::size_t d, std::uint64_t seed);
Matrix haar_random_unitary(std::size_t d, Rng &rng);
PureState random_pure_state(std::size_t d, Rng &rng);
/// Ginibre-distributed mixed state G G^dagger / Tr.
HermitianOperator random_density_matrix(std::size_t d, Rng &rng);
/// Random hermitian matrix with iid Gaussian entries.
HermitianOperator random_hermitian(std::size_t d, Rng &rng);
/// Random split of {0..d-1} into n_blocks nonempty groups.
std::vector<std::vector<std::size_t>> random_partition(std::size_t d, std::size_t n_blocks,
                                                       Rng &rng);
Context random_projective_context(std::size_t d, std::size_t n_blocks, std::uint64_t seed);
Context random_projective_context(std::size_t d, std::size_t n_blocks, Rng &rng);
/// Block projectors of a partition of the columns of an orthonormal frame.
Context context_from_frame(const Matrix &frame,
                           const std::vector<std::vector<std::size_t>> &blocks);

Matrix tensor_product(const Matrix &a, const Matrix &b);
Vector tensor_product(const Vector &a, const Vector &b);
using LinearObject = std::variant<Vector, Matrix>;
/// Kind-checked form; a vector paired with an operator is a type-mismatch.
LinearObject tensor_product(const LinearObject &a, const LinearObject &b);

using Partition = std::vector<std::vector<std::size_t>>;
/// Each group of member indices becomes one summed member.
Context coarse_grain(const Context &ctx, const Partition &partition);

struct SpectralComponent {
    double eigenvalue;
    HermitianOperator projector;
};

/// Eigenvalues in descending order; eigenvalues within 1e-9 of each other are
/// merged into one projector.
std::vector<SpectralComponent> spectral_decompose(const HermitianOperator &a);
std::vector<SpectralComponent> spectral_decompose(const Matrix &a);
Matrix reconstruct(std::span<const SpectralComponent> parts);

/// Orthonormal basis (as columns) of the range of a projector.
Matrix range_basis(const HermitianOperator &projector);

} // namespace bornlab
