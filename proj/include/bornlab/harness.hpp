#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bornlab/assignments.hpp"
#include "bornlab/exact.hpp"
#include "bornlab/linalg.hpp"

namespace bornlab {

// --- Envariance -----------------------------------------------------------------

struct SchmidtTerm {
    double coefficient;
    Vector system;
    Vector environment;
};

/// Unit vector in C^{d_S} (x) C^{d_E}, with index i * d_E + j for |i>|j>.
class BipartiteState {
  public:
    BipartiteState(Vector v, std::size_t d_s, std::size_t d_e);
    /// sum_k c_k |s_k>|e_k>; coefficients must be non-negative and descending.
    static BipartiteState from_schmidt(const std::vector<SchmidtTerm> &terms);

    [[nodiscard]] const Vector &vector() const { return v_; }
    [[nodiscard]] std::size_t dim_system() const { return d_s_; }
    [[nodiscard]] std::size_t dim_environment() const { return d_e_; }
    [[nodiscard]] const std::optional<std::vector<SchmidtTerm>> &schmidt() const { return schmidt_; }

    /// Schmidt form by SVD of the d_S x d_E coefficient matrix, descending.
    [[nodiscard]] std::vector<SchmidtTerm> schmidt_decompose() const;

  private:
    Vector v_;
    std::size_t d_s_;
    std::size_t d_e_;
    std::optional<std::vector<SchmidtTerm>> schmidt_;
};

/// || (I (x) U_E)(U_S (x) I) psi - psi ||.
double envariance_check(const BipartiteState &psi, const Matrix &u_s, const Matrix &u_e);

/// Permutation matrix P with P|k> = |perm[k]>.
Matrix permutation_matrix(const std::vector<std::size_t> &perm);

// --- Swap constraints -----------------------------------------------------------

enum class Provenance { SwapSymmetry, WeakAdditivity };
std::string_view to_string(Provenance p);

struct Equation {
    std::map<std::size_t, Rational> coeffs;
    Rational rhs;
    Provenance provenance;
    /// The swap (i j) or additivity instance that produced the equation.
    std::string cite;
};

struct ConstraintSystem {
    std::size_t variables = 0;
    std::vector<Equation> equations;
};

struct ConstraintSolution {
    std::size_t rank = 0;
    bool consistent = true;
    bool unique = false;
    /// Values of the pivot variables; only meaningful when unique.
    std::vector<Rational> values;
};

/// Exact reduced row echelon elimination over Q.
ConstraintSolution solve_constraints(const ConstraintSystem &system);

/// All C(n,2) equations p_i = p_j and the single equation sum p = 1.
ConstraintSystem swap_constraint_system(std::size_t n);
/// Unique solution of the swap system; throws inconsistent if the rank is
/// below n. Results are cached per n.
std::vector<Rational> swap_derivation(std::size_t n);

// --- Fine graining and the conditional chain -----------------------------------

struct FineGrainResult {
    Rational first;
    Rational second;
    /// max_j | |amplitude_j|^2 - 1/n | over the n ancilla branches.
    double amplitude_residual = 0.0;
};

/// Equal-amplitude n-branch composite over an orthonormal ancilla basis,
/// branches 1..m aggregated to outcome x1 and the rest to x2.
FineGrainResult fine_grain(std::size_t m, std::size_t n);

/// mu of m of n equal-amplitude outcomes via prod_{k=m+1}^{n} (1 - 1/k);
/// throws inconsistent if the product differs from m/n.
Rational zurek_chain(std::size_t m, std::size_t n);

// --- Orthogonality witness --------------------------------------------------------

/// |<x1|x2>| * |1 - <E1|E2>|; zero is necessary for a unitary taking
/// x_i (x) E0 to x_i (x) E_i.
double orthogonality_witness(const Vector &x1, const Vector &x2, const Vector &e0, const Vector &e1,
                             const Vector &e2);

// --- Probes built on single-operator evaluation ----------------------------------

/// Evaluates mu(A) within the two-member context {A, I - A}; the tag of A, if
/// given, fixes the tags (t, 1 - t).
Value evaluate_single(const Assignment &a, const HermitianOperator &op, const State *state,
                      const std::optional<QuadRational> &tag);

struct ShiftResult {
    double mu_sum = 0.0;
    double gap = 0.0;
};

/// V = sum mu_i lambda_i against V' = sum mu_i (lambda_i + k) over a rank-one
/// basis (the computational basis when none is given).
ShiftResult shift_invariance_check(const Assignment &a, const PureState &psi, const std::vector<double> &eigenvalues,
                                   double k, const Context *basis = nullptr,
                                   std::span<const ProbabilityTag> tags = {});

struct BuschResult {
    double rational_step = 0.0;
    double limit_gap = 0.0;
    bool within_tolerance = true;
    std::vector<std::pair<double, double>> series; // (q, mu(qA))
};

/// max_q |mu(qA) - q mu(A)| over the rationals, and for each real r the gap
/// between mu(rA) and mu(q A) at the finest decimal truncation q of r
/// (twelve digits). `tag` is the exact tag of A for tag-consuming assignments.
BuschResult busch_homogeneity_probe(const Assignment &a, const HermitianOperator &op, const State *state,
                                    const std::optional<QuadRational> &tag, const std::vector<Rational> &rationals,
                                    const std::vector<QuadRational> &reals, double tol);

struct DyadicResult {
    double error = 0.0;
    std::vector<std::pair<std::size_t, double>> partial_sums; // (i, sum_{j<=i} mu(A/2^j))
};

/// |mu(A) - sum_{i=1}^{M} mu(A/2^i) - mu(A)/2^M|.
DyadicResult dyadic_tail_check(const Assignment &a, const HermitianOperator &op, std::size_t m,
                               const State *state = nullptr, const std::optional<QuadRational> &tag = std::nullopt);

} // namespace bornlab
