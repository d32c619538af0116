#include "bornlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace bornlab {

// --- Envariance -----------------------------------------------------------------

BipartiteState::BipartiteState(Vector v, std::size_t d_s, std::size_t d_e)
    : v_(std::move(v)), d_s_(d_s), d_e_(d_e) {
    if (d_s == 0 || d_e == 0 || static_cast<std::size_t>(v_.size()) != d_s * d_e) {
        throw Error(ErrorKind::InvalidDims, "vector length must equal d_S * d_E");
    }
    if (std::abs(v_.norm() - 1.0) > tol::unit_norm) {
        throw Error(ErrorKind::InvalidState, "bipartite state is not a unit vector");
    }
}

BipartiteState BipartiteState::from_schmidt(const std::vector<SchmidtTerm> &terms) {
    if (terms.empty()) {
        throw Error(ErrorKind::InvalidState, "empty Schmidt decomposition");
    }
    const auto d_s = static_cast<std::size_t>(terms.front().system.size());
    const auto d_e = static_cast<std::size_t>(terms.front().environment.size());
    Vector v = Vector::Zero(static_cast<Eigen::Index>(d_s * d_e));
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const auto &t = terms[k];
        if (t.coefficient < 0 || (k > 0 && t.coefficient > terms[k - 1].coefficient)) {
            throw Error(ErrorKind::InvalidState, "Schmidt coefficients must be non-negative and descending");
        }
        if (static_cast<std::size_t>(t.system.size()) != d_s ||
            static_cast<std::size_t>(t.environment.size()) != d_e) {
            throw Error(ErrorKind::InvalidDims, "Schmidt vectors of inconsistent dimension");
        }
        v += t.coefficient * tensor_product(t.system, t.environment);
    }
    BipartiteState out(v, d_s, d_e);
    // Reconstruction from the terms' own Schmidt form must agree with v.
    Vector rebuilt = Vector::Zero(v.size());
    for (const auto &t : out.schmidt_decompose()) {
        rebuilt += t.coefficient * tensor_product(t.system, t.environment);
    }
    if ((rebuilt - out.v_).norm() > 1e-10) {
        throw Error(ErrorKind::InvalidState, "Schmidt reconstruction error above 1e-10");
    }
    out.schmidt_ = terms;
    return out;
}

std::vector<SchmidtTerm> BipartiteState::schmidt_decompose() const {
    Matrix coeffs(static_cast<Eigen::Index>(d_s_), static_cast<Eigen::Index>(d_e_));
    for (std::size_t i = 0; i < d_s_; ++i) {
        for (std::size_t j = 0; j < d_e_; ++j) {
            coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                v_(static_cast<Eigen::Index>(i * d_e_ + j));
        }
    }
    Eigen::JacobiSVD<Matrix> svd(coeffs, Eigen::ComputeFullU | Eigen::ComputeFullV);
    std::vector<SchmidtTerm> out;
    const auto &s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) <= 1e-14) {
            break;
        }
        // coeffs = U S V^dagger, so psi = sum_k s_k |u_k> (x) conj(v_k).
        out.push_back({s(k), svd.matrixU().col(k), svd.matrixV().col(k).conjugate()});
    }
    return out;
}

double envariance_check(const BipartiteState &psi, const Matrix &u_s, const Matrix &u_e) {
    const auto d_s = static_cast<Eigen::Index>(psi.dim_system());
    const auto d_e = static_cast<Eigen::Index>(psi.dim_environment());
    if (u_s.rows() != d_s || u_s.cols() != d_s || u_e.rows() != d_e || u_e.cols() != d_e) {
        throw Error(ErrorKind::InvalidDims, "unitaries do not match the subsystem dimensions");
    }
    const Vector moved = tensor_product(Matrix::Identity(d_s, d_s), u_e) *
                         (tensor_product(u_s, Matrix::Identity(d_e, d_e)) * psi.vector());
    return (moved - psi.vector()).norm();
}

Matrix permutation_matrix(const std::vector<std::size_t> &perm) {
    const auto n = static_cast<Eigen::Index>(perm.size());
    Matrix p = Matrix::Zero(n, n);
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (perm[k] >= perm.size() || seen[perm[k]]) {
            throw Error(ErrorKind::InvalidSpec, "not a permutation");
        }
        seen[perm[k]] = true;
        p(static_cast<Eigen::Index>(perm[k]), static_cast<Eigen::Index>(k)) = 1.0;
    }
    return p;
}

// --- Swap constraints -----------------------------------------------------------

std::string_view to_string(Provenance p) {
    return p == Provenance::SwapSymmetry ? "swap-symmetry" : "weak-additivity";
}

ConstraintSolution solve_constraints(const ConstraintSystem &system) {
    // Rows kept in reduced form: each pivot row mentions its own pivot and
    // non-pivot columns only.
    std::map<std::size_t, std::pair<std::map<std::size_t, Rational>, Rational>> pivots;
    ConstraintSolution sol;
    for (const auto &eq : system.equations) {
        auto coeffs = eq.coeffs;
        Rational rhs = eq.rhs;
        for (auto it = coeffs.begin(); it != coeffs.end();) {
            if (it->first >= system.variables) {
                throw Error(ErrorKind::InvalidSpec, "equation references an unknown variable");
            }
            it = it->second == 0 ? coeffs.erase(it) : std::next(it);
        }
        // Eliminate every pivot column present in the new row. Pivot rows
        // carry no other pivot columns, so one pass suffices.
        std::vector<std::size_t> hits;
        for (const auto &[c, v] : coeffs) {
            if (pivots.count(c) != 0) {
                hits.push_back(c);
            }
        }
        for (const auto col : hits) {
            const auto &row = pivots.at(col);
            const Rational f = coeffs.at(col);
            const int unit = f == 1 ? 1 : f == -1 ? -1 : 0;
            for (const auto &[c, v] : row.first) {
                Rational &slot = coeffs[c];
                if (unit == 1) {
                    slot -= v;
                } else if (unit == -1) {
                    slot += v;
                } else {
                    slot -= f * v;
                }
                if (slot == 0) {
                    coeffs.erase(c);
                }
            }
            if (row.second != 0) {
                rhs -= f * row.second;
            }
        }
        if (coeffs.empty()) {
            if (rhs != 0) {
                sol.consistent = false;
            }
            continue;
        }
        const std::size_t pivot = coeffs.begin()->first;
        const Rational lead = coeffs.begin()->second;
        for (auto &[c, v] : coeffs) {
            v /= lead;
        }
        rhs /= lead;
        // Back-substitute the new pivot out of the existing rows.
        for (auto &[col, row] : pivots) {
            auto hit = row.first.find(pivot);
            if (hit == row.first.end()) {
                continue;
            }
            const Rational f = hit->second;
            for (const auto &[c, v] : coeffs) {
                Rational &slot = row.first[c];
                slot -= f * v;
                if (slot == 0) {
                    row.first.erase(c);
                }
            }
            row.second -= f * rhs;
        }
        pivots.emplace(pivot, std::make_pair(std::move(coeffs), std::move(rhs)));
    }
    sol.rank = pivots.size();
    sol.unique = sol.consistent && sol.rank == system.variables;
    if (sol.unique) {
        sol.values.reserve(system.variables);
        for (const auto &[col, row] : pivots) {
            sol.values.push_back(row.second);
        }
    }
    return sol;
}

ConstraintSystem swap_constraint_system(std::size_t n) {
    if (n == 0) {
        throw Error(ErrorKind::InvalidSpec, "need at least one outcome");
    }
    ConstraintSystem sys;
    sys.variables = n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Equation eq;
            eq.coeffs[i] = 1;
            eq.coeffs[j] = -1;
            eq.rhs = 0;
            eq.provenance = Provenance::SwapSymmetry;
            eq.cite = "swap (" + std::to_string(i + 1) + " " + std::to_string(j + 1) + ")";
            sys.equations.push_back(std::move(eq));
        }
    }
    Equation norm;
    for (std::size_t i = 0; i < n; ++i) {
        norm.coeffs[i] = 1;
    }
    norm.rhs = 1;
    norm.provenance = Provenance::WeakAdditivity;
    norm.cite = "sum over all outcomes of the certain event";
    sys.equations.push_back(std::move(norm));
    return sys;
}

namespace {

/// Cached solutions; map nodes never move, so references stay valid.
const std::vector<Rational> &cached_swap_derivation(std::size_t n) {
    static std::mutex cache_mutex;
    static std::map<std::size_t, std::vector<Rational>> cache;
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(n); it != cache.end()) {
            return it->second;
        }
    }
    const auto sol = solve_constraints(swap_constraint_system(n));
    if (!sol.unique) {
        throw Error(ErrorKind::Inconsistent, "swap system has rank " + std::to_string(sol.rank) + " < " +
                                                 std::to_string(n));
    }
    std::lock_guard lock(cache_mutex);
    return cache.emplace(n, sol.values).first->second;
}

/// Exact sum; terms sharing one denominator are added as integers.
Rational exact_sum(std::span<const Rational> terms) {
    if (terms.empty()) {
        return 0;
    }
    const BigInt den = boost::multiprecision::denominator(terms.front());
    BigInt num = 0;
    Rational rest = 0;
    for (const auto &t : terms) {
        if (boost::multiprecision::denominator(t) == den) {
            num += boost::multiprecision::numerator(t);
        } else {
            rest += t;
        }
    }
    return Rational(num, den) + rest;
}

} // namespace

std::vector<Rational> swap_derivation(std::size_t n) { return cached_swap_derivation(n); }

// --- Fine graining and the conditional chain -----------------------------------

FineGrainResult fine_grain(std::size_t m, std::size_t n) {
    if (m < 1 || m > n) {
        throw Error(ErrorKind::InvalidSplit, "need 1 <= m <= n");
    }
    // |psi_XY> = n^{-1/2} (sum_{j<=m} |x1>|y_j> + sum_{j>m} |x2>|y_j>).
    const auto nn = static_cast<Eigen::Index>(n);
    Vector psi = Vector::Zero(2 * nn);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index j = 0; j < nn; ++j) {
        psi(j < static_cast<Eigen::Index>(m) ? j : nn + j) = amp;
    }
    FineGrainResult out;
    for (Eigen::Index j = 0; j < nn; ++j) {
        const double w = std::norm(psi(j)) + std::norm(psi(nn + j));
        out.amplitude_residual = std::max(out.amplitude_residual, std::abs(w - 1.0 / static_cast<double>(n)));
    }
    const std::span<const Rational> branch = cached_swap_derivation(n);
    out.first = exact_sum(branch.first(m));
    out.second = exact_sum(branch.subspan(m));
    return out;
}

Rational zurek_chain(std::size_t m, std::size_t n) {
    if (n < 1 || m > n) {
        throw Error(ErrorKind::InvalidSplit, "need 0 <= m <= n and n >= 1");
    }
    // Ruling out x_n leaves n - 1 equally likely outcomes, so the event
    // "not x_n" has weight 1 - 1/n; conditioning repeats down to m outcomes.
    BigInt num = 1;
    BigInt den = 1;
    for (std::size_t k = n; k > m; --k) {
        num *= k - 1; // 1 - 1/k = (k - 1)/k
        den *= k;
    }
    const Rational value(num, den);
    const Rational direct(static_cast<long long>(m), static_cast<long long>(n));
    if (value != direct) {
        throw Error(ErrorKind::Inconsistent, "chain product " + to_string(value) + " != " + to_string(direct));
    }
    return value;
}

// --- Orthogonality witness --------------------------------------------------------

double orthogonality_witness(const Vector &x1, const Vector &x2, const Vector &e0, const Vector &e1,
                             const Vector &e2) {
    for (const Vector *v : {&x1, &x2, &e0, &e1, &e2}) {
        if (std::abs(v->norm() - 1.0) > tol::unit_norm) {
            throw Error(ErrorKind::InvalidState, "orthogonality witness needs unit vectors");
        }
    }
    if (x1.size() != x2.size() || e0.size() != e1.size() || e0.size() != e2.size()) {
        throw Error(ErrorKind::InvalidDims, "system or environment vectors differ in dimension");
    }
    const Complex sx = x1.dot(x2);
    const Complex se = e1.dot(e2);
    return std::abs(sx) * std::abs(Complex(1.0) - se);
}

// --- Single-operator probes -------------------------------------------------------

Value evaluate_single(const Assignment &a, const HermitianOperator &op, const State *state,
                      const std::optional<QuadRational> &tag) {
    const auto d = op.dim();
    const HermitianOperator rest = HermitianOperator::identity(d) - op;
    std::vector<HermitianOperator> members{op};
    std::vector<ProbabilityTag> tags;
    if (tag) {
        tags.push_back(ProbabilityTag::of(*tag));
    }
    if (rest.matrix().norm() > tol::completeness) {
        members.push_back(rest);
        if (tag) {
            tags.push_back(ProbabilityTag::of(QuadRational(1) - *tag));
        }
    }
    if (a.consumes().tags && !tag) {
        throw Error(ErrorKind::MissingTags, std::string(a.name()) + " needs the tag of the probed operator");
    }
    const Context ctx(std::move(members));
    return a.evaluate(EvalInput{op, &ctx, state, a.consumes().tags ? std::span<const ProbabilityTag>(tags)
                                                                   : std::span<const ProbabilityTag>()});
}

ShiftResult shift_invariance_check(const Assignment &a, const PureState &psi, const std::vector<double> &eigenvalues,
                                   double k, const Context *basis, std::span<const ProbabilityTag> tags) {
    const auto d = psi.dim();
    if (a.domain() != Domain::Operators || !a.defined_in_dim(d)) {
        throw Error(ErrorKind::NotApplicable, std::string(a.name()) + " has no per-outcome values here");
    }
    std::optional<Context> computational;
    if (basis == nullptr) {
        std::vector<HermitianOperator> members;
        for (std::size_t i = 0; i < d; ++i) {
            members.push_back(HermitianOperator::rank_one(PureState::basis(d, i).vector()));
        }
        computational.emplace(std::move(members));
        basis = &*computational;
    }
    if (eigenvalues.size() != basis->size() || basis->dim() != d) {
        throw Error(ErrorKind::InvalidSpec, "need one eigenvalue per basis member");
    }
    if (a.consumes().tags && tags.size() != basis->size()) {
        throw Error(ErrorKind::MissingTags, std::string(a.name()) + " needs one tag per basis member");
    }
    const State state(psi);
    double mu_sum = 0.0;
    double v = 0.0;
    double v_shift = 0.0;
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const double mu = a.evaluate(EvalInput{(*basis)[i], basis, &state, tags}).real.finite();
        mu_sum += mu;
        v += mu * eigenvalues[i];
        v_shift += mu * (eigenvalues[i] + k);
    }
    return {mu_sum, std::abs(v_shift - v - k)};
}

namespace {

HermitianOperator scaled_effect(const HermitianOperator &op, double s) {
    HermitianOperator out = op.scaled(s);
    if (!out.is_effect()) {
        throw Error(ErrorKind::InvalidScaling, "scaling by " + std::to_string(s) + " leaves the effect cone");
    }
    return out;
}

std::optional<QuadRational> scaled_tag(const std::optional<QuadRational> &tag, const QuadRational &s) {
    if (!tag) {
        return std::nullopt;
    }
    return s * *tag;
}

} // namespace

BuschResult busch_homogeneity_probe(const Assignment &a, const HermitianOperator &op, const State *state,
                                    const std::optional<QuadRational> &tag, const std::vector<Rational> &rationals,
                                    const std::vector<QuadRational> &reals, double tol) {
    BuschResult out;
    const double base = evaluate_single(a, op, state, tag).real.finite();
    for (const auto &q : rationals) {
        const double qd = to_double(q);
        const double v = evaluate_single(a, scaled_effect(op, qd), state, scaled_tag(tag, QuadRational(q))).real.finite();
        out.series.emplace_back(qd, v);
        out.rational_step = std::max(out.rational_step, std::abs(v - qd * base));
    }
    const BigInt scale = BigInt(1000000000000LL);
    for (const auto &r : reals) {
        const double rd = r.to_double();
        const double at_r = evaluate_single(a, scaled_effect(op, rd), state, scaled_tag(tag, r)).real.finite();
        // Largest twelve-digit decimal not above r.
        const Rational q(BigInt(static_cast<long long>(std::floor(rd * 1e12))), scale);
        const double qd = to_double(q);
        const double near =
            evaluate_single(a, scaled_effect(op, qd), state, scaled_tag(tag, QuadRational(q))).real.finite();
        out.limit_gap = std::max(out.limit_gap, std::abs(near - at_r));
    }
    out.within_tolerance = out.rational_step <= tol && out.limit_gap <= tol;
    return out;
}

DyadicResult dyadic_tail_check(const Assignment &a, const HermitianOperator &op, std::size_t m, const State *state,
                               const std::optional<QuadRational> &tag) {
    if (m < 1) {
        throw Error(ErrorKind::InvalidSpec, "need M >= 1");
    }
    DyadicResult out;
    const double whole = evaluate_single(a, op, state, tag).real.finite();
    double partial = 0.0;
    double scale = 1.0;
    Rational exact_scale = 1;
    for (std::size_t i = 1; i <= m; ++i) {
        scale *= 0.5;
        exact_scale /= 2;
        partial += evaluate_single(a, op.scaled(scale), state, scaled_tag(tag, QuadRational(exact_scale)))
                       .real.finite();
        out.partial_sums.emplace_back(i, partial);
    }
    out.error = std::abs(whole - partial - whole * scale);
    return out;
}

} // namespace bornlab
