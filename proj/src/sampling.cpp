#include "bornlab/sampling.hpp"

#include <cmath>
#include <numeric>

namespace bornlab {

Matrix Piece::block_basis(std::size_t j) const {
    const auto offset = std::accumulate(block_sizes.begin(), block_sizes.begin() + static_cast<long>(j),
                                        std::size_t{0});
    return frame.middleCols(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(block_sizes[j]));
}

std::vector<QuadRational> random_exact_weights(const QuadRational &total, std::size_t count, Rng &rng) {
    std::uniform_int_distribution<int> draw(1, 16);
    std::vector<long long> n(count);
    long long sum = 0;
    for (auto &x : n) {
        x = draw(rng);
        sum += x;
    }
    std::vector<QuadRational> out;
    out.reserve(count);
    for (auto x : n) {
        out.push_back(Rational(x, sum) * total);
    }
    return out;
}

void inject_sqrt2_pair(std::vector<QuadRational> &weights, Rng &rng) {
    if (weights.size() < 2) {
        return;
    }
    std::uniform_int_distribution<std::size_t> pick(0, weights.size() - 1);
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) {
        j = pick(rng);
    }
    const double smallest = std::min(weights[i].to_double(), weights[j].to_double());
    // A dyadic rational at most a third of the smallest weight keeps both positive.
    constexpr long long scale = 1LL << 20;
    const auto s_num = static_cast<long long>(std::floor(smallest / 3.0 * static_cast<double>(scale)));
    if (s_num <= 0) {
        return;
    }
    const QuadRational shift(Rational(0), Rational(s_num, scale));
    weights[i] = weights[i] + shift;
    weights[j] = weights[j] - shift;
}

std::vector<std::size_t> random_block_sizes(std::size_t m, std::size_t n_blocks, Rng &rng) {
    if (n_blocks == 0 || n_blocks > m) {
        throw Error(ErrorKind::InvalidPartition, "block count must lie in [1, m]");
    }
    const auto parts = random_partition(m, n_blocks, rng);
    std::vector<std::size_t> sizes;
    sizes.reserve(parts.size());
    for (const auto &p : parts) {
        sizes.push_back(p.size());
    }
    return sizes;
}

Matrix weighted_frame(const Matrix &basis, const Vector &psi, const std::vector<double> &weights,
                      const std::vector<std::size_t> &block_sizes, Rng &rng) {
    const auto m = basis.cols();
    if (m == 0) {
        return basis;
    }
    const Vector c = basis.adjoint() * psi;
    const double r = c.norm();
    if (r < 1e-14) {
        return basis * haar_random_unitary(static_cast<std::size_t>(m), rng);
    }

    // Complex reflection taking a phase multiple of e1 to u = c / r.
    const Vector u = c / r;
    const Complex phase = std::abs(u(0)) > 0 ? u(0) / std::abs(u(0)) : Complex(1.0);
    Vector v = -u;
    v(0) += phase;
    Matrix w = Matrix::Identity(m, m);
    if (v.norm() > 1e-15) {
        w -= 2.0 * v * v.adjoint() / v.squaredNorm();
    }
    // Randomize the orthocomplement of u.
    if (m > 1) {
        w.rightCols(m - 1) = w.rightCols(m - 1) * haar_random_unitary(static_cast<std::size_t>(m - 1), rng);
    }

    // Real reflection taking e1 to the target amplitude profile h.
    Eigen::VectorXd h = Eigen::VectorXd::Zero(m);
    std::size_t offset = 0;
    for (std::size_t j = 0; j < block_sizes.size(); ++j) {
        h(static_cast<Eigen::Index>(offset)) = std::sqrt(std::max(weights[j], 0.0)) / r;
        offset += block_sizes[j];
    }
    h /= h.norm();
    Eigen::VectorXd g = -h;
    g(0) += 1.0;
    Eigen::MatrixXd refl = Eigen::MatrixXd::Identity(m, m);
    if (g.norm() > 1e-15) {
        refl -= 2.0 * g * g.transpose() / g.squaredNorm();
    }
    return basis * w * refl.cast<Complex>();
}

TrialSampler::TrialSampler(const Assignment &a, std::size_t d, TagPolicy policy, Rng &rng)
    : d_(d), policy_(policy), rng_(rng) {
    const Consumes uses = a.consumes();
    if (uses.tags) {
        if (policy == TagPolicy::None) {
            throw Error(ErrorKind::MissingTags,
                        std::string(a.name()) + " consumes probability tags but the tag policy is none");
        }
        tagging_ = true;
        pivot_ = random_pure_state(d, rng_);
        state_ = State(*pivot_);
    } else if (uses.state) {
        if (a.preferred_state() == StateKind::Pure) {
            state_ = State(random_pure_state(d, rng_));
        } else {
            state_ = State(random_density_matrix(d, rng_));
        }
    }
}

Piece TrialSampler::split(const Matrix &basis, const std::vector<std::size_t> &block_sizes,
                          const QuadRational &total) {
    Piece piece;
    piece.block_sizes = block_sizes;
    if (std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0}) !=
        static_cast<std::size_t>(basis.cols())) {
        throw Error(ErrorKind::InvalidPartition, "block sizes do not cover the subspace");
    }
    if (tagging_) {
        piece.tags = random_exact_weights(total, block_sizes.size(), rng_);
        if (policy_ == TagPolicy::Mixed) {
            inject_sqrt2_pair(piece.tags, rng_);
        }
        std::vector<double> w;
        w.reserve(piece.tags.size());
        for (const auto &t : piece.tags) {
            w.push_back(t.to_double());
        }
        piece.frame = weighted_frame(basis, pivot_->vector(), w, block_sizes, rng_);
    } else {
        piece.frame = basis * haar_random_unitary(static_cast<std::size_t>(basis.cols()), rng_);
    }
    for (std::size_t j = 0; j < block_sizes.size(); ++j) {
        piece.members.push_back(HermitianOperator::projector_onto(piece.block_basis(j)));
    }
    return piece;
}

Context TrialSampler::join(const std::vector<const Piece *> &pieces) {
    std::vector<HermitianOperator> members;
    for (const auto *p : pieces) {
        members.insert(members.end(), p->members.begin(), p->members.end());
    }
    return Context(std::move(members));
}

std::vector<ProbabilityTag> TrialSampler::join_tags(const std::vector<const Piece *> &pieces) {
    std::vector<ProbabilityTag> tags;
    for (const auto *p : pieces) {
        for (const auto &t : p->tags) {
            tags.push_back(ProbabilityTag::of(t));
        }
    }
    return tags;
}

} // namespace bornlab
