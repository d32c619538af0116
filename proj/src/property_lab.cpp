#include "bornlab/property_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>

#include "bornlab/parallel.hpp"

namespace bornlab {

namespace {

std::size_t uniform(Rng &rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

struct Measured {
    double real = 0.0;
    std::optional<QuadRational> exact;
};

Measured measure(const Value &v) { return {v.real.value(), v.exact}; }

Measured operator+(const Measured &x, const Measured &y) {
    Measured out{x.real + y.real, std::nullopt};
    if (x.exact && y.exact) {
        out.exact = *x.exact + *y.exact;
    }
    return out;
}

struct Gap {
    double value = 0.0;
    bool exact = false;
};

Gap gap(const Measured &x, const Measured &y) {
    if (x.exact && y.exact) {
        return {std::abs((*x.exact - *y.exact).to_double()), true};
    }
    return {std::abs(x.real - y.real), false};
}

/// What one trial compared.
struct Outcome {
    Gap gap;
    std::string description;
    std::vector<std::pair<std::string, Measured>> values;
};

using TrialFn = std::function<std::optional<Outcome>(std::size_t d, Rng &rng)>;

PropertyVerdict make_verdict(const Assignment &a, std::string_view property, double tol, std::uint64_t seed) {
    PropertyVerdict v;
    v.property = std::string(property);
    v.assignment = std::string(a.name());
    v.tolerance = tol;
    v.seed = seed;
    return v;
}

PropertyVerdict not_applicable(const Assignment &a, std::string_view property, const CheckConfig &cfg,
                               std::string note) {
    auto v = make_verdict(a, property, cfg.tol, cfg.seed);
    v.status = Status::NotApplicable;
    v.notes.push_back(std::move(note));
    return v;
}

std::vector<std::size_t> usable_dims(const Assignment &a, const CheckConfig &cfg, std::size_t min_dim) {
    std::vector<std::size_t> out;
    for (auto d : cfg.dims) {
        if (d >= min_dim && a.defined_in_dim(d)) {
            out.push_back(d);
        }
    }
    return out;
}

Witness to_witness(std::size_t trial, std::size_t d, std::uint64_t trial_seed, const Outcome &o) {
    Witness w;
    w.trial = trial;
    w.dim = d;
    w.trial_seed = trial_seed;
    w.description = o.description;
    w.discrepancy = o.gap.value;
    for (const auto &[name, m] : o.values) {
        w.values.emplace_back(name, m.real);
        if (m.exact) {
            w.exact_values.emplace_back(name, m.exact->to_string());
        }
    }
    return w;
}

PropertyVerdict run_trials(const Assignment &a, std::string_view property, const CheckConfig &cfg,
                           const std::vector<std::size_t> &dims, std::size_t per_dim, double tol,
                           const TrialFn &fn) {
    auto verdict = make_verdict(a, property, tol, cfg.seed);
    if (dims.empty()) {
        verdict.status = Status::NotApplicable;
        verdict.notes.push_back("no requested dimension is in the assignment's domain");
        return verdict;
    }
    bool all_exact = true;
    std::size_t ran = 0;
    const std::size_t total = per_dim * dims.size();
    for (std::size_t t = 0; t < total; ++t) {
        const std::size_t d = dims[t % dims.size()];
        const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
        Rng rng(trial_seed);
        auto outcome = fn(d, rng);
        if (!outcome) {
            continue;
        }
        ++ran;
        all_exact = all_exact && outcome->gap.exact;
        verdict.max_discrepancy = std::max(verdict.max_discrepancy, outcome->gap.value);
        if (outcome->gap.value > tol && !verdict.witness) {
            verdict.witness = to_witness(t, d, trial_seed, *outcome);
        }
    }
    verdict.trials = ran;
    verdict.exact = ran > 0 && all_exact;
    verdict.status = verdict.witness ? Status::Fails : Status::Holds;
    return verdict;
}

Measured eval(const Assignment &a, const HermitianOperator &op, const Context &ctx, const State *state,
              const std::vector<ProbabilityTag> &tags) {
    return measure(a.evaluate(EvalInput{op, &ctx, state, tags}));
}

Piece sub_piece(const Piece &p, std::size_t j) {
    Piece q;
    q.frame = p.block_basis(j);
    q.block_sizes = {p.block_sizes[j]};
    q.members = {p.members[j]};
    if (!p.tags.empty()) {
        q.tags = {p.tags[j]};
    }
    return q;
}

std::vector<std::size_t> ones(std::size_t n) { return std::vector<std::size_t>(n, 1); }

std::string describe_sizes(std::size_t d, const Context &c1, const Context &c2) {
    return "d=" + std::to_string(d) + ", contexts of " + std::to_string(c1.size()) + " and " +
           std::to_string(c2.size()) + " members";
}

QuadRational random_quad(Rng &rng) {
    std::uniform_int_distribution<long long> num(-50, 50);
    std::uniform_int_distribution<long long> den(1, 20);
    const Rational a(num(rng), den(rng));
    const Rational b(num(rng), den(rng));
    return {a, b};
}

QuadRational random_positive_quad(Rng &rng) {
    for (;;) {
        auto x = random_quad(rng);
        if (x.sign() > 0) {
            return x;
        }
    }
}

std::string scalar_domain_note() { return "domain is Q(sqrt2), not operators"; }

// Cauchy equation on random pairs, in exact arithmetic.
PropertyVerdict scalar_additivity(const Assignment &a, const CheckConfig &cfg) {
    const std::size_t n = cfg.trials * std::max<std::size_t>(1, cfg.dims.size());
    auto v = run_trials(a, "additivity", cfg, {0}, n, cfg.tol, [&](std::size_t, Rng &rng) {
        const auto x = random_quad(rng);
        const auto y = random_quad(rng);
        const QuadRational lhs = a.evaluate_scalar(x + y);
        const QuadRational rhs = a.evaluate_scalar(x) + a.evaluate_scalar(y);
        Outcome o;
        o.gap = {std::abs((lhs - rhs).to_double()), true};
        o.description = "f(x+y) vs f(x)+f(y) at x=" + x.to_string() + ", y=" + y.to_string();
        o.values = {{"f(x+y)", {lhs.to_double(), lhs}}, {"f(x)+f(y)", {rhs.to_double(), rhs}}};
        return std::optional<Outcome>(o);
    });
    v.notes.push_back("Cauchy equation checked exactly on " + scalar_domain_note());
    return v;
}

} // namespace

std::string_view to_string(Status s) {
    switch (s) {
    case Status::Holds: return "holds";
    case Status::Fails: return "fails";
    case Status::NotApplicable: return "not-applicable";
    }
    return "not-applicable";
}

std::vector<std::string> property_names() {
    return {"additivity",          "onc",            "anc",           "normalization",
            "strong-normalization", "non-negativity", "state-affinity"};
}

PropertyVerdict check_additivity(const Assignment &a, const CheckConfig &cfg) {
    if (a.domain() == Domain::QuadScalars) {
        return scalar_additivity(a, cfg);
    }
    auto v = run_trials(a, "additivity", cfg, usable_dims(a, cfg, 2), cfg.trials, cfg.tol,
                        [&](std::size_t d, Rng &rng) {
                            TrialSampler s(a, d, cfg.tags, rng);
                            const std::size_t n = uniform(rng, 2, std::min<std::size_t>(d, 16));
                            const Piece all = s.split_all(random_block_sizes(d, n, rng));
                            const Context ctx = TrialSampler::join({&all});
                            const auto tags = TrialSampler::join_tags({&all});

                            std::vector<std::size_t> idx(n);
                            std::iota(idx.begin(), idx.end(), 0);
                            std::shuffle(idx.begin(), idx.end(), rng);
                            idx.resize(uniform(rng, 2, n));
                            std::sort(idx.begin(), idx.end());

                            HermitianOperator sum = HermitianOperator::zero(d);
                            Measured parts;
                            parts.exact = QuadRational(0);
                            std::string subset;
                            for (auto i : idx) {
                                sum = sum + ctx[i];
                                parts = parts + eval(a, ctx[i], ctx, s.state(), tags);
                                subset += (subset.empty() ? "" : ",") + std::to_string(i);
                            }
                            const Measured whole = eval(a, sum, ctx, s.state(), tags);
                            Outcome o;
                            o.gap = gap(whole, parts);
                            o.description = "d=" + std::to_string(d) + ", " + std::to_string(n) +
                                            "-member context, summed members {" + subset + "}";
                            o.values = {{"mu(sum)", whole}, {"sum(mu)", parts}};
                            return std::optional<Outcome>(o);
                        });
    v.notes.push_back("countable additivity tested as finite additivity over contexts of at most 16 members");
    return v;
}

PropertyVerdict check_onc(const Assignment &a, const CheckConfig &cfg) {
    if (a.domain() == Domain::QuadScalars) {
        return not_applicable(a, "onc", cfg, scalar_domain_note());
    }
    auto v = run_trials(a, "onc", cfg, usable_dims(a, cfg, 2), cfg.trials, cfg.tol, [&](std::size_t d, Rng &rng) {
        TrialSampler s(a, d, cfg.tags, rng);
        const std::size_t r = uniform(rng, 1, d - 1);
        const Piece top = s.split_all({r, d - r});
        const Piece effect = sub_piece(top, 0);
        const std::size_t c = d - r;
        const QuadRational rest = top.tags.empty() ? QuadRational(0) : top.tags[1];
        const Matrix complement = top.block_basis(1);
        const Piece comp1 = s.split(complement, random_block_sizes(c, uniform(rng, 1, c), rng), rest);
        const Piece comp2 = s.split(complement, random_block_sizes(c, uniform(rng, 1, c), rng), rest);
        const Context c1 = TrialSampler::join({&effect, &comp1});
        const Context c2 = TrialSampler::join({&effect, &comp2});
        const Measured m1 = eval(a, effect.members[0], c1, s.state(), TrialSampler::join_tags({&effect, &comp1}));
        const Measured m2 = eval(a, effect.members[0], c2, s.state(), TrialSampler::join_tags({&effect, &comp2}));
        Outcome o;
        o.gap = gap(m1, m2);
        o.description = describe_sizes(d, c1, c2) + " sharing a rank-" + std::to_string(r) + " member";
        o.values = {{"mu(A|C1)", m1}, {"mu(A|C2)", m2}};
        return std::optional<Outcome>(o);
    });
    if (a.consumes().state) {
        v.notes.push_back("state held fixed; only the completion of the orthocomplement varies");
    }
    return v;
}

PropertyVerdict check_anc(const Assignment &a, const CheckConfig &cfg) {
    if (a.domain() == Domain::QuadScalars) {
        return not_applicable(a, "anc", cfg, scalar_domain_note());
    }
    return run_trials(a, "anc", cfg, usable_dims(a, cfg, 2), cfg.trials, cfg.tol, [&](std::size_t d, Rng &rng) {
        TrialSampler s(a, d, cfg.tags, rng);
        const Piece top = d == 2 ? s.split_all({2}) : s.split_all({2, d - 2});
        const QuadRational t_s = top.tags.empty() ? QuadRational(0) : top.tags[0];
        const Matrix span_s = top.block_basis(0);
        const Piece split1 = s.split(span_s, {1, 1}, t_s);
        const Piece split2 = s.split(span_s, {1, 1}, t_s);
        std::vector<const Piece *> p1{&split1};
        std::vector<const Piece *> p2{&split2};
        std::optional<Piece> comp1;
        std::optional<Piece> comp2;
        if (d > 2) {
            const std::size_t c = d - 2;
            const QuadRational rest = top.tags.empty() ? QuadRational(0) : top.tags[1];
            const Matrix complement = top.block_basis(1);
            // The coarsest completion against a finer one makes context sizes differ.
            comp1 = s.split(complement, {c}, rest);
            comp2 = s.split(complement, random_block_sizes(c, uniform(rng, std::min<std::size_t>(2, c), c), rng),
                            rest);
            p1.push_back(&*comp1);
            p2.push_back(&*comp2);
        }
        const Context c1 = TrialSampler::join(p1);
        const Context c2 = TrialSampler::join(p2);
        const auto tags1 = TrialSampler::join_tags(p1);
        const auto tags2 = TrialSampler::join_tags(p2);
        const HermitianOperator &proj = top.members[0];

        const Measured sum1 = eval(a, c1[0], c1, s.state(), tags1) + eval(a, c1[1], c1, s.state(), tags1);
        const Measured sum2 = eval(a, c2[0], c2, s.state(), tags2) + eval(a, c2[1], c2, s.state(), tags2);
        const Measured direct1 = eval(a, proj, c1, s.state(), tags1);
        const Measured direct2 = eval(a, proj, c2, s.state(), tags2);

        Outcome o;
        const Gap g12 = gap(sum1, sum2);
        const Gap g1 = gap(sum1, direct1);
        const Gap g2 = gap(sum2, direct2);
        o.gap = {std::max({g12.value, g1.value, g2.value}), g12.exact && g1.exact && g2.exact};
        o.description = describe_sizes(d, c1, c2) + ", two rank-one splittings of one rank-2 projector";
        o.values = {{"mu(A)+mu(B)", sum1}, {"mu(A')+mu(B')", sum2}, {"mu(P|C1)", direct1}, {"mu(P|C2)", direct2}};
        return std::optional<Outcome>(o);
    });
}

PropertyVerdict check_normalization(const Assignment &a, const CheckConfig &cfg) {
    constexpr double kNormTol = 1e-10;
    if (a.domain() == Domain::QuadScalars) {
        return not_applicable(a, "normalization", cfg, scalar_domain_note());
    }
    auto v = run_trials(a, "normalization", cfg, usable_dims(a, cfg, 1), 1, kNormTol, [&](std::size_t d, Rng &rng) {
        TrialSampler s(a, d, cfg.tags, rng);
        const Piece basis = s.split_all(ones(d));
        const Context ctx = TrialSampler::join({&basis});
        const Measured m = eval(a, HermitianOperator::identity(d), ctx, s.state(), TrialSampler::join_tags({&basis}));
        Outcome o;
        o.gap = gap(m, Measured{1.0, QuadRational(1)});
        o.description = "d=" + std::to_string(d) + ", identity in a rank-one basis context";
        o.values = {{"mu(I)", m}};
        return std::optional<Outcome>(o);
    });
    if (a.consumes().context || a.consumes().state) {
        v.notes.push_back("mu(I) evaluated as the full member sum of a random rank-one basis context");
    }
    return v;
}

PropertyVerdict check_strong_normalization(const Assignment &a, const CheckConfig &cfg) {
    if (a.domain() == Domain::QuadScalars) {
        return not_applicable(a, "strong-normalization", cfg, scalar_domain_note());
    }
    return run_trials(a, "strong-normalization", cfg, usable_dims(a, cfg, 2), cfg.trials, cfg.tol,
                      [&](std::size_t d, Rng &rng) {
                          TrialSampler s(a, d, cfg.tags, rng);
                          const std::size_t n = uniform(rng, 2, std::min<std::size_t>(d, 16));
                          const Piece all = s.split_all(random_block_sizes(d, n, rng));
                          const Context ctx = TrialSampler::join({&all});
                          const auto tags = TrialSampler::join_tags({&all});
                          Measured total{0.0, QuadRational(0)};
                          for (std::size_t i = 0; i < ctx.size(); ++i) {
                              total = total + eval(a, ctx[i], ctx, s.state(), tags);
                          }
                          Outcome o;
                          o.gap = gap(total, Measured{1.0, QuadRational(1)});
                          o.description = "d=" + std::to_string(d) + ", " + std::to_string(n) + "-member context";
                          o.values = {{"sum(mu)", total}};
                          return std::optional<Outcome>(o);
                      });
}

PropertyVerdict check_nonnegativity(const Assignment &a, const CheckConfig &cfg) {
    constexpr double kFloor = 1e-12;
    if (a.domain() == Domain::QuadScalars) {
        const std::size_t n = cfg.trials * std::max<std::size_t>(1, cfg.dims.size());
        std::size_t trial = 0;
        return run_trials(a, "non-negativity", cfg, {0}, n, kFloor, [&](std::size_t, Rng &rng) {
            const QuadRational x = trial++ == 0 ? QuadRational(1) : random_positive_quad(rng);
            const QuadRational fx = a.evaluate_scalar(x);
            Outcome o;
            o.gap = {fx.sign() < 0 ? -fx.to_double() : 0.0, true};
            o.description = "f at positive x=" + x.to_string();
            o.values = {{"f(x)", {fx.to_double(), fx}}};
            return std::optional<Outcome>(o);
        });
    }
    return run_trials(a, "non-negativity", cfg, usable_dims(a, cfg, 1), cfg.trials, kFloor,
                      [&](std::size_t d, Rng &rng) {
                          TrialSampler s(a, d, cfg.tags, rng);
                          const std::size_t n = uniform(rng, 1, std::min<std::size_t>(d, 16));
                          const Piece all = s.split_all(random_block_sizes(d, n, rng));
                          const Context ctx = TrialSampler::join({&all});
                          const auto tags = TrialSampler::join_tags({&all});
                          Outcome o;
                          o.gap = {0.0, true};
                          Measured lowest{0.0, std::nullopt};
                          bool first = true;
                          auto consider = [&](const Measured &m) {
                              if (first || m.real < lowest.real) {
                                  lowest = m;
                                  first = false;
                              }
                              o.gap.exact = o.gap.exact && m.exact.has_value();
                          };
                          HermitianOperator partial = HermitianOperator::zero(d);
                          for (std::size_t i = 0; i < ctx.size(); ++i) {
                              consider(eval(a, ctx[i], ctx, s.state(), tags));
                              if (i + 1 < ctx.size()) {
                                  partial = partial + ctx[i];
                                  consider(eval(a, partial, ctx, s.state(), tags));
                              }
                          }
                          o.gap.value = lowest.real < 0.0 ? -lowest.real : 0.0;
                          o.description = "d=" + std::to_string(d) + ", members and prefix sums of a " +
                                          std::to_string(n) + "-member context";
                          o.values = {{"min mu", lowest}};
                          return std::optional<Outcome>(o);
                      });
}

PropertyVerdict check_state_affinity(const Assignment &a, const CheckConfig &cfg) {
    if (!a.consumes().state) {
        return not_applicable(a, "state-affinity", cfg, "assignment does not consume a state");
    }
    return run_trials(a, "state-affinity", cfg, usable_dims(a, cfg, 1), cfg.trials, cfg.tol,
                      [&](std::size_t d, Rng &rng) {
                          TrialSampler s(a, d, cfg.tags, rng);
                          const std::size_t n = uniform(rng, 1, std::min<std::size_t>(d, 16));
                          const Piece all = s.split_all(random_block_sizes(d, n, rng));
                          const Context ctx = TrialSampler::join({&all});
                          const auto tags = TrialSampler::join_tags({&all});
                          const std::size_t k = uniform(rng, 1, n);
                          HermitianOperator op = HermitianOperator::zero(d);
                          for (std::size_t i = 0; i < k; ++i) {
                              op = op + ctx[i];
                          }

                          const std::size_t parts = uniform(rng, 2, 4);
                          std::vector<long long> w(parts);
                          long long wsum = 0;
                          for (auto &x : w) {
                              x = static_cast<long long>(uniform(rng, 1, 9));
                              wsum += x;
                          }
                          Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
                          double mixed_of_values = 0.0;
                          for (std::size_t j = 0; j < parts; ++j) {
                              const double p = static_cast<double>(w[j]) / static_cast<double>(wsum);
                              const State sj = a.preferred_state() == StateKind::Pure
                                                   ? State(random_pure_state(d, rng))
                                                   : State(random_density_matrix(d, rng));
                              rho += p * sj.rho();
                              mixed_of_values += p * eval(a, op, ctx, &sj, tags).real;
                          }
                          const State mixture{HermitianOperator(rho)};
                          const Measured of_mixture = eval(a, op, ctx, &mixture, tags);
                          const Measured averaged{mixed_of_values, std::nullopt};
                          Outcome o;
                          o.gap = gap(of_mixture, averaged);
                          o.description = "d=" + std::to_string(d) + ", " + std::to_string(parts) +
                                          "-component mixture, " + std::to_string(k) + " of " +
                                          std::to_string(n) + " members summed";
                          o.values = {{"mu(sum p rho)", of_mixture}, {"sum p mu(rho)", averaged}};
                          return std::optional<Outcome>(o);
                      });
}

PropertyVerdict check_property(const Assignment &a, std::string_view property, const CheckConfig &cfg) {
    if (property == "additivity") return check_additivity(a, cfg);
    if (property == "onc") return check_onc(a, cfg);
    if (property == "anc") return check_anc(a, cfg);
    if (property == "normalization") return check_normalization(a, cfg);
    if (property == "strong-normalization") return check_strong_normalization(a, cfg);
    if (property == "non-negativity") return check_nonnegativity(a, cfg);
    if (property == "state-affinity") return check_state_affinity(a, cfg);
    throw Error(ErrorKind::UnknownIdentifier, "unknown property '" + std::string(property) + "'");
}

Lemma1Record lemma1_crosscheck(const Assignment &a, const CheckConfig &cfg) {
    Lemma1Record rec;
    rec.assignment = std::string(a.name());
    auto run = [&](std::string_view prop) {
        CheckConfig c = cfg;
        c.seed = derive_seed(cfg.seed, "lemma1:" + std::string(prop));
        return check_property(a, prop, c);
    };
    const auto strong = run("strong-normalization");
    const auto additive = run("additivity");
    const auto normalized = run("normalization");
    for (const auto *v : {&strong, &additive, &normalized}) {
        if (v->status == Status::NotApplicable) {
            rec.skipped = true;
            rec.reason = v->property + " is not applicable" + (v->notes.empty() ? "" : ": " + v->notes.front());
            return rec;
        }
    }
    rec.strong_normalization = strong.holds();
    rec.additivity = additive.holds();
    rec.normalization = normalized.holds();
    rec.consistent = *rec.strong_normalization == (*rec.additivity && *rec.normalization);
    return rec;
}

FrameWeightResult frame_weight_check(const Assignment &a, std::size_t d,
                                     const std::vector<std::size_t> &subspace_dims, std::size_t trials,
                                     double tol, std::uint64_t seed, TagPolicy tags) {
    FrameWeightResult result;
    auto &v = result.verdict;
    v = make_verdict(a, "frame-weight", tol, seed);
    if (a.domain() != Domain::Operators || !a.defined_in_dim(d)) {
        v.status = Status::NotApplicable;
        v.notes.push_back("assignment is not defined on rank-one projectors in dimension " + std::to_string(d));
        return result;
    }
    if (trials == 0) {
        throw Error(ErrorKind::InvalidSpec, "frame weight check needs at least one trial");
    }
    Rng rng(seed);
    TrialSampler s(a, d, tags, rng);
    bool all_exact = true;
    std::size_t trial = 0;
    for (auto k : subspace_dims) {
        if (k < 1 || k > d) {
            throw Error(ErrorKind::InvalidDimension, "subspace dimension out of range");
        }
        const Piece top = k < d ? s.split_all({k, d - k}) : s.split_all({d});
        const QuadRational t_s = top.tags.empty() ? QuadRational(1) : top.tags[0];
        std::optional<Piece> rest;
        if (k < d) {
            rest = sub_piece(top, 1);
        }
        Measured first;
        for (std::size_t t = 0; t < trials; ++t, ++trial) {
            const Piece basis = s.split(top.block_basis(0), ones(k), t_s);
            std::vector<const Piece *> pieces{&basis};
            if (rest) {
                pieces.push_back(&*rest);
            }
            const Context ctx = TrialSampler::join(pieces);
            const auto ctx_tags = TrialSampler::join_tags(pieces);
            Measured weight{0.0, QuadRational(0)};
            for (std::size_t i = 0; i < k; ++i) {
                weight = weight + eval(a, ctx[i], ctx, s.state(), ctx_tags);
            }
            if (t == 0) {
                first = weight;
                result.weights.emplace_back(k, weight.real);
                continue;
            }
            const Gap g = gap(weight, first);
            all_exact = all_exact && g.exact;
            v.max_discrepancy = std::max(v.max_discrepancy, g.value);
            if (g.value > tol && !v.witness) {
                Outcome o{g,
                          "d=" + std::to_string(d) + ", weights of two bases of one " + std::to_string(k) +
                              "-dimensional subspace",
                          {{"first basis", first}, {"this basis", weight}}};
                v.witness = to_witness(trial, d, seed, o);
            }
        }
    }
    v.trials = trial;
    v.exact = all_exact;
    v.status = v.witness ? Status::Fails : Status::Holds;
    return result;
}

// --- Continuity probes --------------------------------------------------------

std::string_view to_string(ProbePath p) {
    switch (p) {
    case ProbePath::AmplitudeSweep: return "amplitude-sweep";
    case ProbePath::ScalingSweep: return "scaling-sweep";
    case ProbePath::FrameRotation: return "frame-rotation";
    }
    return "amplitude-sweep";
}

ProbePath parse_probe_path(std::string_view s) {
    if (s == "amplitude-sweep") return ProbePath::AmplitudeSweep;
    if (s == "scaling-sweep") return ProbePath::ScalingSweep;
    if (s == "frame-rotation") return ProbePath::FrameRotation;
    throw Error(ErrorKind::InvalidPath, "unknown probe path '" + std::string(s) + "'");
}

double ProbeResult::max_jump() const {
    double m = 0.0;
    for (const auto &j : jumps) {
        m = std::max(m, j.dvalue);
    }
    return m;
}

namespace {

void require_unit_interval(const QuadRational &x, ErrorKind kind) {
    if (x.sign() < 0 || (QuadRational(1) - x).sign() < 0) {
        throw Error(kind, "parameter " + x.to_string() + " lies outside [0, 1]");
    }
}

Value probe_eval(const Assignment &a, const EvalInput &in) {
    try {
        return a.evaluate(in);
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::NotApplicable) {
            throw Error(ErrorKind::InvalidPath, e.what());
        }
        throw;
    }
}

} // namespace

ProbeResult continuity_probe(const Assignment &a, ProbePath path, const std::vector<QuadRational> &grid,
                             double tol, std::uint64_t seed) {
    if (grid.size() < 2) {
        throw Error(ErrorKind::InvalidGrid, "a continuity probe needs at least two grid points");
    }
    const Consumes uses = a.consumes();
    const bool scalar = a.domain() == Domain::QuadScalars;
    if (scalar && path != ProbePath::ScalingSweep) {
        throw Error(ErrorKind::InvalidPath, std::string(a.name()) + " supports only the scaling sweep");
    }
    if (path == ProbePath::AmplitudeSweep && !uses.state && !uses.tags) {
        throw Error(ErrorKind::InvalidPath, std::string(a.name()) + " does not depend on amplitudes");
    }
    if (path == ProbePath::FrameRotation && uses.tags) {
        throw Error(ErrorKind::InvalidPath, "rotated frames carry no exact tags");
    }
    if (!scalar && !a.defined_in_dim(2)) {
        throw Error(ErrorKind::InvalidPath, std::string(a.name()) + " is not defined in dimension 2");
    }

    ProbeResult out;
    out.assignment = std::string(a.name());
    out.path = path;
    out.tolerance = tol;

    Rng rng(seed);
    const HermitianOperator identity = HermitianOperator::identity(2);
    const State fixed_state{random_pure_state(2, rng)};
    const HermitianOperator x1 = HermitianOperator::rank_one(Vector::Unit(2, 0));
    const HermitianOperator x2 = HermitianOperator::rank_one(Vector::Unit(2, 1));

    for (const auto &param : grid) {
        ProbePoint pt;
        pt.param = param;
        pt.param_real = param.to_double();
        Value v;
        switch (path) {
        case ProbePath::AmplitudeSweep: {
            require_unit_interval(param, ErrorKind::InvalidPath);
            const double t = pt.param_real;
            Vector psi(2);
            psi << std::sqrt(t), std::sqrt(1.0 - t);
            const State state{PureState::normalized(psi)};
            const Context ctx({x1, x2});
            const std::vector<ProbabilityTag> tags{ProbabilityTag::of(param),
                                                   ProbabilityTag::of(QuadRational(1) - param)};
            v = probe_eval(a, {x1, &ctx, &state, uses.tags ? std::span<const ProbabilityTag>(tags)
                                                            : std::span<const ProbabilityTag>()});
            break;
        }
        case ProbePath::ScalingSweep: {
            if (scalar) {
                const QuadRational fx = a.evaluate_scalar(param);
                v = {fx.to_double(), fx};
                break;
            }
            require_unit_interval(param, ErrorKind::InvalidScaling);
            // A = |x1><x1| against the equal superposition, whose exact weight is 1/2.
            Vector psi(2);
            psi << 1.0, 1.0;
            const State state{PureState::normalized(psi)};
            const HermitianOperator scaled = x1.scaled(pt.param_real);
            const Context ctx({scaled, identity - scaled});
            const QuadRational tag = Rational(1, 2) * param;
            const std::vector<ProbabilityTag> tags{ProbabilityTag::of(tag),
                                                   ProbabilityTag::of(QuadRational(1) - tag)};
            v = probe_eval(a, {scaled, &ctx, &state, uses.tags ? std::span<const ProbabilityTag>(tags)
                                                                : std::span<const ProbabilityTag>()});
            break;
        }
        case ProbePath::FrameRotation: {
            const double theta = pt.param_real;
            Vector u(2);
            u << std::cos(theta), std::sin(theta);
            Vector w(2);
            w << -std::sin(theta), std::cos(theta);
            const HermitianOperator p1 = HermitianOperator::rank_one(u);
            const Context ctx({p1, HermitianOperator::rank_one(w)});
            v = probe_eval(a, {p1, &ctx, &fixed_state, {}});
            break;
        }
        }
        pt.value = v.real.value();
        pt.exact = v.exact;
        out.series.push_back(std::move(pt));
    }

    std::stable_sort(out.series.begin(), out.series.end(),
                     [](const ProbePoint &x, const ProbePoint &y) { return x.param_real < y.param_real; });
    const double span = out.series.back().param_real - out.series.front().param_real;
    out.grid_step = span / static_cast<double>(out.series.size() - 1);
    for (std::size_t i = 0; i + 1 < out.series.size(); ++i) {
        const double dp = out.series[i + 1].param_real - out.series[i].param_real;
        const double dv = std::abs(out.series[i + 1].value - out.series[i].value);
        if (dv > tol && dp <= out.grid_step) {
            out.jumps.push_back({i, dp, dv});
        }
    }
    return out;
}

// --- Property matrix ------------------------------------------------------------

std::uint64_t cell_seed(std::uint64_t base, std::string_view assignment, std::string_view property) {
    return derive_seed(base, "check:" + std::string(assignment) + ":" + std::string(property));
}

PropertyMatrix build_property_matrix(const std::vector<std::string> &assignments,
                                     const std::vector<std::string> &properties, const CheckConfig &cfg,
                                     std::size_t jobs, const std::map<std::string, double> &tolerances) {
    const auto known = property_names();
    for (const auto &p : properties) {
        if (std::find(known.begin(), known.end(), p) == known.end()) {
            throw Error(ErrorKind::UnknownIdentifier, "unknown property '" + p + "'");
        }
    }
    for (const auto &name : assignments) {
        (void)make_assignment(name);
    }

    PropertyMatrix m;
    m.rows = assignments;
    m.columns = properties;
    m.cells.assign(assignments.size(), std::vector<PropertyVerdict>(properties.size()));
    m.wall_seconds.assign(assignments.size(), std::vector<double>(properties.size(), 0.0));
    const std::size_t n = assignments.size() * properties.size();
    parallel_for(n, jobs, [&](std::size_t cell) {
        const std::size_t r = cell / properties.size();
        const std::size_t c = cell % properties.size();
        const auto a = make_assignment(assignments[r]);
        CheckConfig local = cfg;
        local.seed = cell_seed(cfg.seed, assignments[r], properties[c]);
        if (auto it = tolerances.find(properties[c]); it != tolerances.end()) {
            local.tol = it->second;
        }
        const auto start = std::chrono::steady_clock::now();
        m.cells[r][c] = check_property(*a, properties[c], local);
        m.wall_seconds[r][c] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    return m;
}

} // namespace bornlab
