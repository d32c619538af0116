#include "bornlab/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bornlab/frequency.hpp"
#include "bornlab/gleason_fit.hpp"
#include "bornlab/harness.hpp"
#include "bornlab/parallel.hpp"
#include "bornlab/sampling.hpp"

#ifndef BORNLAB_VERSION
#define BORNLAB_VERSION "dev"
#endif

namespace bornlab {

using nlohmann::json;

std::string_view artifact_version() { return BORNLAB_VERSION; }

bool HarnessResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine &c) { return c.passed; });
}

std::uint64_t block_seed(std::uint64_t base, const Block &block) {
    return derive_seed(base, "harness:" + block.kind() + ":" + std::to_string(block.index()));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(Rng &rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

void check_at_most(HarnessResult &r, std::string name, double value, double bound, std::string detail = {}) {
    r.checks.push_back({std::move(name), value <= bound, value, bound, std::move(detail)});
}

void check_at_least(HarnessResult &r, std::string name, double value, double bound, std::string detail = {}) {
    r.checks.push_back({std::move(name), value >= bound, value, bound, std::move(detail)});
}

std::vector<std::size_t> as_sizes(const std::vector<long long> &v) {
    return {v.begin(), v.end()};
}

json quad_json(const QuadRational &q) { return {{"exact", q.to_string()}, {"value", q.to_double()}}; }

/// An effect, a state and (for tag consumers) the exact Born weight of the
/// effect, shared by the scaling probes.
struct ProbeSetup {
    HermitianOperator op;
    std::optional<State> state;
    std::optional<QuadRational> tag;
};

ProbeSetup probe_setup(const Assignment &a, Rng &rng) {
    if (a.consumes().tags || !a.defined_in_dim(3)) {
        Vector plus(2);
        plus << 1.0, 1.0;
        return {HermitianOperator::rank_one(Vector::Unit(2, 0)), State(PureState::normalized(plus)),
                QuadRational(Rational(1, 2))};
    }
    const Matrix u = haar_random_unitary(3, rng);
    const HermitianOperator p = HermitianOperator::projector_onto(u.leftCols(2));
    return {p.scaled(0.8), State(random_density_matrix(3, rng)), std::nullopt};
}

// --- Block runners ------------------------------------------------------------

void run_gleason(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto name = b.get<std::string>("assignment", "born");
    const auto a = make_assignment(name);
    const auto dims = b.has("dims") ? as_sizes(b.get<std::vector<long long>>("dims", {}))
                                    : std::vector<std::size_t>{static_cast<std::size_t>(b.get<long long>("d", 2))};
    const auto frames = static_cast<std::size_t>(b.get<long long>("frames", 20));
    const auto repeats = static_cast<std::size_t>(b.get<long long>("repeats", 1));
    const double threshold = b.get<double>("threshold", kDefaultRegularityThreshold);

    Series s{"fits", {"dim", "repeat", "residual_rms", "rho_error", "weight", "condition"}, {}};
    json fits = json::array();
    double min_residual = std::numeric_limits<double>::infinity();
    double max_residual = 0.0;
    double max_rho_error = 0.0;
    std::size_t regular = 0;
    for (auto d : dims) {
        for (std::size_t rep = 0; rep < repeats; ++rep) {
            const auto fit_seed = derive_seed(seed, "fit:" + std::to_string(d) + ":" + std::to_string(rep));
            Rng rng(fit_seed);
            const HermitianOperator rho = random_density_matrix(d, rng);
            const State state(rho);
            const FitResult fit = fit_density(*a, d, frames, derive_seed(fit_seed, 1), &state);
            const double rho_error = frobenius_distance(fit.rho_hat.matrix(), rho.matrix());
            const Regularity verdict = regularity_verdict(fit, threshold);
            regular += verdict == Regularity::Regular ? 1 : 0;
            min_residual = std::min(min_residual, fit.residual_rms);
            max_residual = std::max(max_residual, fit.residual_rms);
            max_rho_error = std::max(max_rho_error, rho_error);
            s.rows.push_back({static_cast<double>(d), static_cast<double>(rep), fit.residual_rms, rho_error,
                              fit.weight, fit.condition});
            if (rep == 0) {
                fits.push_back({{"dim", d},
                                {"residual_rms", fit.residual_rms},
                                {"condition", fit.condition},
                                {"sample_count", fit.sample_count},
                                {"weight", fit.weight},
                                {"regularity", to_string(verdict)},
                                {"rho_hat", to_json(fit.rho_hat)},
                                {"rho_hidden", to_json(rho)}});
            }
        }
    }
    const std::size_t total = dims.size() * repeats;
    r.details = {{"assignment", name},
                 {"frames", frames},
                 {"threshold", threshold},
                 {"fits", total},
                 {"regular", regular},
                 {"min_residual", min_residual},
                 {"max_residual", max_residual},
                 {"max_rho_error", max_rho_error},
                 {"first_fit_per_dim", fits}};
    if (b.has("regularity")) {
        const bool want_regular = b.get<std::string>("regularity", "") == "regular";
        const std::size_t agree = want_regular ? regular : total - regular;
        r.checks.push_back({"regularity", agree == total, static_cast<double>(agree), static_cast<double>(total),
                            "fits classified " + b.get<std::string>("regularity", "")});
    }
    if (b.has("min_residual")) {
        check_at_least(r, "min-residual", min_residual, b.get<double>("min_residual", 0.0));
    }
    if (b.has("max_residual")) {
        check_at_most(r, "max-residual", max_residual, b.get<double>("max_residual", 0.0));
    }
    if (b.has("max_rho_error")) {
        check_at_most(r, "rho-recovery", max_rho_error, b.get<double>("max_rho_error", 0.0),
                      "Frobenius distance to the hidden state");
    }
    r.series.push_back(std::move(s));
}

void run_envariance(const Block &b, std::uint64_t seed, HarnessResult &r) {
    std::vector<std::size_t> dims = as_sizes(b.get<std::vector<long long>>("dims", {2, 3, 4, 5, 6, 7, 8}));
    const auto swap_max = static_cast<std::size_t>(b.get<long long>("swap_max", 64));
    const bool unequal = b.get<bool>("unequal", true);

    Series s{"residuals", {"dim", "max_residual", "swaps"}, {}};
    double worst = 0.0;
    for (auto d : dims) {
        Rng rng(derive_seed(seed, d));
        const Matrix us = haar_random_unitary(d, rng);
        const Matrix ue = haar_random_unitary(d, rng);
        std::vector<SchmidtTerm> terms;
        for (std::size_t k = 0; k < d; ++k) {
            const auto col = static_cast<Eigen::Index>(k);
            terms.push_back({1.0 / std::sqrt(static_cast<double>(d)), us.col(col), ue.col(col)});
        }
        const BipartiteState psi = BipartiteState::from_schmidt(terms);
        double dim_worst = 0.0;
        std::size_t swaps = 0;
        std::vector<std::vector<std::size_t>> perms;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                std::vector<std::size_t> perm(d);
                std::iota(perm.begin(), perm.end(), std::size_t{0});
                std::swap(perm[i], perm[j]);
                perms.push_back(perm);
            }
        }
        std::vector<std::size_t> cycle(d);
        for (std::size_t k = 0; k < d; ++k) {
            cycle[k] = (k + 1) % d;
        }
        perms.push_back(cycle);
        for (const auto &perm : perms) {
            const Matrix p = permutation_matrix(perm);
            const Matrix u_s = us * p * us.adjoint();
            const Matrix u_e = ue * p * ue.adjoint();
            dim_worst = std::max(dim_worst, envariance_check(psi, u_s, u_e));
            ++swaps;
        }
        worst = std::max(worst, dim_worst);
        s.rows.push_back({static_cast<double>(d), dim_worst, static_cast<double>(swaps)});
    }
    check_at_most(r, "equal-amplitude-envariance", worst, 1e-12,
                  "every transposition and the cyclic shift, in random Schmidt bases");

    json unequal_json = nullptr;
    if (unequal) {
        const std::vector<SchmidtTerm> terms{{std::sqrt(0.7), Vector::Unit(2, 0), Vector::Unit(2, 0)},
                                             {std::sqrt(0.3), Vector::Unit(2, 1), Vector::Unit(2, 1)}};
        const Matrix swap = permutation_matrix({1, 0});
        const double residual = envariance_check(BipartiteState::from_schmidt(terms), swap, swap);
        const double expected = std::sqrt(2.0) * (std::sqrt(0.7) - std::sqrt(0.3));
        check_at_least(r, "unequal-amplitude-residual", residual, 0.4, "amplitudes (sqrt 0.7, sqrt 0.3)");
        check_at_most(r, "unequal-amplitude-formula", std::abs(residual - expected), 1e-12,
                      "against sqrt2 (sqrt 0.7 - sqrt 0.3)");
        unequal_json = {{"residual", residual}, {"expected", expected}};
    }

    Series ranks{"swap-derivation", {"n", "rank", "equations", "p"}, {}};
    std::size_t bad = 0;
    for (std::size_t n = 1; n <= swap_max; ++n) {
        const ConstraintSystem sys = swap_constraint_system(n);
        const ConstraintSolution sol = solve_constraints(sys);
        const auto probs = swap_derivation(n);
        const bool ok = sol.consistent && sol.unique && sol.rank == n &&
                        std::all_of(probs.begin(), probs.end(), [&](const Rational &p) { return p == Rational(1, n); });
        bad += ok ? 0 : 1;
        ranks.rows.push_back({static_cast<double>(n), static_cast<double>(sol.rank),
                              static_cast<double>(sys.equations.size()), to_double(probs.front())});
    }
    r.checks.push_back({"swap-derivation", bad == 0, static_cast<double>(bad), 0.0,
                        "p_i = 1/n exactly with rank n, for n = 1.." + std::to_string(swap_max)});
    r.details = {{"dims", dims}, {"max_residual", worst}, {"unequal", unequal_json}, {"swap_max", swap_max}};
    r.series.push_back(std::move(s));
    r.series.push_back(std::move(ranks));
}

void run_finegrain(const Block &b, std::uint64_t /*seed*/, HarnessResult &r) {
    const auto pairs =
        b.get<std::vector<std::pair<long long, long long>>>("pairs", {{1, 2}, {2, 3}, {617, 1000}});
    const auto exhaustive = static_cast<std::size_t>(b.get<long long>("exhaustive_max", 0));

    Series s{"pairs", {"m", "n", "first", "second", "chain"}, {}};
    json listed = json::array();
    std::size_t bad = 0;
    double amplitude = 0.0;
    for (const auto &[m, n] : pairs) {
        const auto mu = static_cast<std::size_t>(m);
        const auto nu = static_cast<std::size_t>(n);
        const FineGrainResult fg = fine_grain(mu, nu);
        const Rational chain = zurek_chain(mu, nu);
        const bool ok = fg.first == Rational(m, n) && fg.second == Rational(n - m, n) && chain == fg.first;
        bad += ok ? 0 : 1;
        amplitude = std::max(amplitude, fg.amplitude_residual);
        listed.push_back({{"m", m},
                          {"n", n},
                          {"first", to_string(fg.first)},
                          {"second", to_string(fg.second)},
                          {"chain", to_string(chain)}});
        s.rows.push_back({static_cast<double>(m), static_cast<double>(n), to_double(fg.first), to_double(fg.second),
                          to_double(chain)});
    }
    r.checks.push_back({"listed-pairs", bad == 0, static_cast<double>(bad), 0.0, "fine_grain = zurek_chain = m/n"});

    std::size_t sweep_bad = 0;
    std::size_t sweep_count = 0;
    for (std::size_t n = 1; n <= exhaustive; ++n) {
        for (std::size_t m = 1; m <= n; ++m) {
            const FineGrainResult fg = fine_grain(m, n);
            const Rational expected(m, n);
            amplitude = std::max(amplitude, fg.amplitude_residual);
            sweep_bad += (fg.first == expected && zurek_chain(m, n) == expected) ? 0 : 1;
            ++sweep_count;
        }
    }
    if (exhaustive > 0) {
        r.checks.push_back({"exhaustive", sweep_bad == 0, static_cast<double>(sweep_bad), 0.0,
                            std::to_string(sweep_count) + " pairs with 1 <= m <= n <= " + std::to_string(exhaustive)});
    }
    check_at_most(r, "branch-amplitudes", amplitude, 1e-12, "| |amplitude|^2 - 1/n | over all branches");
    r.details = {{"pairs", listed}, {"exhaustive_max", exhaustive}, {"exhaustive_count", sweep_count}};
    r.series.push_back(std::move(s));
}

Vector random_unit(std::size_t d, Rng &rng) { return random_pure_state(d, rng).vector(); }

void run_orthogonality(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto samples = static_cast<std::size_t>(b.get<long long>("samples", 100));
    Rng rng(seed);
    Series s{"quintuples", {"sample", "abs_overlap_x", "abs_one_minus_overlap_e", "witness", "gram_gap"}, {}};
    double orth_worst = 0.0;
    double equal_env_worst = 0.0;
    double formula_worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const std::size_t ds = pick(rng, 2, 4);
        const std::size_t de = pick(rng, 2, 4);
        const Matrix u = haar_random_unitary(ds, rng);
        const Vector e0 = random_unit(de, rng);
        const Vector e1 = random_unit(de, rng);
        const Vector e2 = random_unit(de, rng);
        orth_worst = std::max(orth_worst, orthogonality_witness(u.col(0), u.col(1), e0, e1, e2));

        const Vector x1 = random_unit(ds, rng);
        const Vector x2 = random_unit(ds, rng);
        equal_env_worst = std::max(equal_env_worst, orthogonality_witness(x1, x2, e0, e1, e1));

        // A unitary must preserve the Gram matrix of {x_i (x) E0}.
        const Complex before = tensor_product(x1, e0).dot(tensor_product(x2, e0));
        const Complex after = tensor_product(x1, e1).dot(tensor_product(x2, e2));
        const double gram = std::abs(before - after);
        const double w = orthogonality_witness(x1, x2, e0, e1, e2);
        formula_worst = std::max(formula_worst, std::abs(w - gram));
        s.rows.push_back({static_cast<double>(i), std::abs(x1.dot(x2)), std::abs(1.0 - e1.dot(e2)), w, gram});
    }
    Vector a(2);
    a << 1.0, 0.0;
    Vector c(2);
    c << 0.5, std::sqrt(0.75);
    const double half = orthogonality_witness(a, c, Vector::Unit(2, 0), Vector::Unit(2, 0), Vector::Unit(2, 1));
    check_at_most(r, "orthogonal-system-states", orth_worst, 1e-12);
    check_at_most(r, "indistinguishable-environment", equal_env_worst, 1e-12);
    check_at_most(r, "gram-matrix-agreement", formula_worst, 1e-12);
    check_at_most(r, "half-overlap-example", std::abs(half - 0.5), 1e-12, "<x1|x2> = 0.5 with orthogonal records");
    r.details = {{"samples", samples}, {"half_overlap_witness", half}};
    r.series.push_back(std::move(s));
}

void run_shift(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto names = b.get<std::vector<std::string>>("assignments", matrix_assignment_names());
    const auto samples = static_cast<std::size_t>(b.get<long long>("samples", 100));
    json per = json::object();
    double worst = 0.0;
    for (const auto &name : names) {
        const auto a = make_assignment(name);
        Rng rng(derive_seed(seed, name));
        Series s{"shift-" + name, {"sample", "dim", "k", "mu_sum", "gap", "expected_gap"}, {}};
        double local = 0.0;
        std::string skipped;
        for (std::size_t i = 0; i < samples && skipped.empty(); ++i) {
            const std::size_t d = a->defined_in_dim(3) ? pick(rng, 2, 5) : 2;
            const PureState psi = random_pure_state(d, rng);
            std::vector<double> eigenvalues(d);
            for (auto &e : eigenvalues) {
                e = uniform(rng, -5.0, 5.0);
            }
            const double k = uniform(rng, -10.0, 10.0);
            std::vector<ProbabilityTag> tags;
            if (a->consumes().tags) {
                auto w = random_exact_weights(QuadRational(1), d, rng);
                if (pick(rng, 0, 1) == 1) {
                    inject_sqrt2_pair(w, rng);
                }
                for (const auto &x : w) {
                    tags.push_back(ProbabilityTag::of(x));
                }
            }
            try {
                const ShiftResult res = shift_invariance_check(*a, psi, eigenvalues, k, nullptr, tags);
                const double expected = std::abs(k) * std::abs(res.mu_sum - 1.0);
                local = std::max(local, std::abs(res.gap - expected));
                s.rows.push_back({static_cast<double>(i), static_cast<double>(d), k, res.mu_sum, res.gap, expected});
            } catch (const Error &e) {
                if (e.kind() != ErrorKind::NotApplicable) {
                    throw;
                }
                skipped = e.what();
            }
        }
        worst = std::max(worst, local);
        per[name] = skipped.empty() ? json{{"max_identity_gap", local}} : json{{"not_applicable", skipped}};
        if (skipped.empty()) {
            r.series.push_back(std::move(s));
        }
    }
    check_at_most(r, "shift-identity", worst, 1e-12, "gap = |k| |sum mu - 1|");
    r.details = {{"samples", samples}, {"assignments", per}};
}

std::vector<Rational> random_rationals(std::size_t count, Rng &rng) {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto den = static_cast<long long>(pick(rng, 1, 64));
        const auto num = static_cast<long long>(pick(rng, 1, static_cast<std::size_t>(den)));
        out.emplace_back(num, den);
    }
    return out;
}

void run_busch(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto name = b.get<std::string>("assignment", "born");
    const auto a = make_assignment(name);
    const auto count = static_cast<std::size_t>(b.get<long long>("rationals", 50));
    const auto reals = b.get<std::vector<QuadRational>>("reals", {Rational(1, 2) * QuadRational::sqrt2()});
    const double tol = b.get<double>("tolerance", 1e-10);
    Rng rng(seed);
    const ProbeSetup setup = probe_setup(*a, rng);
    const auto rationals = random_rationals(count, rng);
    const BuschResult res = busch_homogeneity_probe(*a, setup.op, setup.state ? &*setup.state : nullptr, setup.tag,
                                                    rationals, reals, tol);
    check_at_most(r, "rational-homogeneity", res.rational_step, tol, "max |mu(qA) - q mu(A)|");
    check_at_most(r, "limit-gap", res.limit_gap, tol, "|mu(rA) - mu(qA)| at twelve-digit truncations q of r");
    json real_list = json::array();
    for (const auto &x : reals) {
        real_list.push_back(quad_json(x));
    }
    r.details = {{"assignment", name},
                 {"rationals", count},
                 {"reals", real_list},
                 {"rational_step", res.rational_step},
                 {"limit_gap", res.limit_gap}};
    Series s{"homogeneity", {"q", "mu_qA"}, {}};
    for (const auto &[q, v] : res.series) {
        s.rows.push_back({q, v});
    }
    r.series.push_back(std::move(s));
}

void run_dyadic(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto names = b.get<std::vector<std::string>>("assignments", {"born", "trace-squared"});
    const auto m = static_cast<std::size_t>(b.get<long long>("m", 20));
    json per = json::object();
    for (const auto &name : names) {
        const auto a = make_assignment(name);
        Rng rng(derive_seed(seed, name));
        const ProbeSetup setup = probe_setup(*a, rng);
        const DyadicResult res = dyadic_tail_check(*a, setup.op, m, setup.state ? &*setup.state : nullptr, setup.tag);
        json entry{{"error", res.error}};
        if (name == "born") {
            check_at_most(r, "born-tail", res.error, 1e-10, "linear assignments reproduce mu(A) exactly");
        } else if (name == "trace-squared") {
            const double t = setup.op.trace() / static_cast<double>(setup.op.dim());
            double tail = 0.0;
            double quarter = 1.0;
            for (std::size_t i = 1; i <= m; ++i) {
                quarter *= 0.25;
                tail += t * t * quarter;
            }
            const double expected = std::abs(t * t - tail - t * t * std::ldexp(1.0, -static_cast<int>(m)));
            check_at_least(r, "trace-squared-tail-nonzero", res.error, 1e-10, "the geometric decomposition fails");
            check_at_most(r, "trace-squared-closed-form", std::abs(res.error - expected), 1e-10,
                          "|t^2 - sum t^2/4^i - t^2/2^M| with t = Tr A / d");
            entry["closed_form"] = expected;
        }
        per[name] = entry;
        Series s{"partial-sums-" + name, {"i", "partial_sum"}, {}};
        for (const auto &[i, v] : res.partial_sums) {
            s.rows.push_back({static_cast<double>(i), v});
        }
        r.series.push_back(std::move(s));
    }
    r.details = {{"m", m}, {"assignments", per}};
}

void run_frame_weight(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto name = b.get<std::string>("assignment", "born");
    const auto a = make_assignment(name);
    const auto d = static_cast<std::size_t>(b.get<long long>("d", 3));
    std::vector<long long> fallback;
    for (std::size_t k = 1; k < d; ++k) {
        fallback.push_back(static_cast<long long>(k));
    }
    const auto subspaces = as_sizes(b.get<std::vector<long long>>("subspaces", fallback));
    const auto trials = static_cast<std::size_t>(b.get<long long>("trials", 20));
    const double tol = b.get<double>("tolerance", 1e-9);
    const FrameWeightResult res = frame_weight_check(*a, d, subspaces, trials, tol, seed);
    r.checks.push_back({"frame-weight", res.verdict.holds(), res.verdict.max_discrepancy, tol,
                        "summed values over random bases of each subspace agree"});
    r.details = {{"assignment", name}, {"verdict", to_json(res.verdict)}};
    Series s{"weights", {"subspace_dim", "weight"}, {}};
    for (const auto &[k, w] : res.weights) {
        s.rows.push_back({static_cast<double>(k), w});
    }
    r.series.push_back(std::move(s));
}

json series_summary(const ConvergenceSeries &c) {
    return {{"slope", c.slope ? json(*c.slope) : json(nullptr)},
            {"prefactor", c.prefactor ? json(*c.prefactor) : json(nullptr)},
            {"exact_convergence", c.exact_convergence}};
}

void run_hartle(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const double p = b.get<double>("p", 0.5);
    const auto grid = as_sizes(b.get<std::vector<long long>>("grid", {100, 1000, 10000, 100000}));
    const double slope_tol = b.get<double>("slope_tolerance", 0.02);
    const auto states = static_cast<std::size_t>(b.get<long long>("bruteforce_states", 0));
    const auto max_n = static_cast<std::size_t>(b.get<long long>("bruteforce_max_n", 12));

    const ConvergenceSeries series = hartle_convergence_study({{p, 1.0 - p}, 0, 1}, grid);
    Series s{"deviation", {"N", "deviation", "closed_form"}, {}};
    double closed_gap = 0.0;
    for (const auto &[n, v] : series.points) {
        const double closed = frequency_deviation_closed_form(p, n);
        closed_gap = std::max(closed_gap, std::abs(v - closed));
        s.rows.push_back({static_cast<double>(n), v, closed});
    }
    check_at_most(r, "closed-form", closed_gap, 1e-12, "sqrt(p (1 - p) / N)");
    if (series.exact_convergence) {
        r.checks.push_back({"slope", true, 0.0, slope_tol, "exact convergence, no slope"});
    } else if (series.slope) {
        check_at_most(r, "slope", std::abs(*series.slope + 0.5), slope_tol, "log-log slope against -1/2");
    } else {
        r.checks.push_back({"slope", false, 0.0, slope_tol, "no slope could be fitted"});
    }
    r.series.push_back(std::move(s));

    json brute = nullptr;
    if (states > 0) {
        Series bf{"bruteforce", {"dim", "N", "state", "bruteforce", "binomial"}, {}};
        double worst = 0.0;
        for (std::size_t d : {2, 3}) {
            Rng rng(derive_seed(seed, d));
            for (std::size_t j = 0; j < states; ++j) {
                const PureState psi = random_pure_state(d, rng);
                const std::size_t k = pick(rng, 0, d - 1);
                const double pk = std::norm(psi.vector()(static_cast<Eigen::Index>(k)));
                std::vector<double> probs(d);
                for (std::size_t i = 0; i < d; ++i) {
                    probs[i] = std::norm(psi.vector()(static_cast<Eigen::Index>(i)));
                }
                for (std::size_t n = 1; n <= max_n; ++n) {
                    const double direct = frequency_apply_bruteforce(psi, k, n);
                    const double reduced = std::sqrt(binomial_frequency_moments(pk, n).deviation);
                    worst = std::max(worst, std::abs(direct - reduced));
                    if (j == 0) {
                        bf.rows.push_back({static_cast<double>(d), static_cast<double>(n), 0.0, direct, reduced});
                    }
                }
            }
        }
        check_at_most(r, "bruteforce-agreement", worst, 1e-12, "explicit d^N expansion against the binomial sum");
        brute = {{"states_per_dim", states}, {"max_n", max_n}, {"max_gap", worst}};
        r.series.push_back(std::move(bf));
    }
    r.details = {{"p", p}, {"summary", series_summary(series)}, {"bruteforce", brute}};
}

void add_mixture(HarnessResult &r, const std::string &tag, const MixtureGap &gap, double limit_tol, json &list) {
    const double product_last = gap.product_of_mixture.points.back().second;
    const double mixture_last = gap.mixture_of_products.points.back().second;
    double expectation_gap = 0.0;
    for (const auto &[x, y] : gap.expectations) {
        expectation_gap = std::max(expectation_gap, std::abs(x - y));
    }
    const auto n_last = std::to_string(gap.product_of_mixture.points.back().first);
    check_at_most(r, tag + ":product-limit", product_last, limit_tol, "Var under rho^(x)N at N = " + n_last);
    check_at_most(r, tag + ":mixture-limit", std::abs(mixture_last - gap.q_variance), limit_tol,
                  "Var under the mixture of products against Var_j(q_j)");
    check_at_most(r, tag + ":expectations", expectation_gap, 1e-12, "E[f] agrees under both constructions");
    list.push_back({{"label", tag},
                    {"q", gap.q},
                    {"q_mean", gap.q_mean},
                    {"q_variance", gap.q_variance},
                    {"product_of_mixture", series_summary(gap.product_of_mixture)},
                    {"mixture_of_products", series_summary(gap.mixture_of_products)},
                    {"expectation_gap", expectation_gap}});
    Series s{tag, {"N", "product_of_mixture", "mixture_of_products"}, {}};
    for (std::size_t i = 0; i < gap.product_of_mixture.points.size(); ++i) {
        s.rows.push_back({static_cast<double>(gap.product_of_mixture.points[i].first),
                          gap.product_of_mixture.points[i].second, gap.mixture_of_products.points[i].second});
    }
    r.series.push_back(std::move(s));
}

void run_mixture(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto grid = as_sizes(b.get<std::vector<long long>>("grid", {10, 100, 1000, 10000, 100000}));
    const auto weights = b.get<std::vector<double>>("weights", {0.5, 0.5});
    const auto q = b.get<std::vector<double>>("q", {1.0, 0.0});
    const auto random = static_cast<std::size_t>(b.get<long long>("random", 0));
    const double limit_tol = b.get<double>("limit_tolerance", 1e-3);
    json list = json::array();
    add_mixture(r, "given", mixed_variance_gap(weights, q, grid), limit_tol, list);
    Rng rng(seed);
    for (std::size_t i = 0; i < random; ++i) {
        const std::size_t parts = pick(rng, 2, 4);
        const std::size_t d = pick(rng, 2, 3);
        std::vector<double> w(parts);
        double total = 0.0;
        for (auto &x : w) {
            x = uniform(rng, 0.05, 1.0);
            total += x;
        }
        std::vector<MixtureComponent> mixture;
        for (std::size_t j = 0; j < parts; ++j) {
            mixture.push_back({w[j] / total, random_pure_state(d, rng)});
        }
        add_mixture(r, "random-" + std::to_string(i), mixed_variance_gap(mixture, 0, grid), limit_tol, list);
    }
    r.details = {{"mixtures", list}};
}

void run_continuity(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto name = b.require<std::string>("assignment");
    std::unique_ptr<Assignment> a;
    if (name == "two-slope" && (b.has("c1") || b.has("c2"))) {
        a = make_two_slope(b.get<QuadRational>("c1", QuadRational(1)).rational_part(),
                           b.get<QuadRational>("c2", QuadRational(10000)).rational_part());
    } else {
        a = make_assignment(name);
    }
    const ProbePath path = parse_probe_path(b.require<std::string>("path"));
    const auto grid = b.require<std::vector<QuadRational>>("grid");
    const double tol = b.get<double>("tolerance", 1e-9);
    const ProbeResult res = continuity_probe(*a, path, grid, tol, seed);
    if (b.has("min_jump")) {
        check_at_least(r, "jump-found", res.max_jump(), b.get<double>("min_jump", 0.0), "largest adjacent jump");
    }
    if (b.has("max_jump")) {
        check_at_most(r, "no-jump", res.max_jump(), b.get<double>("max_jump", 0.0), "largest adjacent jump");
    }
    json jumps = json::array();
    for (const auto &j : res.jumps) {
        jumps.push_back({{"left", quad_json(res.series[j.left].param)},
                         {"right", quad_json(res.series[j.left + 1].param)},
                         {"dparam", j.dparam},
                         {"dvalue", j.dvalue}});
    }
    r.details = {{"assignment", name},
                 {"path", to_string(path)},
                 {"grid_step", res.grid_step},
                 {"max_jump", res.max_jump()},
                 {"jumps", jumps}};
    Series s{"probe", {"param", "value"}, {}};
    for (const auto &pt : res.series) {
        s.rows.push_back({pt.param_real, pt.value});
    }
    r.series.push_back(std::move(s));
}

QuadRational random_quad(Rng &rng) {
    auto rat = [&] {
        const auto num = static_cast<long long>(pick(rng, 0, 2000000)) - 1000000;
        const auto den = static_cast<long long>(pick(rng, 1, 1000000));
        return Rational(num, den);
    };
    const Rational x = rat();
    return {x, rat()};
}

void run_pathology(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const Rational c1 = b.get<QuadRational>("c1", QuadRational(1)).rational_part();
    const Rational c2 = b.get<QuadRational>("c2", QuadRational(10000)).rational_part();
    const auto pairs = static_cast<std::size_t>(b.get<long long>("pairs", 10000));
    const double window = b.get<double>("window", 1e-6);
    const double min_jump = b.get<double>("min_jump", 1.0);
    const auto f = make_two_slope(c1, c2);

    Rng rng(seed);
    std::size_t cauchy_bad = 0;
    std::size_t scaling_bad = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        const QuadRational x = random_quad(rng);
        const QuadRational y = random_quad(rng);
        cauchy_bad += f->evaluate_scalar(x + y) == f->evaluate_scalar(x) + f->evaluate_scalar(y) ? 0 : 1;
        const Rational q(static_cast<long long>(pick(rng, 0, 200)) - 100, static_cast<long long>(pick(rng, 1, 100)));
        scaling_bad += f->evaluate_scalar(q * x) == q * f->evaluate_scalar(x) ? 0 : 1;
    }
    r.checks.push_back({"cauchy", cauchy_bad == 0, static_cast<double>(cauchy_bad), 0.0,
                        "f(x + y) = f(x) + f(y) exactly on " + std::to_string(pairs) + " pairs"});
    r.checks.push_back({"rational-homogeneity", scaling_bad == 0, static_cast<double>(scaling_bad), 0.0,
                        "f(q x) = q f(x) exactly"});

    // Powers of sqrt2 - 1 are tiny reals with large coordinates over {1, sqrt2}.
    const QuadRational unit = QuadRational(Rational(-1), Rational(1));
    QuadRational y(1);
    std::size_t power = 0;
    while (y.to_double() > window && power < 200) {
        y = y * unit;
        ++power;
    }
    const ProbeResult probe = continuity_probe(*f, ProbePath::ScalingSweep, {QuadRational(0), y}, 0.0, seed);
    check_at_most(r, "witness-distance", y.to_double(), window, "(sqrt2 - 1)^" + std::to_string(power));
    check_at_least(r, "witness-jump", probe.max_jump(), min_jump, "|f(y) - f(0)| for the probed pair");
    r.details = {{"c1", to_string(c1)},
                 {"c2", to_string(c2)},
                 {"pairs", pairs},
                 {"witness", {{"x", quad_json(QuadRational(0))},
                              {"y", quad_json(y)},
                              {"f_y", quad_json(f->evaluate_scalar(y))},
                              {"jump", probe.max_jump()}}}};
    Series s{"witness", {"x", "f"}, {}};
    for (const auto &pt : probe.series) {
        s.rows.push_back({pt.param_real, pt.value});
    }
    r.series.push_back(std::move(s));
}

void run_rational_sector(const Block &b, std::uint64_t seed, HarnessResult &r) {
    const auto dims = as_sizes(b.get<std::vector<long long>>("dims", {2, 3, 4, 5}));
    const auto samples = static_cast<std::size_t>(b.get<long long>("samples", 50));
    const auto patch = make_assignment("zurek-patch");
    Rng rng(seed);
    std::size_t exact_bad = 0;
    double float_gap = 0.0;
    std::size_t evaluations = 0;
    Series s{"values", {"dim", "sample", "born", "patch"}, {}};
    for (auto d : dims) {
        for (std::size_t i = 0; i < samples; ++i) {
            const auto weights = random_exact_weights(QuadRational(1), d, rng);
            const Matrix u = haar_random_unitary(d, rng);
            Vector psi = Vector::Zero(static_cast<Eigen::Index>(d));
            std::vector<HermitianOperator> members;
            std::vector<ProbabilityTag> tags;
            for (std::size_t k = 0; k < d; ++k) {
                const auto col = static_cast<Eigen::Index>(k);
                const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                psi += std::sqrt(weights[k].to_double()) * std::polar(1.0, phase) * u.col(col);
                members.push_back(HermitianOperator::rank_one(u.col(col)));
                tags.push_back(ProbabilityTag::of(weights[k]));
            }
            const Context ctx(members);
            const State state{PureState::normalized(psi)};
            // Random nonempty subset of the basis, summed.
            std::vector<std::size_t> subset;
            while (subset.empty()) {
                for (std::size_t k = 0; k < d; ++k) {
                    if (pick(rng, 0, 1) == 1) {
                        subset.push_back(k);
                    }
                }
            }
            HermitianOperator op = members[subset.front()];
            QuadRational born_exact = weights[subset.front()];
            for (std::size_t j = 1; j < subset.size(); ++j) {
                op = op + members[subset[j]];
                born_exact += weights[subset[j]];
            }
            const Value v = patch->evaluate({op, &ctx, &state, tags});
            const double born = born_eval(state, op);
            exact_bad += (v.exact && *v.exact == born_exact) ? 0 : 1;
            float_gap = std::max(float_gap, std::abs(v.real.finite() - born));
            ++evaluations;
            s.rows.push_back({static_cast<double>(d), static_cast<double>(i), born, v.real.finite()});
        }
    }
    r.checks.push_back({"exact-agreement", exact_bad == 0, static_cast<double>(exact_bad), 0.0,
                        "patch value equals the exact Born weight on rational tags"});
    check_at_most(r, "float-agreement", float_gap, 1e-12, "patch value against Tr(rho A)");
    r.details = {{"evaluations", evaluations}, {"dims", dims}};
    r.series.push_back(std::move(s));
}

using Runner = void (*)(const Block &, std::uint64_t, HarnessResult &);

const std::map<std::string, Runner> &runners() {
    static const std::map<std::string, Runner> table = {
        {"busch", run_busch},
        {"continuity", run_continuity},
        {"dyadic", run_dyadic},
        {"envariance", run_envariance},
        {"finegrain", run_finegrain},
        {"frame-weight", run_frame_weight},
        {"gleason", run_gleason},
        {"hartle", run_hartle},
        {"mixture", run_mixture},
        {"orthogonality", run_orthogonality},
        {"pathology", run_pathology},
        {"rational-sector", run_rational_sector},
        {"shift", run_shift},
    };
    return table;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string mismatch_line(const Expectation &e, Status actual) {
    return e.assignment + " " + e.property + ": expected " + std::string(to_string(e.status)) + ", got " +
           std::string(to_string(actual)) + " (line " + std::to_string(e.line) + ")";
}

} // namespace

HarnessResult run_block(const Block &block, std::uint64_t seed) {
    auto it = runners().find(block.kind());
    if (it == runners().end()) {
        throw Error(ErrorKind::UnknownIdentifier, "unknown block kind '" + block.kind() + "'");
    }
    HarnessResult r;
    r.kind = block.kind();
    r.label = block.label();
    r.line = block.line();
    r.seed = seed;
    if (block.has("expect")) {
        r.expect_pass = block.get<std::string>("expect", "pass") == "pass";
    }
    const auto start = Clock::now();
    try {
        it->second(block, seed, r);
    } catch (const Error &e) {
        throw Error(ErrorKind::InvalidSpec,
                    "line " + std::to_string(block.line()) + ": [" + block.kind() + "] " + e.what());
    }
    r.wall_seconds = seconds_since(start);
    return r;
}

Report run_scenario(const ScenarioSpec &spec, std::size_t jobs, bool expect_strict) {
    const auto start = Clock::now();
    Report report;
    report.spec = spec;
    const CheckConfig cfg = spec.check_config();
    report.matrix = build_property_matrix(spec.assignments, spec.properties, cfg, jobs, spec.property_tolerances);

    if (spec.lemma1) {
        report.lemma1.resize(spec.assignments.size());
        report.lemma1_seconds.resize(spec.assignments.size());
        parallel_for(spec.assignments.size(), jobs, [&](std::size_t i) {
            const auto t0 = Clock::now();
            const auto a = make_assignment(spec.assignments[i]);
            report.lemma1[i] = lemma1_crosscheck(*a, cfg);
            report.lemma1_seconds[i] = seconds_since(t0);
        });
        for (const auto &rec : report.lemma1) {
            if (!rec.skipped && !rec.consistent) {
                report.mismatches.push_back(rec.assignment + ": strong normalization disagrees with additivity and normalization");
            }
        }
    }

    report.harnesses.resize(spec.blocks.size());
    parallel_for(spec.blocks.size(), jobs, [&](std::size_t i) {
        report.harnesses[i] = run_block(spec.blocks[i], block_seed(spec.seed, spec.blocks[i]));
    });

    std::map<std::pair<std::string, std::string>, const Expectation *> explicit_cells;
    for (const auto &e : spec.expectations) {
        explicit_cells[{e.assignment, e.property}] = &e;
    }
    for (std::size_t r = 0; r < report.matrix.rows.size(); ++r) {
        for (std::size_t c = 0; c < report.matrix.columns.size(); ++c) {
            const auto &cell = report.matrix.cells[r][c];
            auto it = explicit_cells.find({cell.assignment, cell.property});
            if (it == explicit_cells.end() && !expect_strict) {
                continue;
            }
            Expectation e = it != explicit_cells.end()
                                ? *it->second
                                : Expectation{cell.assignment, cell.property, Status::Holds, 0};
            const bool matched = e.status == cell.status;
            if (!matched) {
                report.mismatches.push_back(mismatch_line(e, cell.status));
            }
            report.expectations.push_back({e, cell.status, matched});
        }
    }
    for (const auto &h : report.harnesses) {
        const bool wanted = h.expect_pass.value_or(true);
        if ((h.expect_pass || expect_strict) && wanted != h.passed()) {
            report.mismatches.push_back(h.label + ": expected " + (wanted ? "pass" : "fail") + ", got " +
                                        (h.passed() ? "pass" : "fail") + " (line " + std::to_string(h.line) + ")");
        }
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

json to_json(const HermitianOperator &op) {
    json re = json::array();
    json im = json::array();
    for (Eigen::Index i = 0; i < op.matrix().rows(); ++i) {
        json rr = json::array();
        json ii = json::array();
        for (Eigen::Index j = 0; j < op.matrix().cols(); ++j) {
            rr.push_back(op.matrix()(i, j).real());
            ii.push_back(op.matrix()(i, j).imag());
        }
        re.push_back(rr);
        im.push_back(ii);
    }
    return {{"real", re}, {"imag", im}};
}

json to_json(const PropertyVerdict &v) {
    json out{{"assignment", v.assignment},
             {"property", v.property},
             {"status", to_string(v.status)},
             {"tolerance", v.tolerance},
             {"trials", v.trials},
             {"seed", v.seed},
             {"exact", v.exact},
             {"max_discrepancy", v.max_discrepancy},
             {"notes", v.notes}};
    if (v.witness) {
        const Witness &w = *v.witness;
        json values = json::object();
        for (const auto &[k, x] : w.values) {
            values[k] = x;
        }
        json exact = json::object();
        for (const auto &[k, x] : w.exact_values) {
            exact[k] = x;
        }
        out["witness"] = {{"trial", w.trial},
                          {"dim", w.dim},
                          {"trial_seed", w.trial_seed},
                          {"description", w.description},
                          {"values", values},
                          {"exact_values", exact},
                          {"discrepancy", w.discrepancy}};
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

namespace {

json field_json(const FieldValue &v) {
    return std::visit(
        [](const auto &x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, QuadRational>) {
                return x.to_string();
            } else if constexpr (std::is_same_v<T, std::vector<QuadRational>>) {
                json arr = json::array();
                for (const auto &q : x) {
                    arr.push_back(q.to_string());
                }
                return arr;
            } else if constexpr (std::is_same_v<T, std::vector<std::pair<long long, long long>>>) {
                json arr = json::array();
                for (const auto &[m, n] : x) {
                    arr.push_back({m, n});
                }
                return arr;
            } else {
                return x;
            }
        },
        v);
}

json scenario_json(const ScenarioSpec &spec) {
    json blocks = json::array();
    for (const auto &b : spec.blocks) {
        json fields = json::object();
        for (const auto &[k, f] : b.fields()) {
            fields[k] = field_json(f.value);
        }
        blocks.push_back({{"kind", b.kind()}, {"label", b.label()}, {"line", b.line()}, {"fields", fields}});
    }
    json expectations = json::array();
    for (const auto &e : spec.expectations) {
        expectations.push_back(
            {{"assignment", e.assignment}, {"property", e.property}, {"status", to_string(e.status)}, {"line", e.line}});
    }
    return {{"name", spec.name},
            {"description", spec.description},
            {"seed", spec.seed},
            {"dims", spec.dims},
            {"assignments", spec.assignments},
            {"properties", spec.properties},
            {"trials", spec.trials},
            {"tolerance", spec.tolerance},
            {"property_tolerances", spec.property_tolerances},
            {"tags", to_string(spec.tags)},
            {"lemma1", spec.lemma1},
            {"expectations", expectations},
            {"blocks", blocks}};
}

std::string series_file(const HarnessResult &h, const Series &s) { return h.label + "-" + s.name + ".csv"; }

} // namespace

json report_json(const Report &report, bool with_timings) {
    json cells = json::array();
    for (const auto &row : report.matrix.cells) {
        for (const auto &cell : row) {
            cells.push_back(to_json(cell));
        }
    }
    json lemma = json::array();
    for (const auto &rec : report.lemma1) {
        auto opt = [](const std::optional<bool> &b) { return b ? json(*b) : json(nullptr); };
        lemma.push_back({{"assignment", rec.assignment},
                         {"strong_normalization", opt(rec.strong_normalization)},
                         {"additivity", opt(rec.additivity)},
                         {"normalization", opt(rec.normalization)},
                         {"skipped", rec.skipped},
                         {"reason", rec.reason},
                         {"consistent", rec.consistent}});
    }
    json harnesses = json::array();
    for (const auto &h : report.harnesses) {
        json checks = json::array();
        for (const auto &c : h.checks) {
            checks.push_back(
                {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"bound", c.bound}, {"detail", c.detail}});
        }
        json files = json::array();
        for (const auto &s : h.series) {
            files.push_back(series_file(h, s));
        }
        harnesses.push_back({{"kind", h.kind},
                             {"label", h.label},
                             {"line", h.line},
                             {"seed", h.seed},
                             {"passed", h.passed()},
                             {"expect", h.expect_pass ? json(*h.expect_pass ? "pass" : "fail") : json(nullptr)},
                             {"checks", checks},
                             {"details", h.details},
                             {"series", files}});
    }
    json expectations = json::array();
    for (const auto &o : report.expectations) {
        expectations.push_back({{"assignment", o.expectation.assignment},
                                {"property", o.expectation.property},
                                {"expected", to_string(o.expectation.status)},
                                {"actual", to_string(o.actual)},
                                {"line", o.expectation.line},
                                {"matched", o.matched}});
    }
    json out{{"schema_version", kReportSchemaVersion},
             {"artifact_version", artifact_version()},
             {"seed", report.spec.seed},
             {"scenario", scenario_json(report.spec)},
             {"property_matrix",
              {{"rows", report.matrix.rows}, {"columns", report.matrix.columns}, {"cells", cells}}},
             {"lemma1", lemma},
             {"harnesses", harnesses},
             {"expectations", expectations},
             {"mismatches", report.mismatches}};
    if (with_timings) {
        json cell_times = json::object();
        for (std::size_t r = 0; r < report.matrix.rows.size(); ++r) {
            for (std::size_t c = 0; c < report.matrix.columns.size(); ++c) {
                cell_times[report.matrix.rows[r] + "/" + report.matrix.columns[c]] = report.matrix.wall_seconds[r][c];
            }
        }
        json lemma_times = json::object();
        for (std::size_t i = 0; i < report.lemma1.size(); ++i) {
            lemma_times[report.lemma1[i].assignment] = report.lemma1_seconds[i];
        }
        json harness_times = json::object();
        for (const auto &h : report.harnesses) {
            harness_times[h.label] = h.wall_seconds;
        }
        out["timings"] = {{"total_seconds", report.wall_seconds},
                          {"cells", cell_times},
                          {"lemma1", lemma_times},
                          {"harnesses", harness_times}};
    }
    return out;
}

std::string to_csv(const Series &series) {
    std::ostringstream out;
    for (std::size_t i = 0; i < series.columns.size(); ++i) {
        out << (i ? "," : "") << series.columns[i];
    }
    out << '\n';
    for (const auto &row : series.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<std::filesystem::path> write_report(const Report &report, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto write = [&](const std::string &name, const std::string &text) {
        const auto path = dir / name;
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) {
            throw Error(ErrorKind::InvalidSpec, "cannot write '" + path.string() + "'");
        }
        written.push_back(path);
    };
    write("report.json", report_json(report).dump(2) + "\n");

    std::ostringstream matrix;
    matrix << "assignment,property,status,max_discrepancy,tolerance,trials\n";
    for (const auto &row : report.matrix.cells) {
        for (const auto &cell : row) {
            matrix << cell.assignment << ',' << cell.property << ',' << to_string(cell.status) << ','
                   << format_double(cell.max_discrepancy) << ',' << format_double(cell.tolerance) << ','
                   << cell.trials << '\n';
        }
    }
    write("property-matrix.csv", matrix.str());
    for (const auto &h : report.harnesses) {
        for (const auto &s : h.series) {
            write(series_file(h, s), to_csv(s));
        }
    }
    return written;
}

std::string summary_text(const Report &report) {
    std::ostringstream out;
    out << "scenario " << report.spec.name << " (seed " << report.spec.seed << ")\n";
    if (!report.matrix.rows.empty() && !report.matrix.columns.empty()) {
        std::size_t width = 12;
        for (const auto &r : report.matrix.rows) {
            width = std::max(width, r.size() + 2);
        }
        out << std::string(width, ' ');
        for (const auto &c : report.matrix.columns) {
            out << c << ' ';
        }
        out << '\n';
        for (std::size_t r = 0; r < report.matrix.rows.size(); ++r) {
            out << report.matrix.rows[r] << std::string(width - report.matrix.rows[r].size(), ' ');
            for (std::size_t c = 0; c < report.matrix.columns.size(); ++c) {
                const auto &cell = report.matrix.cells[r][c];
                std::string mark = cell.holds() ? "holds" : cell.fails() ? "FAILS" : "n/a";
                mark.resize(std::max(mark.size(), report.matrix.columns[c].size()), ' ');
                out << mark << ' ';
            }
            out << '\n';
        }
    }
    for (const auto &rec : report.lemma1) {
        out << "strong-normalization equivalence " << rec.assignment << ": "
            << (rec.skipped ? "skipped (" + rec.reason + ")" : rec.consistent ? "consistent" : "INCONSISTENT") << '\n';
    }
    for (const auto &h : report.harnesses) {
        out << h.label << ": " << (h.passed() ? "pass" : "fail");
        for (const auto &c : h.checks) {
            if (!c.passed) {
                out << " [" << c.name << " " << format_double(c.value) << " vs " << format_double(c.bound) << "]";
            }
        }
        out << '\n';
    }
    if (report.mismatches.empty()) {
        out << "all expectations met\n";
    } else {
        out << report.mismatches.size() << " mismatch(es):\n";
        for (const auto &m : report.mismatches) {
            out << "  " << m << '\n';
        }
    }
    return out.str();
}

std::string list_catalog() {
    static const std::map<std::string, std::string> assignment_notes = {
        {"bloch-hemisphere", "step function on the d = 2 Bloch sphere; a non-regular frame function"},
        {"born", "Tr[rho A]"},
        {"deutsch-quartic", "normalized fourth powers of the amplitudes in a complete context"},
        {"equal-rule", "k/N for a sum of k of the N members of the context"},
        {"trace-squared", "(Tr A / d)^2"},
        {"two-slope", "additive, discontinuous f(a + b sqrt2) = c1 a + c2 b sqrt2 on Q(sqrt2)"},
        {"zurek-patch", "Born on rational exact tags, sqrt2 on irrational ones"},
    };
    static const std::map<std::string, std::string> property_notes = {
        {"additivity", "mu(sum) = sum mu within one context"},
        {"anc", "the additive value of a sum does not depend on the surrounding context"},
        {"non-negativity", "mu >= 0"},
        {"normalization", "mu(I) = 1"},
        {"onc", "mu(A) does not depend on the compatible completion of A"},
        {"state-affinity", "mu is affine under state mixtures"},
        {"strong-normalization", "sum mu = 1 over every complete decomposition of I"},
    };
    static const std::map<std::string, std::string> block_notes = {
        {"busch", "homogeneity mu(qA) = q mu(A) and the limit to irrational scalings"},
        {"continuity", "jumps along an amplitude, scaling or rotation path"},
        {"dyadic", "mu(A) against the dyadic series sum mu(A/2^i)"},
        {"envariance", "swap undone on the environment; swap constraint system"},
        {"finegrain", "equal-amplitude fine-graining against the conditional chain"},
        {"frame-weight", "summed values over bases of a fixed subspace"},
        {"gleason", "least-squares density fit and regularity verdict"},
        {"hartle", "frequency-operator deviation norm and its convergence rate"},
        {"mixture", "frequency variance under rho^(x)N against a mixture of products"},
        {"orthogonality", "inner-product witness for record-making unitaries"},
        {"pathology", "exact Cauchy checks and a discontinuity witness for two-slope"},
        {"rational-sector", "zurek-patch against exact Born weights on rational tags"},
        {"shift", "value shift under adding k to every outcome"},
    };
    std::ostringstream out;
    out << "assignments:\n";
    for (const auto &name : assignment_names()) {
        auto it = assignment_notes.find(name);
        out << "  " << name << "  " << (it == assignment_notes.end() ? "" : it->second) << '\n';
    }
    out << "properties:\n";
    auto props = property_names();
    std::sort(props.begin(), props.end());
    for (const auto &name : props) {
        out << "  " << name << "  " << property_notes.at(name) << '\n';
    }
    out << "probe paths:\n";
    std::vector<std::string> paths;
    for (auto p : {ProbePath::AmplitudeSweep, ProbePath::FrameRotation, ProbePath::ScalingSweep}) {
        paths.emplace_back(to_string(p));
    }
    std::sort(paths.begin(), paths.end());
    for (const auto &p : paths) {
        out << "  " << p << '\n';
    }
    out << "harnesses:\n";
    for (const auto &kind : block_kinds()) {
        auto it = block_notes.find(kind);
        out << "  " << kind << "  " << (it == block_notes.end() ? "" : it->second) << '\n';
    }
    return out.str();
}

} // namespace bornlab
