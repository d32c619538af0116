#include "bornlab/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bornlab {

namespace {

constexpr double kProbabilityTol = 1e-12;

/// Neumaier summation.
class Accumulator {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + carry_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void require_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::InvalidSpec, "probability " + std::to_string(p) + " outside [0, 1]");
    }
}

} // namespace

void validate(const FrequencySpec &spec) {
    if (spec.probabilities.empty()) {
        throw Error(ErrorKind::InvalidSpec, "no outcome probabilities");
    }
    Accumulator total;
    for (double p : spec.probabilities) {
        require_probability(p);
        total.add(p);
    }
    if (std::abs(total.value() - 1.0) > kProbabilityTol) {
        throw Error(ErrorKind::InvalidSpec, "outcome probabilities do not sum to 1");
    }
    if (spec.k >= spec.probabilities.size()) {
        throw Error(ErrorKind::InvalidSpec, "target outcome out of range");
    }
    if (spec.copies < 1) {
        throw Error(ErrorKind::InvalidSpec, "need at least one copy");
    }
}

FrequencyMoments binomial_frequency_moments(double p, std::size_t n) {
    require_probability(p);
    if (n < 1) {
        throw Error(ErrorKind::InvalidSpec, "need at least one copy");
    }
    if (p == 0.0 || p == 1.0) {
        return {p, 0.0, 0.0};
    }
    const double nd = static_cast<double>(n);
    const double ratio = p / (1.0 - p);
    // Unnormalized masses relative to the mode; normalizing by their sum
    // removes any error in the mode's absolute mass.
    const auto mode = static_cast<std::size_t>(std::floor((nd + 1.0) * p));
    const std::size_t top = std::min(mode, n);
    constexpr double kCutoff = 1e-22;

    Accumulator mass;
    Accumulator first;
    Accumulator dev;
    auto add = [&](std::size_t m, double w) {
        const double f = static_cast<double>(m) / nd;
        mass.add(w);
        first.add(w * f);
        dev.add(w * (f - p) * (f - p));
    };
    add(top, 1.0);
    double w = 1.0;
    for (std::size_t m = top; m < n; ++m) {
        w *= static_cast<double>(n - m) / static_cast<double>(m + 1) * ratio;
        if (w < kCutoff) {
            break;
        }
        add(m + 1, w);
    }
    w = 1.0;
    for (std::size_t m = top; m > 0; --m) {
        w *= static_cast<double>(m) / static_cast<double>(n - m + 1) / ratio;
        if (w < kCutoff) {
            break;
        }
        add(m - 1, w);
    }
    const double z = mass.value();
    FrequencyMoments out;
    out.mean = first.value() / z;
    out.deviation = dev.value() / z;
    // E[(f - mean)^2] = E[(f - p)^2] - (mean - p)^2.
    out.variance = std::max(0.0, out.deviation - (out.mean - p) * (out.mean - p));
    return out;
}

double frequency_deviation_norm(const FrequencySpec &spec) {
    validate(spec);
    return std::sqrt(binomial_frequency_moments(spec.probabilities[spec.k], spec.copies).deviation);
}

double frequency_deviation_closed_form(double p, std::size_t n) {
    require_probability(p);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double frequency_apply_bruteforce(const PureState &psi, std::size_t k, std::size_t n) {
    const std::size_t d = psi.dim();
    if (k >= d) {
        throw Error(ErrorKind::InvalidSpec, "target outcome out of range");
    }
    if (n < 1) {
        throw Error(ErrorKind::InvalidSpec, "need at least one copy");
    }
    std::size_t size = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (size > kBruteForceLimit / d) {
            throw Error(ErrorKind::SizeLimit, "d^N exceeds " + std::to_string(kBruteForceLimit));
        }
        size *= d;
    }
    Vector power = psi.vector();
    for (std::size_t i = 1; i < n; ++i) {
        power = tensor_product(power, psi.vector());
    }
    const double p = std::norm(psi.vector()(static_cast<Eigen::Index>(k)));
    // Odometer over outcome strings in the same (big-endian) order as the
    // Kronecker product, tracking how many digits equal k.
    std::vector<std::size_t> digits(n, 0);
    std::size_t hits = k == 0 ? n : 0;
    Accumulator norm2;
    for (std::size_t idx = 0; idx < size; ++idx) {
        const double f = static_cast<double>(hits) / static_cast<double>(n);
        norm2.add(std::norm(power(static_cast<Eigen::Index>(idx))) * (f - p) * (f - p));
        for (std::size_t pos = n; pos-- > 0;) {
            if (digits[pos] == k) {
                --hits;
            }
            if (++digits[pos] < d) {
                if (digits[pos] == k) {
                    ++hits;
                }
                break;
            }
            digits[pos] = 0;
            if (k == 0) {
                ++hits;
            }
        }
    }
    return std::sqrt(norm2.value());
}

void fit_log_log(ConvergenceSeries &series) {
    series.slope.reset();
    series.prefactor.reset();
    series.exact_convergence = !series.points.empty() &&
                               std::all_of(series.points.begin(), series.points.end(),
                                           [](const auto &pt) { return pt.second == 0.0; });
    if (series.exact_convergence || series.points.size() < 2) {
        return;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &[n, v] : series.points) {
        if (!(v > 0.0)) {
            return;
        }
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(series.points.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    series.slope = slope;
    series.prefactor = std::exp((sy - slope * sx) / m);
}

ConvergenceSeries hartle_convergence_study(const FrequencySpec &base, const std::vector<std::size_t> &grid) {
    if (grid.size() < 4) {
        throw Error(ErrorKind::InvalidGrid, "a convergence study needs at least four copy counts");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1])) {
            throw Error(ErrorKind::InvalidGrid, "copy counts must be positive and strictly increasing");
        }
    }
    ConvergenceSeries series;
    for (auto n : grid) {
        FrequencySpec spec = base;
        spec.copies = n;
        series.points.emplace_back(n, frequency_deviation_norm(spec));
    }
    fit_log_log(series);
    return series;
}

MixtureGap mixed_variance_gap(const std::vector<MixtureComponent> &mixture, std::size_t k,
                              const std::vector<std::size_t> &n_grid) {
    if (mixture.empty()) {
        throw Error(ErrorKind::InvalidSpec, "empty mixture");
    }
    Accumulator wsum;
    const std::size_t d = mixture.front().psi.dim();
    for (const auto &c : mixture) {
        if (!(c.weight >= 0.0) || c.psi.dim() != d) {
            throw Error(ErrorKind::InvalidSpec, "mixture weights must be non-negative, states of one dimension");
        }
        wsum.add(c.weight);
    }
    if (std::abs(wsum.value() - 1.0) > kProbabilityTol) {
        throw Error(ErrorKind::InvalidSpec, "mixture weights do not sum to 1");
    }
    if (k >= d) {
        throw Error(ErrorKind::InvalidSpec, "target outcome out of range");
    }
    if (n_grid.empty()) {
        throw Error(ErrorKind::InvalidGrid, "empty copy-count grid");
    }

    MixtureGap out;
    Accumulator mean;
    for (const auto &c : mixture) {
        const double q = std::norm(c.psi.vector()(static_cast<Eigen::Index>(k)));
        out.q.push_back(q);
        mean.add(c.weight * q);
    }
    out.q_mean = std::min(1.0, std::max(0.0, mean.value()));
    Accumulator spread;
    for (std::size_t j = 0; j < mixture.size(); ++j) {
        spread.add(mixture[j].weight * (out.q[j] - out.q_mean) * (out.q[j] - out.q_mean));
    }
    out.q_variance = spread.value();

    for (auto n : n_grid) {
        if (n < 1) {
            throw Error(ErrorKind::InvalidGrid, "copy counts must be positive");
        }
        const FrequencyMoments whole = binomial_frequency_moments(out.q_mean, n);
        out.product_of_mixture.points.emplace_back(n, whole.variance);

        // Law of total variance over the component index j.
        Accumulator expected_var;
        Accumulator expected_mean;
        std::vector<double> means;
        for (std::size_t j = 0; j < mixture.size(); ++j) {
            const FrequencyMoments part = binomial_frequency_moments(out.q[j], n);
            expected_var.add(mixture[j].weight * part.variance);
            expected_mean.add(mixture[j].weight * part.mean);
            means.push_back(part.mean);
        }
        Accumulator var_of_means;
        for (std::size_t j = 0; j < mixture.size(); ++j) {
            const double dm = means[j] - expected_mean.value();
            var_of_means.add(mixture[j].weight * dm * dm);
        }
        out.mixture_of_products.points.emplace_back(n, expected_var.value() + var_of_means.value());
        out.expectations.emplace_back(whole.mean, expected_mean.value());
    }
    fit_log_log(out.product_of_mixture);
    fit_log_log(out.mixture_of_products);
    return out;
}

MixtureGap mixed_variance_gap(const std::vector<double> &weights, const std::vector<double> &q,
                              const std::vector<std::size_t> &n_grid) {
    if (weights.size() != q.size()) {
        throw Error(ErrorKind::InvalidSpec, "need one q value per mixture weight");
    }
    std::vector<MixtureComponent> mixture;
    for (std::size_t j = 0; j < q.size(); ++j) {
        require_probability(q[j]);
        Vector v(2);
        v << std::sqrt(q[j]), std::sqrt(1.0 - q[j]);
        mixture.push_back({weights[j], PureState::normalized(v)});
    }
    return mixed_variance_gap(mixture, 0, n_grid);
}

} // namespace bornlab
