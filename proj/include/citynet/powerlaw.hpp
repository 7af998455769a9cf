#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "citynet/error.hpp"
#include "citynet/rng.hpp"

namespace citynet {

/// Hurwitz zeta ζ(s, q) = Σ_{k≥0} (q + k)^(−s) for s > 1, q > 0, by
/// Euler–Maclaurin summation after shifting q to at least 10.
inline double hurwitz_zeta(double s, double q) {
    if (!(s > 1.0) || !(q > 0.0)) throw InvalidArgument("hurwitz_zeta requires s > 1 and q > 0");
    // B_{2j} / (2j)!
    static constexpr double kCoef[] = {
        1.0 / 12.0,                     // B2/2!
        -1.0 / 720.0,                   // B4/4!
        1.0 / 30240.0,                  // B6/6!
        -1.0 / 1209600.0,               // B8/8!
        1.0 / 47900160.0,               // B10/10!
        -691.0 / 1307674368000.0,       // B12/12!
        1.0 / 74724249600.0,            // B14/14!
    };
    double sum = 0.0;
    double a = q;
    while (a < 10.0) {
        sum += std::pow(a, -s);
        a += 1.0;
    }
    sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
    double rising = s;                 // s (s+1) ... (s+2j-2)
    double power = std::pow(a, -s - 1.0);
    const double inv_a2 = 1.0 / (a * a);
    for (int j = 1; j <= 7; ++j) {
        sum += kCoef[j - 1] * rising * power;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        power *= inv_a2;
    }
    return sum;
}

/// Discrete power law P(x) ∝ x^(−exponent) on xmin ≤ x ≤ xmax (xmax = 0: unbounded).
class DiscretePowerLaw {
public:
    DiscretePowerLaw(double exponent, std::uint64_t xmin = 1, std::uint64_t xmax = 0)
        : exponent_(exponent), xmin_(xmin), xmax_(xmax) {
        if (!(exponent > 1.0)) throw InvalidArgument("power-law exponent must exceed 1 (got " + std::to_string(exponent) + ")");
        if (xmin < 1) throw InvalidArgument("power-law xmin must be >= 1");
        if (xmax != 0 && xmax < xmin) throw InvalidArgument("power-law xmax below xmin");
        norm_ = hurwitz_zeta(exponent_, static_cast<double>(xmin_));
        floor_ = xmax_ ? ccdf(xmax_ + 1) : 0.0;
    }

    /// P(X ≥ x) for the untruncated law.
    double ccdf(std::uint64_t x) const {
        if (x <= xmin_) return 1.0;
        return hurwitz_zeta(exponent_, static_cast<double>(x)) / norm_;
    }

    /// Inverse-CCDF draw; exact for the (truncated) law.
    std::uint64_t operator()(Rng& rng) const {
        const double u = floor_ + (1.0 - floor_) * (1.0 - rng.uniform());  // (floor, 1]
        // find the largest x with ccdf(x) >= u
        std::uint64_t lo = xmin_;
        std::uint64_t hi = xmin_ + 1;
        const std::uint64_t limit = xmax_ ? xmax_ + 1 : (std::uint64_t{1} << 52);
        while (hi < limit && ccdf(hi) >= u) {
            lo = hi;
            hi = std::min(limit, xmin_ + 2 * (hi - xmin_ + 1));
        }
        while (hi - lo > 1) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (ccdf(mid) >= u) lo = mid;
            else hi = mid;
        }
        return lo;
    }

    double exponent() const noexcept { return exponent_; }

private:
    double exponent_;
    std::uint64_t xmin_;
    std::uint64_t xmax_;
    double norm_;
    double floor_;
};

struct PowerLawFit {
    double exponent = 0.0;
    std::uint64_t xmin = 1;
    double ks_statistic = 1.0;
    std::size_t n_tail = 0;
};

struct PowerLawFitOptions {
    std::size_t min_samples = 50;
    /// Smallest tail considered while scanning xmin.
    std::size_t min_tail = 10;
    double max_exponent = 20.0;
};

namespace detail {

/// Discrete MLE exponent for a tail with n points, Σ ln x = log_sum, lower bound xmin.
inline double mle_exponent(std::size_t n, double log_sum, double xmin, double max_exponent) {
    auto loglik = [&](double a) { return -static_cast<double>(n) * std::log(hurwitz_zeta(a, xmin)) - a * log_sum; };
    // concave in the exponent; golden-section search
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1.0 + 1e-6, hi = max_exponent;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = loglik(x1), f2 = loglik(x2);
    while (hi - lo > 1e-7) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = loglik(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = loglik(x1);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Clauset–Shalizi–Newman fit: discrete MLE exponent for every candidate xmin,
/// keeping the xmin whose tail has the smallest Kolmogorov–Smirnov distance.
inline PowerLawFit fit_power_law(std::span<const std::uint64_t> samples, const PowerLawFitOptions& opt = {}) {
    if (samples.size() < opt.min_samples) {
        throw InvalidArgument("power-law fit needs at least " + std::to_string(opt.min_samples) + " samples (got " +
                              std::to_string(samples.size()) + ")");
    }
    std::vector<std::uint64_t> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    if (x.front() == 0) throw InvalidArgument("power-law samples must be positive");
    if (x.front() == x.back()) throw InvalidArgument("degenerate distribution: all samples equal");

    // distinct values with the count of samples >= each, and suffix log sums
    std::vector<std::uint64_t> values;
    std::vector<std::size_t> first_index;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i == 0 || x[i] != x[i - 1]) {
            values.push_back(x[i]);
            first_index.push_back(i);
        }
    }
    std::vector<double> suffix_log(x.size() + 1, 0.0);
    for (std::size_t i = x.size(); i-- > 0;) suffix_log[i] = suffix_log[i + 1] + std::log(static_cast<double>(x[i]));

    const std::size_t min_tail = std::max<std::size_t>(2, std::min(opt.min_tail, x.size()));
    PowerLawFit best;
    bool have = false;
    // the largest distinct value alone cannot be fit
    for (std::size_t c = 0; c + 1 < values.size(); ++c) {
        const std::size_t start = first_index[c];
        const std::size_t n = x.size() - start;
        if (n < min_tail) break;
        const double xmin = static_cast<double>(values[c]);
        const double a = detail::mle_exponent(n, suffix_log[start], xmin, opt.max_exponent);
        const double norm = hurwitz_zeta(a, xmin);
        double ks = 0.0;
        for (std::size_t j = c; j < values.size(); ++j) {
            const std::size_t below_next = (j + 1 < values.size() ? first_index[j + 1] : x.size()) - start;
            const double emp = static_cast<double>(below_next) / static_cast<double>(n);
            const double model = 1.0 - hurwitz_zeta(a, static_cast<double>(values[j]) + 1.0) / norm;
            ks = std::max(ks, std::abs(emp - model));
            // the model CDF keeps rising across a gap up to the next observed value
            if (j + 1 < values.size() && values[j + 1] > values[j] + 1) {
                const double gap_model = 1.0 - hurwitz_zeta(a, static_cast<double>(values[j + 1])) / norm;
                ks = std::max(ks, std::abs(emp - gap_model));
            }
        }
        if (!have || ks < best.ks_statistic) {
            best = PowerLawFit{a, values[c], ks, n};
            have = true;
        }
    }
    if (!have) throw InvalidArgument("no xmin candidate leaves a tail of at least " + std::to_string(min_tail) + " samples");
    return best;
}

}  // namespace citynet
