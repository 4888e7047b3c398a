#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ngsim/rng.hpp"

namespace ngsim::stats {

// ---------------------------------------------------------------------
// Incomplete gamma (series / continued fraction) for chi-square tails.
// ---------------------------------------------------------------------

namespace detail {

inline double gamma_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_cont_fraction(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_series(a, x);
    return 1.0 - detail::gamma_cont_fraction(a, x);
}

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_series(a, x);
    return detail::gamma_cont_fraction(a, x);
}

// Survival function of the chi-square distribution with df degrees.
inline double chi2_sf(double statistic, double df) {
    return gamma_q(df / 2.0, statistic / 2.0);
}

// ---------------------------------------------------------------------
// Uniformity tests
// ---------------------------------------------------------------------

inline double pearson_uniformity_pvalue(const std::vector<long>& counts) {
    const std::size_t w = counts.size();
    long total = 0;
    for (long c : counts) total += c;
    if (w < 2 || total == 0) return 1.0;
    const double expected = static_cast<double>(total) / static_cast<double>(w);
    double stat = 0.0;
    for (long c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return chi2_sf(stat, static_cast<double>(w - 1));
}

namespace detail {

inline double log_multinomial_pmf(const std::vector<long>& counts, long n, double log_w) {
    double lp = std::lgamma(static_cast<double>(n) + 1.0) - static_cast<double>(n) * log_w;
    for (long c : counts) lp -= std::lgamma(static_cast<double>(c) + 1.0);
    return lp;
}

inline void enumerate_compositions(std::vector<long>& cells, std::size_t idx, long remaining,
                                   const std::function<void(const std::vector<long>&)>& visit) {
    if (idx + 1 == cells.size()) {
        cells[idx] = remaining;
        visit(cells);
        return;
    }
    for (long c = 0; c <= remaining; ++c) {
        cells[idx] = c;
        enumerate_compositions(cells, idx + 1, remaining - c, visit);
    }
}

} // namespace detail

// Exact multinomial goodness-of-fit p-value against the uniform
// distribution: total probability of outcomes no more likely than the
// observed one. Returns nullopt when the enumeration would exceed the
// budget; callers fall back to the Pearson test.
inline std::optional<double> exact_multinomial_uniform_pvalue(const std::vector<long>& counts,
                                                              long budget = 1'000'000) {
    const std::size_t w = counts.size();
    long n = 0;
    for (long c : counts) n += c;
    if (w < 2 || n == 0) return 1.0;

    // number of compositions = C(n + w - 1, w - 1)
    double outcomes = 1.0;
    for (std::size_t i = 1; i < w; ++i)
        outcomes *= static_cast<double>(n + static_cast<long>(i)) / static_cast<double>(i);
    if (outcomes > static_cast<double>(budget)) return std::nullopt;

    const double log_w = std::log(static_cast<double>(w));
    const double observed_lp = detail::log_multinomial_pmf(counts, n, log_w);
    double p = 0.0;
    std::vector<long> cells(w, 0);
    detail::enumerate_compositions(cells, 0, n, [&](const std::vector<long>& outcome) {
        const double lp = detail::log_multinomial_pmf(outcome, n, log_w);
        if (lp <= observed_lp + 1e-9) p += std::exp(lp);
    });
    return std::min(p, 1.0);
}

// Exact test when affordable, Pearson chi-square otherwise.
inline double uniformity_pvalue(const std::vector<long>& counts, long budget = 1'000'000) {
    if (auto exact = exact_multinomial_uniform_pvalue(counts, budget)) return *exact;
    return pearson_uniformity_pvalue(counts);
}

// ---------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            rss += r * r;
        }
        fit.slope_se = std::sqrt(rss / (static_cast<double>(n) - 2.0) / sxx);
    }
    return fit;
}

// ---------------------------------------------------------------------
// Logistic fit (Bernoulli MLE) for tipping curves
// ---------------------------------------------------------------------

struct BinomialPoint {
    double x = 0.0;
    long successes = 0;
    long trials = 0;
};

struct LogisticFit {
    double intercept = 0.0;
    double slope = 0.0;
    bool converged = false;

    // x where the fitted success probability crosses 1/2.
    double crossing() const { return slope == 0.0 ? 0.5 : -intercept / slope; }
    double predict(double x) const {
        return 1.0 / (1.0 + std::exp(-(intercept + slope * x)));
    }
};

// Newton-Raphson on the two-parameter logistic log likelihood. Perfectly
// separated data drives the slope towards infinity; iterations are capped
// and the parameters clamped, which still yields a well-defined crossing.
inline LogisticFit fit_logistic(const std::vector<BinomialPoint>& points) {
    LogisticFit fit;
    fit.intercept = 0.0;
    fit.slope = 1.0;
    const double clamp = 500.0;
    for (int iter = 0; iter < 200; ++iter) {
        double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
        for (const auto& pt : points) {
            const double mu = fit.predict(pt.x);
            const double w = static_cast<double>(pt.trials) * mu * (1.0 - mu);
            const double resid = static_cast<double>(pt.successes) - static_cast<double>(pt.trials) * mu;
            g0 += resid;
            g1 += resid * pt.x;
            h00 += w;
            h01 += w * pt.x;
            h11 += w * pt.x * pt.x;
        }
        const double det = h00 * h11 - h01 * h01;
        if (std::abs(det) < 1e-12) break;
        double d0 = (h11 * g0 - h01 * g1) / det;
        double d1 = (h00 * g1 - h01 * g0) / det;
        const double norm = std::max(std::abs(d0), std::abs(d1));
        if (norm > 10.0) {  // damp large Newton steps
            d0 *= 10.0 / norm;
            d1 *= 10.0 / norm;
        }
        fit.intercept += d0;
        fit.slope += d1;
        fit.intercept = std::clamp(fit.intercept, -clamp, clamp);
        fit.slope = std::clamp(fit.slope, -clamp, clamp);
        if (std::max(std::abs(d0), std::abs(d1)) < 1e-10) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap over per-point binomial resamples of the fitted
// 50% crossing.
inline Interval bootstrap_crossing_ci(const std::vector<BinomialPoint>& points,
                                      int resamples, std::uint64_t seed) {
    Rng rng(derive_seed(seed, stream::kBootstrap));
    std::vector<double> crossings;
    crossings.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        std::vector<BinomialPoint> sample = points;
        for (auto& pt : sample) {
            const double phat = pt.trials > 0
                ? static_cast<double>(pt.successes) / static_cast<double>(pt.trials)
                : 0.0;
            long k = 0;
            for (long t = 0; t < pt.trials; ++t)
                if (rng.bernoulli(phat)) ++k;
            pt.successes = k;
        }
        crossings.push_back(fit_logistic(sample).crossing());
    }
    std::sort(crossings.begin(), crossings.end());
    const auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * (crossings.size() - 1));
        return crossings[idx];
    };
    return Interval{at(0.025), at(0.975)};
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace ngsim::stats
