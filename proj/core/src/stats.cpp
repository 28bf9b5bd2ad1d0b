#include "truekit/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace truekit {

namespace {

constexpr double kUnitEps = 1e-12;

void check_paired(std::size_t nx, std::size_t ny) {
    if (nx != ny) {
        throw ValidationError("correlation inputs differ in length (" +
                              std::to_string(nx) + " vs " + std::to_string(ny) + ")");
    }
    if (nx < 2) {
        throw ValidationError("correlation needs at least 2 paired observations");
    }
}

// Tie statistics over one vector: for each group of t equal values accumulates
// t(t-1)/2, t(t-1)(t-2) and t(t-1)(2t+5), the terms used by tau-b and its
// normal-approximation variance.
struct TieStats {
    double pairs = 0.0;   // sum t(t-1)/2
    double triple = 0.0;  // sum t(t-1)(t-2)
    double var = 0.0;     // sum t(t-1)(2t+5)
};

TieStats tie_stats(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    TieStats stats;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        stats.pairs += t * (t - 1.0) / 2.0;
        stats.triple += t * (t - 1.0) * (t - 2.0);
        stats.var += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    return stats;
}

double student_t_two_sided(double t, double dof) {
    boost::math::students_t_distribution<double> dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double normal_two_sided(double z) {
    return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // Members of a tie group share the average of the ranks they span.
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

CorrelationResult spearman_rho(std::span<const double> x, std::span<const double> y) {
    check_paired(x.size(), y.size());
    const std::size_t n = x.size();

    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);

    const double mean = (static_cast<double>(n) + 1.0) / 2.0;  // mean of 1..n, ties preserve it
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ValidationError("spearman undefined: zero rank variance");
    }

    double rho = sxy / std::sqrt(sxx * syy);
    rho = std::clamp(rho, -1.0, 1.0);

    double p = 0.0;
    if (std::fabs(rho) < 1.0 - kUnitEps) {
        const double dof = static_cast<double>(n) - 2.0;
        const double t = rho * std::sqrt(dof / ((1.0 - rho) * (1.0 + rho)));
        p = std::clamp(student_t_two_sided(t, dof), 0.0, 1.0);
    }
    return CorrelationResult{rho, p, n};
}

CorrelationResult kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    check_paired(x.size(), y.size());
    const std::size_t n = x.size();

    long long concordant = 0;
    long long discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            const double prod = dx * dy;
            if (prod > 0.0) ++concordant;
            else if (prod < 0.0) ++discordant;
        }
    }

    const auto tx = tie_stats(x);
    const auto ty = tie_stats(y);
    const double total = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double denom_x = total - tx.pairs;
    const double denom_y = total - ty.pairs;
    if (denom_x <= 0.0 || denom_y <= 0.0) {
        throw ValidationError("kendall tau undefined: all values tied in one vector");
    }

    const double diff = static_cast<double>(concordant - discordant);
    double tau = diff / std::sqrt(denom_x * denom_y);
    tau = std::clamp(tau, -1.0, 1.0);

    // Normal approximation to C - D with tie correction.
    const double dn = static_cast<double>(n);
    double var = (dn * (dn - 1.0) * (2.0 * dn + 5.0) - tx.var - ty.var) / 18.0;
    var += 2.0 * tx.pairs * ty.pairs / (dn * (dn - 1.0));
    if (n > 2) {
        var += tx.triple * ty.triple / (9.0 * dn * (dn - 1.0) * (dn - 2.0));
    }
    double p = 1.0;
    if (var > 0.0) {
        p = std::clamp(normal_two_sided(diff / std::sqrt(var)), 0.0, 1.0);
    }
    return CorrelationResult{tau, p, n};
}

CollapseScheme CollapseScheme::parse(std::string_view name) {
    for (const auto& scheme : all()) {
        if (scheme.name() == name) return scheme;
    }
    throw ValidationError("unknown collapse scheme '" + std::string(name) +
                          "' (expected 4-point, 0|123, 01|23 or 012|3)");
}

const std::array<CollapseScheme, 4>& CollapseScheme::all() {
    static const std::array<CollapseScheme, 4> schemes{
        CollapseScheme(CollapseSchemeId::FourPoint),
        CollapseScheme(CollapseSchemeId::Split0_123),
        CollapseScheme(CollapseSchemeId::Split01_23),
        CollapseScheme(CollapseSchemeId::Split012_3),
    };
    return schemes;
}

int CollapseScheme::map(int label) const noexcept {
    switch (id_) {
        case CollapseSchemeId::FourPoint: return label;
        case CollapseSchemeId::Split0_123: return label >= 1 ? 1 : 0;
        case CollapseSchemeId::Split01_23: return label >= 2 ? 1 : 0;
        case CollapseSchemeId::Split012_3: return label >= 3 ? 1 : 0;
    }
    return label;
}

std::string_view CollapseScheme::name() const noexcept {
    switch (id_) {
        case CollapseSchemeId::FourPoint: return "4-point";
        case CollapseSchemeId::Split0_123: return "0|123";
        case CollapseSchemeId::Split01_23: return "01|23";
        case CollapseSchemeId::Split012_3: return "012|3";
    }
    return {};
}

std::vector<int> collapse_labels(std::span<const RelevanceLabel> labels,
                                 const CollapseScheme& scheme) {
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& label : labels) out.push_back(scheme.map(label));
    return out;
}

AgreementResult cohen_kappa(std::span<const RelevanceLabel> a,
                            std::span<const RelevanceLabel> b,
                            const CollapseScheme& scheme) {
    if (a.size() != b.size()) {
        throw ValidationError("kappa inputs differ in length");
    }
    if (a.empty()) {
        throw ValidationError("kappa needs at least one paired label");
    }
    const std::size_t n = a.size();

    std::map<int, std::size_t> marg_a;
    std::map<int, std::size_t> marg_b;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int ca = scheme.map(a[i]);
        const int cb = scheme.map(b[i]);
        ++marg_a[ca];
        ++marg_b[cb];
        if (ca == cb) ++agree;
    }

    const double dn = static_cast<double>(n);
    const double po = static_cast<double>(agree) / dn;
    double pe = 0.0;
    for (const auto& [cat, count_a] : marg_a) {
        auto it = marg_b.find(cat);
        if (it == marg_b.end()) continue;
        pe += (static_cast<double>(count_a) / dn) * (static_cast<double>(it->second) / dn);
    }

    AgreementResult result;
    result.observed_agreement = po;
    result.n = n;
    result.scheme = scheme.id();
    if (pe >= 1.0 - kUnitEps) {
        if (po >= 1.0 - kUnitEps) {
            result.kappa = 1.0;
            return result;
        }
        throw ValidationError("kappa undefined: expected agreement is 1 "
                              "but observed agreement is not");
    }
    result.kappa = (po - pe) / (1.0 - pe);
    return result;
}

}  // namespace truekit
