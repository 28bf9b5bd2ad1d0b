#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "truekit/trec_data.hpp"

namespace truekit {

struct CorrelationResult {
    double coefficient = 0.0;  // in [-1, 1]
    double p_value = 1.0;      // two-sided, in [0, 1]
    std::size_t n = 0;
};

/// Spearman's rho with average ranks on ties; the p-value uses the two-sided
/// t-approximation with n-2 degrees of freedom (rho = +-1 gives p = 0).
/// Throws ValidationError on length mismatch, n < 2 or zero rank variance.
CorrelationResult spearman_rho(std::span<const double> x, std::span<const double> y);

/// Kendall's tau-b: (C - D) / sqrt((C + D + Tx) (C + D + Ty)). The p-value is
/// the tie-corrected normal approximation to the tau distribution.
/// Throws ValidationError on length mismatch, n < 2 or an all-tied vector.
CorrelationResult kendall_tau_b(std::span<const double> x, std::span<const double> y);

enum class CollapseSchemeId { FourPoint, Split0_123, Split01_23, Split012_3 };

/// Maps the four-point scale onto coarser categories. The binary schemes split
/// at the named boundary and map to {0, 1}; four-point is the identity.
class CollapseScheme {
public:
    static CollapseScheme from_id(CollapseSchemeId id) { return CollapseScheme(id); }
    /// Accepts the names "4-point", "0|123", "01|23" and "012|3".
    static CollapseScheme parse(std::string_view name);
    static const std::array<CollapseScheme, 4>& all();

    int map(RelevanceLabel label) const noexcept { return map(label.value()); }
    int map(int label) const noexcept;

    CollapseSchemeId id() const noexcept { return id_; }
    std::string_view name() const noexcept;

    bool operator==(const CollapseScheme&) const = default;

private:
    explicit CollapseScheme(CollapseSchemeId id) : id_(id) {}

    CollapseSchemeId id_;
};

std::vector<int> collapse_labels(std::span<const RelevanceLabel> labels,
                                 const CollapseScheme& scheme);

struct AgreementResult {
    double kappa = 0.0;
    double observed_agreement = 0.0;
    std::size_t n = 0;
    CollapseSchemeId scheme = CollapseSchemeId::FourPoint;
};

/// Cohen's kappa over a single pooled confusion matrix, with marginals
/// estimated per rater. Degenerate marginals (p_e = 1) yield kappa = 1 when the
/// observed agreement is also perfect and an error otherwise.
AgreementResult cohen_kappa(std::span<const RelevanceLabel> a,
                            std::span<const RelevanceLabel> b,
                            const CollapseScheme& scheme);

/// Fractional (average) 1-based ranks, the tie handling used by spearman_rho.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace truekit
