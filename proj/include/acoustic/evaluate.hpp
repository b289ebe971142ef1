#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace acoustic::eval {

// Table-style accounting over evaluated windows: "true detected" counts
// agreement in both senses (hits and correct rejections), so the three
// percentages always sum to 100.
struct ConfusionStats {
  double true_detected_pct = 0.0;
  double false_positive_pct = 0.0;
  double false_negative_pct = 0.0;
  std::size_t total = 0;
};

// Preprocessing ablation variants.
enum class Variant { kRaw, kRawWt, kRawPca, kRawPcaWt };

inline constexpr Variant kAllVariants[] = {Variant::kRaw, Variant::kRawWt, Variant::kRawPca,
                                           Variant::kRawPcaWt};

const char* to_string(Variant v);
std::optional<Variant> variant_from_string(std::string_view name);

// Point-of-interest flag per window: 1 iff any node flagged it. All rows
// must have equal length.
std::vector<int> aggregate_or(const std::vector<std::vector<int>>& per_node_flags);

ConfusionStats confusion(std::span<const int> predicted, std::span<const int> truth);

}  // namespace acoustic::eval
