#include "acoustic/evaluate.hpp"

#include <stdexcept>
#include <string>

namespace acoustic::eval {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kRaw: return "raw";
    case Variant::kRawWt: return "raw+WT";
    case Variant::kRawPca: return "raw+PCA";
    case Variant::kRawPcaWt: return "raw+PCA+WT";
  }
  return "?";
}

std::optional<Variant> variant_from_string(std::string_view name) {
  for (Variant v : kAllVariants)
    if (name == to_string(v)) return v;
  return std::nullopt;
}

std::vector<int> aggregate_or(const std::vector<std::vector<int>>& per_node_flags) {
  if (per_node_flags.empty()) throw std::invalid_argument("no node flag rows");
  const std::size_t n = per_node_flags.front().size();
  for (std::size_t i = 1; i < per_node_flags.size(); ++i)
    if (per_node_flags[i].size() != n)
      throw std::invalid_argument("misaligned timelines: node row " + std::to_string(i) +
                                  " has " + std::to_string(per_node_flags[i].size()) +
                                  " windows, expected " + std::to_string(n));
  std::vector<int> out(n, 0);
  for (const auto& row : per_node_flags)
    for (std::size_t i = 0; i < n; ++i)
      if (row[i] != 0) out[i] = 1;
  return out;
}

ConfusionStats confusion(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("predicted and truth lengths differ (" +
                                std::to_string(predicted.size()) + " vs " +
                                std::to_string(truth.size()) + ")");
  if (predicted.empty()) throw std::invalid_argument("nothing to evaluate");

  std::size_t fp = 0, fn = 0, agree = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool t = truth[i] != 0;
    if (p == t)
      ++agree;
    else if (p)
      ++fp;
    else
      ++fn;
  }
  const double n = static_cast<double>(predicted.size());
  return {100.0 * agree / n, 100.0 * fp / n, 100.0 * fn / n, predicted.size()};
}

}  // namespace acoustic::eval
