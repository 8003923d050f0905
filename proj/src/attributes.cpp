#include "atchan/attributes.hpp"

#include <algorithm>
#include <numeric>

namespace atchan {

AttributeSpec<std::uint64_t> min_experts(std::map<std::string, std::uint64_t> leaf_values) {
  AttributeSpec<std::uint64_t> spec;
  spec.codomain = "naturals";
  spec.mu_or = [](const std::vector<std::uint64_t>& xs) { return *std::min_element(xs.begin(), xs.end()); };
  spec.mu_and = [](const std::vector<std::uint64_t>& xs) {
    return std::accumulate(xs.begin(), xs.end(), std::uint64_t{0});
  };
  spec.mu_sand = [](const std::vector<std::uint64_t>& xs) { return *std::max_element(xs.begin(), xs.end()); };
  spec.leaf_values = std::move(leaf_values);
  return spec;
}

AttributeSpec<bool> possibility(std::map<std::string, bool> leaf_values) {
  AttributeSpec<bool> spec;
  spec.codomain = "booleans";
  spec.mu_or = [](const std::vector<bool>& xs) { return std::any_of(xs.begin(), xs.end(), [](bool b) { return b; }); };
  auto all = [](const std::vector<bool>& xs) { return std::all_of(xs.begin(), xs.end(), [](bool b) { return b; }); };
  spec.mu_and = all;
  spec.mu_sand = all;
  spec.leaf_values = std::move(leaf_values);
  return spec;
}

}  // namespace atchan
