#include "fictsense/supersense.hpp"

#include <algorithm>

namespace fictsense {

std::optional<int> supersense_index(std::string_view name) {
    auto it = std::find(kSupersenses.begin(), kSupersenses.end(), name);
    if (it == kSupersenses.end()) return std::nullopt;
    return static_cast<int>(it - kSupersenses.begin());
}

}  // namespace fictsense
