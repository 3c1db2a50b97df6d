#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forkent::metrics {

// Porter's stemming algorithm (1980), with the author's two official
// step-2 amendments from the reference implementation (bli->ble, logi->log).
// Expects a lowercase ASCII word; words of length <= 2 pass through.
std::string porter_stem(std::string_view word);

// Splits on non-alphanumeric boundaries, lowercases, drops empty tokens.
std::vector<std::string> tokenize_lower(std::string_view text);

}  // namespace forkent::metrics
