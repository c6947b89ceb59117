#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace newsgate {

using ParticipantId = std::string;
using ArticleId = std::string;

/// Logical simulation clock. Never derived from wall time.
using Tick = std::uint64_t;

/// Ground-truth label of an article. Only the resolution step and simulated
/// agents may look at it.
enum class Truth : std::uint8_t { Fake = 0, Authentic = 1 };

inline std::string_view to_string(Truth truth) {
  return truth == Truth::Fake ? "fake" : "authentic";
}

inline std::optional<Truth> truth_from_string(std::string_view text) {
  if (text == "fake") return Truth::Fake;
  if (text == "authentic" || text == "real") return Truth::Authentic;
  return std::nullopt;
}

}  // namespace newsgate
