// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gep {

std::string base64_encode(std::span<const std::uint8_t> bytes);
// nullopt on invalid input.
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

} // namespace gep
