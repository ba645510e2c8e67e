// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace gep {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidUrl : Error { using Error::Error; };
struct EmptyId : Error { using Error::Error; };
struct IpHost : Error { using Error::Error; };
struct ToolUnavailable : Error { using Error::Error; };
struct CassetteMiss : Error { using Error::Error; };
struct UndecodableImage : Error { using Error::Error; };
struct MalformedOutput : Error { using Error::Error; };
struct GatewayUnavailable : Error { using Error::Error; };
struct SearchUnavailable : Error { using Error::Error; };
struct MissingRoot : Error { using Error::Error; };
struct UnparseableLabels : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace gep
