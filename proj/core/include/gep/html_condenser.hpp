// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace gep {

/// Brand-relevant reduction of a webpage, small enough for a model prompt.
struct CondensedPage {
    struct InputField {
        std::string name;
        std::string placeholder;
        std::string type;
        bool operator==(const InputField&) const = default;
    };

    std::optional<std::string> title;
    std::vector<InputField> inputs;
    std::vector<std::string> buttons;
    std::vector<std::string> visible_text; // document order
    std::size_t token_estimate = 0;

    bool empty() const {
        return !title && inputs.empty() && buttons.empty() && visible_text.empty();
    }

    // Compact single-line rendering used for prompt slots.
    std::string render() const;
};

// Deterministic monotone token estimator: ceil(byte_length / 4).
std::size_t estimate_tokens(std::string_view text);

// Lenient extraction of title, inputs, button labels and visible text.
// Script/style/comment content is dropped. When the content exceeds the
// budget, visible_text is truncated from the tail first, then inputs, then
// buttons; the title is kept (clamped only if it alone exceeds the budget).
// budget must be >= 64.
CondensedPage condense(std::string_view html, std::size_t budget = 3000);

} // namespace gep
