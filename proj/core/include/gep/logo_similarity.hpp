// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gep/clients.hpp"

namespace gep {

struct SimilarityScore {
    double value = 0.0;  // in [0, 1]
    bool similar = false; // value >= threshold
};

/// Scoring backend. The default is a 64-bit difference hash; an embedding
/// model can be slotted in behind the same interface.
class SimilarityBackend {
public:
    virtual ~SimilarityBackend() = default;
    // Throws UndecodableImage.
    virtual double score(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) = 0;
};

/// Images are normalized to grayscale 9x8; bit i*8+j is set when
/// pixel(j, i) < pixel(j+1, i). Score = 1 - hamming/64.
class DifferenceHashBackend final : public SimilarityBackend {
public:
    static std::uint64_t dhash(std::span<const std::uint8_t> image);
    double score(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) override;
};

class LogoSimilarity {
public:
    explicit LogoSimilarity(std::shared_ptr<SimilarityBackend> backend = nullptr,
                            double threshold = 0.8);

    SimilarityScore score(std::span<const std::uint8_t> query_logo,
                          std::span<const std::uint8_t> candidate) const;

    // Fetches each thumbnail and scores it against the query logo. A missing
    // query logo or a per-item fetch/decode failure yields an absent score;
    // the batch never aborts. Fetches run with bounded parallelism, results
    // keep input order.
    std::vector<std::pair<ImageResult, std::optional<SimilarityScore>>>
    annotate_image_results(std::optional<std::span<const std::uint8_t>> query_logo,
                           const std::vector<ImageResult>& results,
                           ResourceFetcher& fetch, int max_in_flight = 4) const;

    double threshold() const { return threshold_; }

private:
    std::shared_ptr<SimilarityBackend> backend_;
    double threshold_;
};

} // namespace gep
