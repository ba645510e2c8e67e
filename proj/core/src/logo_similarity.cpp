// SPDX-License-Identifier: Apache-2.0
#include "gep/logo_similarity.hpp"

#include <bit>
#include <future>
#include <semaphore>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "gep/errors.hpp"

namespace gep {

namespace {

cv::Mat decode_gray_9x8(std::span<const std::uint8_t> image) {
    cv::Mat raw(1, static_cast<int>(image.size()), CV_8U,
                const_cast<std::uint8_t*>(image.data()));
    cv::Mat decoded = cv::imdecode(raw, cv::IMREAD_GRAYSCALE);
    if (decoded.empty()) throw UndecodableImage("image bytes are not decodable PNG/JPEG");
    cv::Mat small;
    cv::resize(decoded, small, cv::Size(9, 8), 0, 0, cv::INTER_AREA);
    return small;
}

} // namespace

std::uint64_t DifferenceHashBackend::dhash(std::span<const std::uint8_t> image) {
    cv::Mat m = decode_gray_9x8(image);
    std::uint64_t h = 0;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            h <<= 1;
            if (m.at<std::uint8_t>(y, x) < m.at<std::uint8_t>(y, x + 1)) h |= 1;
        }
    return h;
}

double DifferenceHashBackend::score(std::span<const std::uint8_t> a,
                                    std::span<const std::uint8_t> b) {
    auto ha = dhash(a);
    auto hb = dhash(b);
    return 1.0 - std::popcount(ha ^ hb) / 64.0;
}

LogoSimilarity::LogoSimilarity(std::shared_ptr<SimilarityBackend> backend, double threshold)
    : backend_(backend ? std::move(backend) : std::make_shared<DifferenceHashBackend>()),
      threshold_(threshold) {}

SimilarityScore LogoSimilarity::score(std::span<const std::uint8_t> query_logo,
                                      std::span<const std::uint8_t> candidate) const {
    double v = backend_->score(query_logo, candidate);
    return {v, v >= threshold_};
}

std::vector<std::pair<ImageResult, std::optional<SimilarityScore>>>
LogoSimilarity::annotate_image_results(std::optional<std::span<const std::uint8_t>> query_logo,
                                       const std::vector<ImageResult>& results,
                                       ResourceFetcher& fetch, int max_in_flight) const {
    std::vector<std::pair<ImageResult, std::optional<SimilarityScore>>> out;
    out.reserve(results.size());
    if (!query_logo) {
        for (const auto& r : results) out.emplace_back(r, std::nullopt);
        return out;
    }

    std::counting_semaphore<> slots(std::max(1, max_in_flight));
    std::vector<std::future<std::optional<SimilarityScore>>> futures;
    futures.reserve(results.size());
    for (const auto& r : results) {
        futures.push_back(std::async(std::launch::async, [&, url = r.thumbnail_link] {
            slots.acquire();
            std::optional<SimilarityScore> s;
            try {
                if (auto bytes = fetch.fetch(url); bytes && !bytes->empty())
                    s = score(*query_logo, *bytes);
            } catch (const Error&) {
                // per-item failure: score stays absent
            }
            slots.release();
            return s;
        }));
    }
    for (std::size_t i = 0; i < results.size(); ++i)
        out.emplace_back(results[i], futures[i].get());
    return out;
}

} // namespace gep
