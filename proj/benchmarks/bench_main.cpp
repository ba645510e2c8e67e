// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "gep/domain_tools.hpp"
#include "gep/eval.hpp"
#include "gep/html_condenser.hpp"
#include "gep/logo_similarity.hpp"

#include <opencv2/imgcodecs.hpp>

namespace {

std::string login_page(int paragraphs) {
    std::string html = "<html><head><title>Acme Bank - Sign In</title></head><body>"
                       "<form><input type=\"text\" name=\"user\" placeholder=\"Email\">"
                       "<input type=\"password\" name=\"pw\"><button>Sign in</button></form>";
    for (int i = 0; i < paragraphs; ++i)
        html += "<p>Welcome to Acme Bank online banking, paragraph " + std::to_string(i) +
                ".</p>";
    return html + "</body></html>";
}

void bm_condense(benchmark::State& state) {
    auto html = login_page(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gep::condense(html, 3000));
    state.SetBytesProcessed(state.iterations() * html.size());
}
BENCHMARK(bm_condense)->Arg(10)->Arg(1000)->Arg(50000);

void bm_estimate_tokens(benchmark::State& state) {
    std::string text(static_cast<std::size_t>(state.range(0)), 'x');
    for (auto _ : state) benchmark::DoNotOptimize(gep::estimate_tokens(text));
}
BENCHMARK(bm_estimate_tokens)->Arg(64)->Arg(65536);

void bm_registrable_domain(benchmark::State& state) {
    std::vector<std::string> urls = {
        "https://accounts.google.com/signin", "https://www.example.co.uk",
        "https://bar.foo.github.io/x",        "https://a.b.ck/",
        "https://deep.sub.myblog.blogspot.com"};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gep::registrable_domain(urls[i % urls.size()]));
        ++i;
    }
}
BENCHMARK(bm_registrable_domain);

void bm_dhash_score(benchmark::State& state) {
    std::mt19937 rng(7);
    auto png = [&] {
        cv::Mat m(64, 64, CV_8UC3);
        for (int y = 0; y < m.rows; ++y)
            for (int x = 0; x < m.cols; ++x)
                m.at<cv::Vec3b>(y, x) = cv::Vec3b(rng() % 256, rng() % 256, rng() % 256);
        std::vector<std::uint8_t> out;
        cv::imencode(".png", m, out);
        return out;
    };
    auto a = png();
    auto b = png();
    gep::DifferenceHashBackend backend;
    for (auto _ : state) benchmark::DoNotOptimize(backend.score(a, b));
}
BENCHMARK(bm_dhash_score);

void bm_compute_metrics(benchmark::State& state) {
    std::vector<gep::EvalRecord> records;
    std::mt19937 rng(11);
    for (int i = 0; i < state.range(0); ++i) {
        gep::EvalRecord r;
        r.id = "r" + std::to_string(i);
        r.verdict = gep::BrandVerdict::named("B", "r");
        r.classification = gep::Classification::from_basis(
            rng() % 2 ? gep::ClassBasis::DomainMatch : gep::ClassBasis::DomainMismatch);
        r.label = gep::GroundTruth{rng() % 2 ? gep::Label::Phish : gep::Label::Benign, {}};
        records.push_back(std::move(r));
    }
    for (auto _ : state) benchmark::DoNotOptimize(gep::compute_metrics(records));
}
BENCHMARK(bm_compute_metrics)->Arg(400)->Arg(10000);

} // namespace

BENCHMARK_MAIN();
