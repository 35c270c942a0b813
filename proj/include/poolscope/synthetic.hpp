#pragma once

// Deterministic synthetic corpus: honeypot-like buy-only flows, two-sided
// sellable flows, planted sandwiches and rug pulls, all replayed through the
// integer pool so every Sync checkpoint agrees with the running reserves.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "poolscope/fixture.hpp"
#include "poolscope/series.hpp"

namespace poolscope {

struct SyntheticOptions {
    std::uint64_t seed = 7;
    std::size_t tokens = 50;
    std::uint64_t first_block = 18'000'000;
    std::int64_t first_timestamp = 1'693'526'411;
};

struct PlantedSandwich {
    std::string pair;
    std::uint64_t block = 0;
    std::uint32_t front_log_index = 0;
    std::uint32_t victim_log_index = 0;
    std::uint32_t back_log_index = 0;
};

struct SyntheticCorpus {
    Corpus corpus;  // ordered by creation block
    CorpusMeta meta;
    std::vector<PlantedSandwich> sandwiches;
    std::vector<std::string> rug_pulls;  // pair addresses
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& options = {});

/// Mainnet WETH, used as the quote token of every synthetic pair.
inline constexpr const char* mainnet_weth = "0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2";

}  // namespace poolscope
