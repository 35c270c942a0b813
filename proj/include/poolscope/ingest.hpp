#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "poolscope/fixture.hpp"
#include "poolscope/rpc.hpp"

namespace poolscope {

struct LabelEntry {
    Label label = Label::unknown;
    std::string source;
};

struct IngestConfig {
    Address weth;
    Address factory;
    std::uint64_t from_block = 0;
    std::uint64_t to_block = 0;
    std::uint64_t chunk_blocks = 10'000;   // checkpoint granularity
    std::size_t address_batch = 100;       // pair addresses per eth_getLogs call
    bool query_decimals = true;
    FetchOptions fetch;
    std::map<Address, LabelEntry> labels;  // keyed by pair or new-token address
};

/// Reads "address,label[,source]" lines; '#' starts a comment.
std::map<Address, LabelEntry> read_labels(const std::filesystem::path& path);

struct IngestSummary {
    std::uint64_t from_block = 0;
    std::uint64_t to_block = 0;
    std::size_t new_pairs = 0;
    std::size_t new_events = 0;
    std::vector<std::string> skipped;  // undecodable logs, with reasons
    bool noop = false;
};

/// Extends the corpus at `dir` with the configured block range and rewrites it
/// after every chunk, so a failure leaves the last completed chunk on disk.
/// Blocks at or below the recorded `to_block` checkpoint are not fetched again.
IngestSummary ingest_to_corpus(RpcTransport& rpc, const IngestConfig& cfg, const std::filesystem::path& dir);

}  // namespace poolscope
