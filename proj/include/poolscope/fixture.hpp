#pragma once

// JSONL persistence of pair histories. See docs/fixture_format.md for the
// exact line layout.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "poolscope/series.hpp"

namespace poolscope {

inline constexpr int fixture_schema_version = 1;

/// Ingest bookkeeping stored in the corpus index header.
struct CorpusMeta {
    std::optional<std::uint64_t> from_block;
    std::optional<std::uint64_t> to_block;

    friend bool operator==(const CorpusMeta&, const CorpusMeta&) = default;
};

std::string series_to_jsonl(const TokenSeries& series);
TokenSeries series_from_jsonl(const std::string& text, const std::string& origin = "<memory>");

void write_fixture(const std::filesystem::path& path, const TokenSeries& series);
TokenSeries read_fixture(const std::filesystem::path& path);

/// A corpus directory holds index.jsonl plus pairs/<pair address>.jsonl.
void write_corpus(const std::filesystem::path& dir, const Corpus& corpus, const CorpusMeta& meta = {});
Corpus read_corpus(const std::filesystem::path& dir, CorpusMeta* meta = nullptr);

std::filesystem::path corpus_index_path(const std::filesystem::path& dir);

}  // namespace poolscope
