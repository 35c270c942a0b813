#include "poolscope/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "poolscope/error.hpp"

namespace poolscope {

std::map<Address, LabelEntry> read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open labels file: " + path.string());
    std::map<Address, LabelEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            f.erase(0, f.find_first_not_of(" \t"));
            f.erase(f.find_last_not_of(" \t\r") + 1);
            fields.push_back(f);
        }
        if (fields.size() < 2) throw FixtureError(path.string(), line_no, "expected address,label[,source]");
        try {
            out[Address::from_hex(fields[0])] = {label_from_string(fields[1]), fields.size() > 2 ? fields[2] : "labels-file"};
        } catch (const ConfigError& e) {
            throw FixtureError(path.string(), line_no, e.what());
        }
    }
    return out;
}

namespace {

struct PairWork {
    PairRecord record;
    Label label = Label::unknown;
    std::string label_source;
    std::vector<Event> events;
    std::set<EventKey> keys;
};

class TimestampCache {
public:
    explicit TimestampCache(RpcTransport& rpc) : rpc_(rpc) {}
    std::int64_t operator()(std::uint64_t block) {
        if (auto it = cache_.find(block); it != cache_.end()) return it->second;
        const auto ts = fetch_block_timestamp(rpc_, block);
        cache_.emplace(block, ts);
        return ts;
    }

private:
    RpcTransport& rpc_;
    std::map<std::uint64_t, std::int64_t> cache_;
};

Corpus assemble(const std::vector<PairWork>& work) {
    Corpus c;
    c.tokens.reserve(work.size());
    for (const auto& w : work) c.tokens.push_back(build_series(w.record, w.events, w.label, w.label_source));
    return c;
}

}  // namespace

IngestSummary ingest_to_corpus(RpcTransport& rpc, const IngestConfig& cfg, const std::filesystem::path& dir) {
    IngestSummary summary;
    CorpusMeta meta;
    std::vector<PairWork> work;
    std::map<Address, std::size_t> by_pair;

    if (std::filesystem::exists(corpus_index_path(dir))) {
        Corpus existing = read_corpus(dir, &meta);
        for (auto& s : existing.tokens) {
            PairWork w{s.pair, s.label, s.label_source, std::move(s.events), {}};
            for (const auto& ev : w.events) w.keys.insert(key_of(ev));
            by_pair[w.record.pair] = work.size();
            work.push_back(std::move(w));
        }
    }

    std::uint64_t from = cfg.from_block;
    if (meta.from_block && meta.to_block) {
        if (cfg.from_block < *meta.from_block) {
            throw ConfigError("corpus starts at block " + std::to_string(*meta.from_block) +
                              "; ingest cannot extend it backwards");
        }
        from = std::max(from, *meta.to_block + 1);
    }
    summary.from_block = from;
    summary.to_block = cfg.to_block;
    if (from > cfg.to_block) {
        summary.noop = true;
        return summary;
    }
    if (!meta.from_block) meta.from_block = cfg.from_block;

    TimestampCache timestamp(rpc);
    const std::uint64_t chunk = std::max<std::uint64_t>(1, cfg.chunk_blocks);
    for (std::uint64_t lo = from; lo <= cfg.to_block;) {
        const std::uint64_t hi = (cfg.to_block - lo < chunk - 1) ? cfg.to_block : lo + chunk - 1;

        LogFilter created{{cfg.factory}, {topics::pair_created}, lo, hi};
        for (const auto& log : fetch_logs(rpc, created, cfg.fetch)) {
            std::optional<PairRecord> rec;
            try {
                rec = decode_pair_created(log, cfg.weth, 0);
            } catch (const DecodeError& e) {
                summary.skipped.push_back(e.what());
                continue;
            }
            if (!rec || by_pair.contains(rec->pair)) continue;
            rec->creation_timestamp = timestamp(log.block_number);
            if (cfg.query_decimals) {
                if (auto d = fetch_decimals(rpc, rec->new_token())) rec->new_token_decimals = *d;
            }
            PairWork w{*rec, Label::unknown, {}, {}, {}};
            auto label_it = cfg.labels.find(rec->pair);
            if (label_it == cfg.labels.end()) label_it = cfg.labels.find(rec->new_token());
            if (label_it != cfg.labels.end()) {
                w.label = label_it->second.label;
                w.label_source = label_it->second.source;
            }
            by_pair[rec->pair] = work.size();
            work.push_back(std::move(w));
            ++summary.new_pairs;
        }

        const std::size_t batch = std::max<std::size_t>(1, cfg.address_batch);
        for (std::size_t b = 0; b < work.size(); b += batch) {
            LogFilter f{{}, {topics::swap, topics::mint, topics::burn, topics::sync}, lo, hi};
            for (std::size_t i = b; i < std::min(work.size(), b + batch); ++i) f.addresses.push_back(work[i].record.pair);
            for (const auto& log : fetch_logs(rpc, f, cfg.fetch)) {
                auto it = by_pair.find(log.address);
                if (it == by_pair.end()) continue;
                PairWork& w = work[it->second];
                if (log.block_number < w.record.creation_block || w.keys.contains(log.key())) continue;
                try {
                    w.events.push_back(decode_pair_event(log, w.record, timestamp(log.block_number)));
                    w.keys.insert(log.key());
                    ++summary.new_events;
                } catch (const DecodeError& e) {
                    summary.skipped.push_back(e.what());
                }
            }
        }
        for (auto& w : work) {
            std::stable_sort(w.events.begin(), w.events.end(),
                             [](const Event& a, const Event& b) { return key_of(a) < key_of(b); });
        }

        meta.to_block = hi;
        write_corpus(dir, assemble(work), meta);
        if (hi == cfg.to_block) break;
        lo = hi + 1;
    }
    return summary;
}

}  // namespace poolscope
