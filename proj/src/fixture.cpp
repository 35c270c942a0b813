#include "poolscope/fixture.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "poolscope/error.hpp"

namespace poolscope {

using ojson = nlohmann::ordered_json;

namespace {

std::string dec(const int256& v) { return v.str(); }
std::string dec(const uint256& v) { return v.str(); }

ojson event_line(const Event& ev) {
    ojson j;
    auto put_key = [&](const char* record, const EventKey& k, std::int64_t ts) {
        j["record"] = record;
        j["block"] = k.block;
        j["tx_index"] = k.tx_index;
        j["log_index"] = k.log_index;
        j["timestamp"] = ts;
    };
    if (const auto* s = std::get_if<SwapEvent>(&ev)) {
        put_key("swap", s->key, s->timestamp);
        j["weth"] = dec(s->weth_raw);
        j["token"] = dec(s->token_raw);
        j["trader"] = s->trader.hex();
    } else if (const auto* l = std::get_if<LiquidityEvent>(&ev)) {
        put_key(l->kind == LiquidityKind::mint ? "mint" : "burn", l->key, l->timestamp);
        j["weth"] = dec(l->weth_raw);
        j["token"] = dec(l->token_raw);
    } else {
        const auto& y = std::get<SyncEvent>(ev);
        put_key("sync", y.key, y.timestamp);
        j["reserve_weth"] = dec(y.reserve_weth_raw);
        j["reserve_token"] = dec(y.reserve_token_raw);
    }
    return j;
}

ojson pair_header(const TokenSeries& s) {
    ojson j;
    j["record"] = "pair";
    j["schema"] = fixture_schema_version;
    j["pair"] = s.pair.pair.hex();
    j["token0"] = s.pair.token0.hex();
    j["token1"] = s.pair.token1.hex();
    j["weth_is_token0"] = s.pair.weth_is_token0;
    j["token_decimals"] = s.pair.new_token_decimals;
    j["creation_block"] = s.pair.creation_block;
    j["creation_timestamp"] = s.pair.creation_timestamp;
    j["label"] = to_string(s.label);
    j["label_source"] = s.label_source;
    return j;
}

// Strictly decimal, optionally signed; anything else is a malformed line.
template <class Int>
Int parse_integer(const ojson& j, const char* field, bool allow_negative) {
    const auto& text = j.at(field).get_ref<const std::string&>();
    std::size_t start = (allow_negative && !text.empty() && text[0] == '-') ? 1 : 0;
    if (text.size() == start) throw std::invalid_argument(std::string(field) + " is empty");
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') throw std::invalid_argument(std::string(field) + " is not an integer");
    }
    return Int(text);
}

EventKey read_key(const ojson& j) {
    return {j.at("block").get<std::uint64_t>(), j.at("tx_index").get<std::uint32_t>(),
            j.at("log_index").get<std::uint32_t>()};
}

Event parse_event(const ojson& j, unsigned decimals) {
    const auto& record = j.at("record").get_ref<const std::string&>();
    const EventKey key = read_key(j);
    const auto ts = j.at("timestamp").get<std::int64_t>();
    if (record == "swap") {
        return make_swap(key, ts, Address::from_hex(j.at("trader").get<std::string>()),
                         parse_integer<int256>(j, "weth", true), parse_integer<int256>(j, "token", true),
                         decimals);
    }
    if (record == "mint" || record == "burn") {
        return make_liquidity(record == "mint" ? LiquidityKind::mint : LiquidityKind::burn, key, ts,
                              parse_integer<uint256>(j, "weth", false),
                              parse_integer<uint256>(j, "token", false), decimals);
    }
    if (record == "sync") {
        return make_sync(key, ts, parse_integer<uint256>(j, "reserve_weth", false),
                         parse_integer<uint256>(j, "reserve_token", false), decimals);
    }
    throw std::invalid_argument("unknown record type '" + record + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FixtureError(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FixtureError(path.string(), 0, "cannot open file for writing");
    out << text;
    if (!out) throw FixtureError(path.string(), 0, "write failed");
}

}  // namespace

std::string series_to_jsonl(const TokenSeries& series) {
    std::string out = pair_header(series).dump();
    out.push_back('\n');
    for (const auto& ev : series.events) {
        out += event_line(ev).dump();
        out.push_back('\n');
    }
    return out;
}

TokenSeries series_from_jsonl(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::optional<PairRecord> pair;
    Label label = Label::unknown;
    std::string label_source;
    std::vector<Event> events;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = ojson::parse(line);
            if (!pair) {
                if (j.at("record") != "pair") throw std::invalid_argument("first line must be the pair header");
                if (j.at("schema").get<int>() != fixture_schema_version) {
                    throw std::invalid_argument("unsupported schema version");
                }
                PairRecord p;
                p.pair = Address::from_hex(j.at("pair").get<std::string>());
                p.token0 = Address::from_hex(j.at("token0").get<std::string>());
                p.token1 = Address::from_hex(j.at("token1").get<std::string>());
                p.weth_is_token0 = j.at("weth_is_token0").get<bool>();
                p.new_token_decimals = j.at("token_decimals").get<std::uint8_t>();
                p.creation_block = j.at("creation_block").get<std::uint64_t>();
                p.creation_timestamp = j.at("creation_timestamp").get<std::int64_t>();
                label = label_from_string(j.at("label").get<std::string>());
                label_source = j.at("label_source").get<std::string>();
                pair = p;
            } else {
                events.push_back(parse_event(j, pair->new_token_decimals));
            }
        } catch (const std::exception& e) {
            throw FixtureError(origin, line_no, e.what());
        }
    }
    if (!pair) throw FixtureError(origin, line_no, "missing pair header");
    return build_series(*pair, std::move(events), label, std::move(label_source));
}

void write_fixture(const std::filesystem::path& path, const TokenSeries& series) {
    write_file(path, series_to_jsonl(series));
}

TokenSeries read_fixture(const std::filesystem::path& path) {
    return series_from_jsonl(read_file(path), path.string());
}

std::filesystem::path corpus_index_path(const std::filesystem::path& dir) { return dir / "index.jsonl"; }

void write_corpus(const std::filesystem::path& dir, const Corpus& corpus, const CorpusMeta& meta) {
    ojson header;
    header["record"] = "corpus";
    header["schema"] = fixture_schema_version;
    header["from_block"] = meta.from_block ? ojson(*meta.from_block) : ojson(nullptr);
    header["to_block"] = meta.to_block ? ojson(*meta.to_block) : ojson(nullptr);
    std::string index = header.dump() + "\n";

    for (const auto& s : corpus.tokens) {
        const std::string rel = "pairs/" + s.pair.pair.hex() + ".jsonl";
        ojson entry;
        entry["record"] = "entry";
        entry["pair"] = s.pair.pair.hex();
        entry["file"] = rel;
        index += entry.dump() + "\n";
        write_fixture(dir / rel, s);
    }
    write_file(corpus_index_path(dir), index);
}

Corpus read_corpus(const std::filesystem::path& dir, CorpusMeta* meta) {
    const auto index_path = corpus_index_path(dir);
    if (!std::filesystem::exists(index_path)) {
        throw ConfigError("corpus index not found: " + index_path.string());
    }
    std::istringstream in(read_file(index_path));
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    Corpus corpus;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string rel;
        try {
            const auto j = ojson::parse(line);
            if (!header_seen) {
                if (j.at("record") != "corpus") throw std::invalid_argument("first line must be the corpus header");
                if (j.at("schema").get<int>() != fixture_schema_version) {
                    throw std::invalid_argument("unsupported schema version");
                }
                if (meta) {
                    *meta = {};
                    if (!j.at("from_block").is_null()) meta->from_block = j["from_block"].get<std::uint64_t>();
                    if (!j.at("to_block").is_null()) meta->to_block = j["to_block"].get<std::uint64_t>();
                }
                header_seen = true;
                continue;
            }
            if (j.at("record") != "entry") throw std::invalid_argument("expected an entry record");
            rel = j.at("file").get<std::string>();
        } catch (const std::exception& e) {
            throw FixtureError(index_path.string(), line_no, e.what());
        }
        corpus.tokens.push_back(read_fixture(dir / rel));
    }
    if (!header_seen) throw FixtureError(index_path.string(), line_no, "missing corpus header");
    return corpus;
}

}  // namespace poolscope
