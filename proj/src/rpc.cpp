#include "poolscope/rpc.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <thread>

#include <httplib.h>

#include "poolscope/error.hpp"
#include "poolscope/hex.hpp"

namespace poolscope {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

bool is_range_error(const nlohmann::json& error) {
    if (!error.is_object()) return false;
    // -32005 is the EIP-1474 "limit exceeded" code; providers also reuse -32602/-32000 with a message.
    if (error.contains("code") && error["code"].is_number_integer() && error["code"].get<int>() == -32005) {
        return true;
    }
    if (!error.contains("message") || !error["message"].is_string()) return false;
    const std::string msg = lower(error["message"].get<std::string>());
    for (const char* needle : {"query returned more than", "block range", "range too large", "too many results",
                               "limit exceeded", "response size exceeded", "exceed maximum block range"}) {
        if (msg.find(needle) != std::string::npos) return true;
    }
    return false;
}

HttpRpcClient::HttpRpcClient(std::string endpoint, std::chrono::seconds timeout) : timeout_(timeout) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must include a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_port_ = endpoint;
        path_ = "/";
    } else {
        scheme_host_port_ = endpoint.substr(0, path_start);
        path_ = endpoint.substr(path_start);
    }
}

nlohmann::json HttpRpcClient::call(const std::string& method, const nlohmann::json& params) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    const nlohmann::json request = {{"jsonrpc", "2.0"}, {"id", 1}, {"method", method}, {"params", params}};
    auto res = client.Post(path_, request.dump(), "application/json");
    if (!res) {
        throw TransientRpcError(method + ": transport failure (" + httplib::to_string(res.error()) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
        throw TransientRpcError(method + ": HTTP " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw IngestError(method + ": HTTP " + std::to_string(res->status));
    }
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw TransientRpcError(method + ": unparseable response body");
    }
    if (body.contains("error") && !body["error"].is_null()) {
        if (is_range_error(body["error"])) throw RangeTooLarge(method + ": " + body["error"].dump());
        throw IngestError(method + ": " + body["error"].dump());
    }
    if (!body.contains("result")) throw IngestError(method + ": response has no result");
    return body["result"];
}

RetryingTransport::RetryingTransport(RpcTransport& inner, RetryPolicy policy, Sleeper sleeper)
    : inner_(inner), policy_(policy), sleep_(std::move(sleeper)) {
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

nlohmann::json RetryingTransport::call(const std::string& method, const nlohmann::json& params) {
    auto delay = policy_.base_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            return inner_.call(method, params);
        } catch (const TransientRpcError& e) {
            if (attempt >= policy_.max_attempts) {
                throw IngestError(method + ": giving up after " + std::to_string(attempt) + " attempts: " + e.what());
            }
            sleep_(delay);
            delay = std::min(delay * 2, policy_.max_backoff);
        }
    }
}

namespace {

nlohmann::json filter_params(const LogFilter& f, std::uint64_t from, std::uint64_t to) {
    nlohmann::json obj;
    obj["fromBlock"] = to_quantity(from);
    obj["toBlock"] = to_quantity(to);
    if (f.addresses.size() == 1) {
        obj["address"] = f.addresses.front().hex();
    } else if (!f.addresses.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& a : f.addresses) arr.push_back(a.hex());
        obj["address"] = arr;
    }
    if (!f.topic0_any.empty()) {
        nlohmann::json t0 = nlohmann::json::array();
        for (const auto& t : f.topic0_any) t0.push_back(word_hex(t));
        obj["topics"] = nlohmann::json::array({t0});
    }
    return nlohmann::json::array({obj});
}

void fetch_range(RpcTransport& rpc, const LogFilter& f, std::uint64_t from, std::uint64_t to,
                 std::vector<RawLog>& out) {
    try {
        const auto result = rpc.call("eth_getLogs", filter_params(f, from, to));
        if (!result.is_array()) throw IngestError("eth_getLogs: result is not an array");
        for (const auto& entry : result) {
            if (entry.value("removed", false)) continue;
            out.push_back(raw_log_from_json(entry));
        }
    } catch (const RangeTooLarge&) {
        if (from == to) throw IngestError("eth_getLogs: provider rejects even a single block " + std::to_string(from));
        const std::uint64_t mid = from + (to - from) / 2;
        fetch_range(rpc, f, from, mid, out);
        fetch_range(rpc, f, mid + 1, to, out);
    }
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> split(std::uint64_t from, std::uint64_t to,
                                                           std::uint64_t span) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> parts;
    for (std::uint64_t lo = from;; lo += span) {
        const std::uint64_t hi = (to - lo < span - 1) ? to : lo + span - 1;
        parts.emplace_back(lo, hi);
        if (hi == to) break;
    }
    return parts;
}

}  // namespace

std::vector<RawLog> fetch_logs(RpcTransport& rpc, const LogFilter& filter, const FetchOptions& opts) {
    if (filter.from_block > filter.to_block) return {};

    const std::uint64_t total = filter.to_block - filter.from_block + 1;
    std::uint64_t span = opts.max_span == 0 ? total : opts.max_span;
    const unsigned shards = std::max(1u, opts.shards);
    if (shards > 1) span = std::min(span, (total + shards - 1) / shards);
    const auto parts = split(filter.from_block, filter.to_block, span);

    std::vector<std::vector<RawLog>> results(parts.size());
    if (shards == 1 || parts.size() == 1) {
        for (std::size_t i = 0; i < parts.size(); ++i) fetch_range(rpc, filter, parts[i].first, parts[i].second, results[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::future<void>> workers;
        for (unsigned w = 0; w < std::min<std::size_t>(shards, parts.size()); ++w) {
            workers.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < parts.size(); i = next++) {
                    fetch_range(rpc, filter, parts[i].first, parts[i].second, results[i]);
                }
            }));
        }
        for (auto& w : workers) w.get();
    }

    std::vector<RawLog> merged;
    for (auto& r : results) merged.insert(merged.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    std::stable_sort(merged.begin(), merged.end(), [](const RawLog& a, const RawLog& b) { return a.key() < b.key(); });
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
}

std::int64_t fetch_block_timestamp(RpcTransport& rpc, std::uint64_t block) {
    const auto result = rpc.call("eth_getBlockByNumber", nlohmann::json::array({to_quantity(block), false}));
    if (!result.is_object() || !result.contains("timestamp")) {
        throw IngestError("eth_getBlockByNumber: no timestamp for block " + std::to_string(block));
    }
    return static_cast<std::int64_t>(parse_quantity(result["timestamp"].get<std::string>()));
}

std::optional<std::uint8_t> fetch_decimals(RpcTransport& rpc, const Address& token) {
    try {
        const nlohmann::json call_obj = {{"to", token.hex()}, {"data", "0x313ce567"}};
        const auto result = rpc.call("eth_call", nlohmann::json::array({call_obj, "latest"}));
        const auto bytes = hex_decode(result.get<std::string>());
        if (bytes.size() != 32) return std::nullopt;
        for (std::size_t i = 0; i < 31; ++i) {
            if (bytes[i] != 0) return std::nullopt;
        }
        return bytes[31];
    } catch (const IngestError&) {
        return std::nullopt;
    } catch (const ConfigError&) {
        return std::nullopt;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

}  // namespace poolscope
