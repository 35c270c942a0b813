#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poolscope/abi.hpp"
#include "poolscope/error.hpp"

namespace poolscope {

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_backoff{250};
    std::chrono::milliseconds max_backoff{8000};
};

/// Thrown by transports when the provider refuses a log query because the
/// result set or block span is too large. fetch_logs reacts by bisecting.
class RangeTooLarge : public IngestError {
public:
    using IngestError::IngestError;
};

/// Transport-level failure that is worth retrying (connection reset, 5xx, 429).
class TransientRpcError : public IngestError {
public:
    using IngestError::IngestError;
};

/// Minimal JSON-RPC surface. `call` returns the "result" member.
class RpcTransport {
public:
    virtual ~RpcTransport() = default;
    virtual nlohmann::json call(const std::string& method, const nlohmann::json& params) = 0;
};

/// JSON-RPC 2.0 over HTTP(S) POST. Stateless per call, so one instance can be
/// shared by concurrent shards.
class HttpRpcClient : public RpcTransport {
public:
    explicit HttpRpcClient(std::string endpoint, std::chrono::seconds timeout = std::chrono::seconds(30));
    nlohmann::json call(const std::string& method, const nlohmann::json& params) override;

private:
    std::string scheme_host_port_;
    std::string path_;
    std::chrono::seconds timeout_;
};

/// Wraps a transport, retrying TransientRpcError with exponential backoff.
class RetryingTransport : public RpcTransport {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    RetryingTransport(RpcTransport& inner, RetryPolicy policy, Sleeper sleeper = {});
    nlohmann::json call(const std::string& method, const nlohmann::json& params) override;

private:
    RpcTransport& inner_;
    RetryPolicy policy_;
    Sleeper sleep_;
};

struct LogFilter {
    std::vector<Address> addresses;  // empty = any contract
    std::vector<Word> topic0_any;    // empty = any event
    std::uint64_t from_block = 0;
    std::uint64_t to_block = 0;  // inclusive; from > to selects nothing
};

struct FetchOptions {
    std::uint64_t max_span = 0;  // 0 = ask for the whole range first
    unsigned shards = 1;         // concurrent sub-ranges
};

/// All logs matching the filter, ordered by (block, tx_index, log_index).
/// Ranges rejected as too large are split in half recursively.
std::vector<RawLog> fetch_logs(RpcTransport& rpc, const LogFilter& filter, const FetchOptions& opts = {});

std::int64_t fetch_block_timestamp(RpcTransport& rpc, std::uint64_t block);

/// ERC-20 decimals() via eth_call; nullopt when the call fails or is malformed.
std::optional<std::uint8_t> fetch_decimals(RpcTransport& rpc, const Address& token);

/// Recognises provider "too many results / range too large" error objects.
bool is_range_error(const nlohmann::json& error);

}  // namespace poolscope
