#pragma once

// Run configuration and report emitters shared by the CLI subcommands.
//
// Config is a flat key=value map resolved with the precedence
// command line > POOLSCOPE_<KEY> environment variable > config file > default.
// All numbers are written with 9 significant digits.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poolscope/backtest.hpp"
#include "poolscope/clustering.hpp"
#include "poolscope/sandwich.hpp"

namespace poolscope {

using ordered_json = nlohmann::ordered_json;

/// "%.9g", with "nan"/"inf"/"-inf" spelled out and -0 printed as 0.
std::string format_number(double v);

struct ConfigEntry {
    std::string value;
    std::string source;  // default | file | env | cli
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

class ConfigMap {
public:
    /// Every recognised key with its built-in default.
    static const std::map<std::string, std::string>& defaults();

    ConfigMap();
    /// Lines of key=value; '#' starts a comment. Unknown keys throw ConfigError.
    void apply_file(const std::filesystem::path& path);
    void apply_text(const std::string& text, const std::string& origin);
    void apply_env(const EnvLookup& env);
    void set(const std::string& key, const std::string& value, const std::string& source);

    const std::string& get(const std::string& key) const;
    const std::map<std::string, ConfigEntry>& entries() const { return entries_; }

private:
    std::map<std::string, ConfigEntry> entries_;
};

struct RunConfig {
    std::string mode = "fixture";  // fixture | live
    std::string rpc_url;
    std::string rpc_secret;        // never echoed
    std::filesystem::path corpus;
    std::filesystem::path out;
    std::string weth;
    std::string factory;
    std::optional<std::uint64_t> from_block;
    std::optional<std::uint64_t> to_block;
    std::uint64_t chunk_blocks = 10000;
    StrategyConfig strategy;
    std::vector<std::size_t> ntv_swaps;
    std::size_t return_start = 60;
    double detect_tol = 0.05;
    double dx_eps = 0.1;
    double pool_x = 1.0;
    double pool_y = 1e8;
    double eta = 0.01;
    TimeBasis basis = TimeBasis::swap;
    std::size_t window = 100;
    std::size_t k = 3;
    std::vector<std::size_t> elbow_ks;
    std::uint64_t seed = default_cluster_seed;
    std::size_t max_iters = 300;
    std::optional<std::size_t> dtw_band;
    std::string cluster_labels = "all";  // all | honeypot | sellable
    unsigned threads = 0;
};

/// Typed view of a resolved map; malformed values throw ConfigError.
RunConfig to_run_config(const ConfigMap& map);
/// Resolved config with its sources; the RPC secret is redacted.
ordered_json config_json(const ConfigMap& map);

std::vector<Tier> parse_tiers(const std::string& text);  // "200:2,300:1.5"
std::string format_tiers(const std::vector<Tier>& tiers);

/// SHA-256 over index.jsonl and every pair file it lists, in index order.
std::string corpus_hash(const std::filesystem::path& corpus_dir);
std::string sha256_hex(const std::string& bytes);

/// Writes `content` and returns the file name relative to `dir`.
std::string write_text(const std::filesystem::path& dir, const std::string& name, const std::string& content);

// Emitters; each returns the names of the files written into `dir`.
std::vector<std::string> emit_backtest(const std::filesystem::path& dir, const AggregateReport& report);
std::vector<std::string> emit_ntv(const std::filesystem::path& dir, const Corpus& corpus, const RunConfig& cfg);
std::vector<std::string> emit_sandwich_scan(const std::filesystem::path& dir, const std::vector<DetectedSandwich>& found);
std::vector<std::string> emit_sandwich_opt(const std::filesystem::path& dir, const RunConfig& cfg);
std::vector<std::string> emit_cluster(const std::filesystem::path& dir, const Corpus& corpus, const RunConfig& cfg);

ordered_json sandwich_opt_json(const RunConfig& cfg);

/// Runs every analysis into cfg.out and writes manifest.json with the
/// resolved config, the corpus hash and a SHA-256 per output file.
void run_report(const ConfigMap& map);

}  // namespace poolscope
