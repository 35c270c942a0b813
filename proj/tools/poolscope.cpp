// poolscope command-line entry point.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poolscope/backtest.hpp"
#include "poolscope/error.hpp"
#include "poolscope/fixture.hpp"
#include "poolscope/ingest.hpp"
#include "poolscope/parallel.hpp"
#include "poolscope/report.hpp"
#include "poolscope/sandwich.hpp"
#include "poolscope/synthetic.hpp"

namespace fs = std::filesystem;
using namespace poolscope;

namespace {

// Flags that map one-to-one onto config keys.
class Bindings {
public:
    void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        auto* opt = app->add_option(flag, values_[key], help + " [" + key + "]");
        bound_.push_back({opt, key});
    }
    void apply(ConfigMap& map) const {
        for (const auto& [opt, key] : bound_) {
            if (opt->count() > 0) map.set(key, values_.at(key), "cli");
        }
    }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::pair<CLI::Option*, std::string>> bound_;
};

void bind_corpus(Bindings& b, CLI::App* app) {
    b.bind(app, "--corpus", "corpus", "Corpus directory");
}

void bind_out(Bindings& b, CLI::App* app) { b.bind(app, "--out", "out", "Output directory"); }

void bind_strategy(Bindings& b, CLI::App* app) {
    b.bind(app, "--entry-swap", "entry_swap", "Swap after which the bot buys");
    b.bind(app, "--investment", "investment", "WETH invested per token");
    b.bind(app, "--gas", "gas", "Gas per transaction in WETH");
    b.bind(app, "--tiers", "tiers", "Threshold tiers as upper:multiplier,...");
    b.bind(app, "--late-window-start", "late_window_start", "First swap of the late window");
    b.bind(app, "--late-multiplier", "late_multiplier", "Threshold multiplier in the late window");
    b.bind(app, "--hard-cutoff", "hard_cutoff", "Sales are considered while n < cutoff");
    b.bind(app, "--impact-mode", "impact_mode", "counterfactual | injected");
    b.bind(app, "--strict-amm", "strict_amm", "Value the exit without the extra fee factor (true|false)");
}

void bind_cluster(Bindings& b, CLI::App* app) {
    b.bind(app, "--basis", "basis", "swap | physical");
    b.bind(app, "--window", "window", "Swap-time window length");
    b.bind(app, "--k", "k", "Number of clusters");
    b.bind(app, "--elbow-ks", "elbow_ks", "k values for the elbow curve");
    b.bind(app, "--seed", "seed", "Seed recorded in the model (k-means++ draws)");
    b.bind(app, "--max-iters", "max_iters", "Iteration cap");
    b.bind(app, "--dtw-band", "dtw_band", "Sakoe-Chiba band for DTW");
    b.bind(app, "--labels", "cluster_labels", "all | honeypot | sellable");
}

void bind_sandwich_opt(Bindings& b, CLI::App* app) {
    b.bind(app, "--dx-eps", "dx_eps", "Victim WETH input");
    b.bind(app, "--x", "pool_x", "WETH reserve before the attack");
    b.bind(app, "--y", "pool_y", "Token reserve before the attack");
    b.bind(app, "--eta", "eta", "Victim slippage tolerance");
}

int fail(const std::string& kind, const std::string& message, ExitCode code) {
    nlohmann::json j{{"error", kind}, {"message", message}, {"exit_code", static_cast<int>(code)}};
    std::cerr << j.dump() << "\n";
    return static_cast<int>(code);
}

void print(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

std::string endpoint(const RunConfig& cfg) {
    std::string url = cfg.rpc_url;
    const std::string placeholder = "{secret}";
    if (const auto pos = url.find(placeholder); pos != std::string::npos) url.replace(pos, placeholder.size(), cfg.rpc_secret);
    return url;
}

int run_ingest(const RunConfig& cfg, const std::string& labels_path) {
    if (cfg.mode == "fixture") {
        CorpusMeta meta;
        const auto corpus = read_corpus(cfg.corpus, &meta);
        print({{"mode", "fixture"}, {"noop", true}, {"tokens", corpus.tokens.size()}, {"corpus_hash", corpus_hash(cfg.corpus)}});
        return 0;
    }
    if (cfg.rpc_url.empty()) throw ConfigError("live ingest needs rpc_url");
    if (!cfg.from_block || !cfg.to_block) throw ConfigError("live ingest needs from_block and to_block");

    IngestConfig ic;
    ic.weth = Address::from_hex(cfg.weth);
    ic.factory = Address::from_hex(cfg.factory);
    ic.from_block = *cfg.from_block;
    ic.to_block = *cfg.to_block;
    ic.chunk_blocks = cfg.chunk_blocks;
    ic.fetch.shards = std::max(1u, max_threads());
    if (!labels_path.empty()) ic.labels = read_labels(labels_path);

    HttpRpcClient http(endpoint(cfg));
    RetryingTransport rpc(http, RetryPolicy{});
    const auto s = ingest_to_corpus(rpc, ic, cfg.corpus);
    print({{"mode", "live"},
           {"from_block", s.from_block},
           {"to_block", s.to_block},
           {"new_pairs", s.new_pairs},
           {"new_events", s.new_events},
           {"skipped", s.skipped},
           {"noop", s.noop}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"poolscope: Uniswap V2 new-token pool analytics"};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "Flat key=value config file");
    Bindings b;
    b.bind(&app, "--threads", "threads", "Worker thread cap (0 = all cores)");

    auto* ingest = app.add_subcommand("ingest", "Fetch pair histories into a corpus");
    bind_corpus(b, ingest);
    b.bind(ingest, "--mode", "mode", "fixture | live");
    b.bind(ingest, "--rpc-url", "rpc_url", "JSON-RPC endpoint; {secret} is replaced by POOLSCOPE_RPC_SECRET");
    b.bind(ingest, "--from-block", "from_block", "First block (inclusive)");
    b.bind(ingest, "--to-block", "to_block", "Last block (inclusive)");
    b.bind(ingest, "--weth", "weth", "WETH address");
    b.bind(ingest, "--factory", "factory", "Factory address");
    b.bind(ingest, "--chunk-blocks", "chunk_blocks", "Checkpoint granularity in blocks");
    std::string labels_path;
    ingest->add_option("--labels", labels_path, "CSV of address,label[,source]");

    auto* backtest = app.add_subcommand("backtest", "Replay the threshold strategy");
    bind_corpus(b, backtest);
    bind_out(b, backtest);
    bind_strategy(b, backtest);

    auto* ntv = app.add_subcommand("ntv", "Net traded value, rug pulls, returns and distributions");
    bind_corpus(b, ntv);
    bind_out(b, ntv);
    b.bind(ntv, "--ntv-swaps", "ntv_swaps", "Swap counts for NTV totals");
    b.bind(ntv, "--return-start", "return_start", "Start swap for lagged returns");

    auto* scan = app.add_subcommand("sandwich-scan", "Detect same-block sandwiches");
    bind_corpus(b, scan);
    bind_out(b, scan);
    b.bind(scan, "--tol", "detect_tol", "Relative token-amount mismatch tolerance");

    auto* opt = app.add_subcommand("sandwich-opt", "Optimal front-run size for a pool");
    bind_sandwich_opt(b, opt);
    std::string opt_out;
    opt->add_option("--out", opt_out, "Also write sandwich_opt.json and the sweep CSV here");

    auto* cluster = app.add_subcommand("cluster", "Cluster normalized price trajectories");
    bind_corpus(b, cluster);
    bind_out(b, cluster);
    bind_cluster(b, cluster);

    auto* report = app.add_subcommand("report", "Run every analysis into one directory with a manifest");
    bind_corpus(b, report);
    bind_out(b, report);
    bind_strategy(b, report);
    bind_cluster(b, report);
    b.bind(report, "--tol", "detect_tol", "Sandwich mismatch tolerance");

    auto* gen = app.add_subcommand("generate-synthetic", "Write the deterministic synthetic corpus");
    std::string gen_out;
    std::uint64_t gen_seed = SyntheticOptions{}.seed;
    std::size_t gen_tokens = SyntheticOptions{}.tokens;
    gen->add_option("--out", gen_out, "Corpus directory to write")->required();
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--tokens", gen_tokens, "Number of pairs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("UsageError", e.what(), ExitCode::config);
    }

    try {
        ConfigMap map;
        if (!config_file.empty()) map.apply_file(config_file);
        map.apply_env(process_env());
        b.apply(map);
        const RunConfig cfg = to_run_config(map);
        set_max_threads(cfg.threads);

        if (*gen) {
            SyntheticOptions o;
            o.seed = gen_seed;
            o.tokens = gen_tokens;
            const auto s = generate_synthetic_corpus(o);
            write_corpus(gen_out, s.corpus, s.meta);
            print({{"tokens", s.corpus.tokens.size()},
                   {"planted_sandwiches", s.sandwiches.size()},
                   {"rug_pulls", s.rug_pulls.size()},
                   {"corpus_hash", corpus_hash(gen_out)}});
            return 0;
        }
        if (*ingest) return run_ingest(cfg, labels_path);
        if (*opt) {
            print(sandwich_opt_json(cfg));
            if (!opt_out.empty()) emit_sandwich_opt(opt_out, cfg);
            return 0;
        }
        if (*report) {
            run_report(map);
            print({{"out", cfg.out.string()}, {"manifest", (cfg.out / "manifest.json").string()}});
            return 0;
        }

        const Corpus corpus = read_corpus(cfg.corpus);
        ordered_json j{{"corpus_hash", corpus_hash(cfg.corpus)}, {"tokens", corpus.tokens.size()}};
        std::vector<std::string> files;
        if (*backtest) {
            const auto rep = run_corpus(corpus, cfg.strategy);
            files = emit_backtest(cfg.out, rep);
            j["entered"] = rep.all.entered;
            j["profit"] = ordered_json::parse(format_number(rep.all.profit));
            j["percent_profit"] = ordered_json::parse(format_number(rep.all.percent_profit()));
        } else if (*ntv) {
            files = emit_ntv(cfg.out, corpus, cfg);
        } else if (*scan) {
            const auto found = detect_corpus(corpus, cfg.detect_tol);
            files = emit_sandwich_scan(cfg.out, found);
            j["detections"] = found.size();
        } else if (*cluster) {
            files = emit_cluster(cfg.out, corpus, cfg);
        }
        j["files"] = files;
        print(j);
        return 0;
    } catch (const Error& e) {
        return fail(e.kind(), e.what(), e.exit_code());
    } catch (const fs::filesystem_error& e) {
        return fail("FilesystemError", e.what(), ExitCode::config);
    } catch (const std::exception& e) {
        return fail("InternalError", e.what(), ExitCode::data_integrity);
    }
}
