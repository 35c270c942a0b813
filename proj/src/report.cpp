#include "poolscope/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "poolscope/error.hpp"
#include "poolscope/fixture.hpp"
#include "poolscope/metrics.hpp"
#include "poolscope/synthetic.hpp"

namespace poolscope {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::string join(const std::vector<std::string>& cells, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += sep;
        out += cells[i];
    }
    return out;
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) { text_ = join(header) + "\n"; }
    void row(const std::vector<std::string>& cells) { text_ += join(cells) + "\n"; }
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

// JSON numbers go through format_number so files stay stable across platforms.
ordered_json jnum(double v) { return ordered_json::parse(std::isfinite(v) ? format_number(v) : "null"); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d)) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    }
    return d;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw ConfigError("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is out of range: '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    if (v.empty()) return out;
    for (const auto& part : split(v, ',')) out.push_back(parse_u64(key, part));
    return out;
}

std::string to_hex(const unsigned char* p, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out += digits[p[i] >> 4];
        out += digits[p[i] & 0xf];
    }
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const std::string& bytes) { EVP_DigestUpdate(ctx_, bytes.data(), bytes.size()); }
    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        return to_hex(md, len);
    }

private:
    EVP_MD_CTX* ctx_;
};

}  // namespace

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

const std::map<std::string, std::string>& ConfigMap::defaults() {
    static const std::map<std::string, std::string> d{
        {"mode", "fixture"},
        {"rpc_url", ""},
        {"rpc_secret", ""},
        {"corpus", "data/synthetic_corpus"},
        {"out", "out"},
        {"weth", mainnet_weth},
        {"factory", "0x5c69bee701ef814a2b6a3edd4b1652cb9cc5aa6f"},
        {"from_block", ""},
        {"to_block", ""},
        {"chunk_blocks", "10000"},
        {"entry_swap", "60"},
        {"investment", "0.016"},
        {"gas", "0.002"},
        {"tiers", "200:2,300:1.5,400:1.2"},
        {"late_window_start", "800"},
        {"late_multiplier", "1"},
        {"hard_cutoff", "1500"},
        {"impact_mode", "counterfactual"},
        {"strict_amm", "false"},
        {"ntv_swaps", "1,10,60,100,200,500,1000"},
        {"return_start", "60"},
        {"detect_tol", "0.05"},
        {"dx_eps", "0.1"},
        {"pool_x", "1"},
        {"pool_y", "100000000"},
        {"eta", "0.01"},
        {"basis", "swap"},
        {"window", "100"},
        {"k", "3"},
        {"elbow_ks", "1,2,3,4,5,6"},
        {"seed", std::to_string(default_cluster_seed)},
        {"max_iters", "300"},
        {"dtw_band", ""},
        {"cluster_labels", "all"},
        {"threads", "0"},
    };
    return d;
}

ConfigMap::ConfigMap() {
    for (const auto& [k, v] : defaults()) entries_[k] = {v, "default"};
}

void ConfigMap::set(const std::string& key, const std::string& value, const std::string& source) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second = {value, source};
}

void ConfigMap::apply_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(number) + ": expected key=value");
        }
        try {
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), "file");
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

void ConfigMap::apply_file(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
    apply_text(read_file(path), path.string());
}

void ConfigMap::apply_env(const EnvLookup& env) {
    for (auto& [key, entry] : entries_) {
        std::string name = "POOLSCOPE_";
        for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (auto v = env(name)) entry = {*v, "env"};
    }
}

const std::string& ConfigMap::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second.value;
}

std::vector<Tier> parse_tiers(const std::string& text) {
    std::vector<Tier> tiers;
    for (const auto& part : split(text, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw ConfigError("tier '" + part + "' must look like upper:multiplier");
        tiers.push_back({parse_u64("tiers", trim(part.substr(0, colon))), parse_double("tiers", trim(part.substr(colon + 1)))});
    }
    return tiers;
}

std::string format_tiers(const std::vector<Tier>& tiers) {
    std::vector<std::string> parts;
    for (const auto& t : tiers) parts.push_back(std::to_string(t.upper_swap) + ":" + format_number(t.multiplier));
    return join(parts);
}

RunConfig to_run_config(const ConfigMap& m) {
    RunConfig c;
    c.mode = m.get("mode");
    if (c.mode != "fixture" && c.mode != "live") throw ConfigError("mode must be fixture or live");
    c.rpc_url = m.get("rpc_url");
    c.rpc_secret = m.get("rpc_secret");
    c.corpus = m.get("corpus");
    c.out = m.get("out");
    c.weth = m.get("weth");
    c.factory = m.get("factory");
    if (!m.get("from_block").empty()) c.from_block = parse_u64("from_block", m.get("from_block"));
    if (!m.get("to_block").empty()) c.to_block = parse_u64("to_block", m.get("to_block"));
    c.chunk_blocks = parse_u64("chunk_blocks", m.get("chunk_blocks"));

    auto& s = c.strategy;
    s.entry_swap = parse_u64("entry_swap", m.get("entry_swap"));
    s.investment = parse_double("investment", m.get("investment"));
    s.gas = parse_double("gas", m.get("gas"));
    s.tiers = parse_tiers(m.get("tiers"));
    s.late_window_start = parse_u64("late_window_start", m.get("late_window_start"));
    s.late_multiplier = parse_double("late_multiplier", m.get("late_multiplier"));
    s.hard_cutoff = parse_u64("hard_cutoff", m.get("hard_cutoff"));
    const auto& impact = m.get("impact_mode");
    if (impact == "counterfactual") {
        s.impact_mode = ImpactMode::counterfactual;
    } else if (impact == "injected") {
        s.impact_mode = ImpactMode::injected;
    } else {
        throw ConfigError("impact_mode must be counterfactual or injected");
    }
    s.strict_amm = parse_bool("strict_amm", m.get("strict_amm"));
    s.validate();

    c.ntv_swaps = parse_sizes("ntv_swaps", m.get("ntv_swaps"));
    c.return_start = parse_u64("return_start", m.get("return_start"));
    c.detect_tol = parse_double("detect_tol", m.get("detect_tol"));
    if (!(c.detect_tol > 0.0 && c.detect_tol < 1.0)) throw ConfigError("detect_tol must lie in (0, 1)");
    c.dx_eps = parse_double("dx_eps", m.get("dx_eps"));
    c.pool_x = parse_double("pool_x", m.get("pool_x"));
    c.pool_y = parse_double("pool_y", m.get("pool_y"));
    c.eta = parse_double("eta", m.get("eta"));
    if (!(c.pool_x > 0.0 && c.pool_y > 0.0 && c.dx_eps >= 0.0)) throw ConfigError("pool_x, pool_y must be positive and dx_eps non-negative");
    if (!(c.eta >= 0.0 && c.eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");

    const auto& basis = m.get("basis");
    if (basis == "swap") {
        c.basis = TimeBasis::swap;
    } else if (basis == "physical") {
        c.basis = TimeBasis::physical;
    } else {
        throw ConfigError("basis must be swap or physical");
    }
    c.window = parse_u64("window", m.get("window"));
    c.k = parse_u64("k", m.get("k"));
    c.elbow_ks = parse_sizes("elbow_ks", m.get("elbow_ks"));
    c.seed = parse_u64("seed", m.get("seed"));
    c.max_iters = parse_u64("max_iters", m.get("max_iters"));
    if (!m.get("dtw_band").empty()) c.dtw_band = parse_u64("dtw_band", m.get("dtw_band"));
    c.cluster_labels = m.get("cluster_labels");
    if (c.cluster_labels != "all" && c.cluster_labels != "honeypot" && c.cluster_labels != "sellable") {
        throw ConfigError("cluster_labels must be all, honeypot or sellable");
    }
    if (c.window == 0 || c.k == 0) throw ConfigError("window and k must be positive");
    c.threads = static_cast<unsigned>(parse_u64("threads", m.get("threads")));
    return c;
}

ordered_json config_json(const ConfigMap& map) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, entry] : map.entries()) {
        const bool secret = key == "rpc_secret" && !entry.value.empty();
        j[key] = {{"value", secret ? "<redacted>" : entry.value}, {"source", entry.source}};
    }
    return j;
}

std::string sha256_hex(const std::string& bytes) {
    Sha256 h;
    h.update(bytes);
    return h.hex();
}

std::string corpus_hash(const fs::path& dir) {
    const auto index = corpus_index_path(dir);
    if (!fs::exists(index)) throw ConfigError("corpus index not found: " + index.string());
    const std::string index_text = read_file(index);
    Sha256 h;
    h.update(index_text);
    std::istringstream in(index_text);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ConfigError("corrupt corpus index line: " + line);
        if (j.value("record", "") != "entry") continue;
        const std::string file = j.at("file").get<std::string>();
        h.update(file);
        h.update(std::string(1, '\0'));
        h.update(read_file(dir / file));
    }
    return h.hex();
}

std::string write_text(const fs::path& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    out << content;
    return name;
}

std::vector<std::string> emit_backtest(const fs::path& dir, const AggregateReport& rep) {
    Csv outcomes({"token", "label", "entered", "exit_swap", "exit_reason", "tokens_bought", "revenue", "profit"});
    for (const auto& o : rep.outcomes) {
        outcomes.row({o.token, to_string(o.label), o.entered ? "true" : "false",
                      o.exit_swap ? std::to_string(*o.exit_swap) : "", o.exit_reason(), num(o.tokens_bought),
                      num(o.revenue), num(o.profit)});
    }

    auto agg = [](const LabelAggregate& a) {
        return ordered_json{{"tokens", a.tokens},           {"entered", a.entered},
                            {"positive", a.positive},       {"invested", jnum(a.invested)},
                            {"profit", jnum(a.profit)},     {"percent_profit", jnum(a.percent_profit())},
                            {"percent_positive", jnum(a.percent_positive())}};
    };
    const auto& cfg = rep.config;
    ordered_json j;
    j["strategy"] = {{"entry_swap", cfg.entry_swap},
                     {"investment", jnum(cfg.investment)},
                     {"gas", jnum(cfg.gas)},
                     {"tiers", format_tiers(cfg.tiers)},
                     {"late_window_start", cfg.late_window_start},
                     {"late_multiplier", jnum(cfg.late_multiplier)},
                     {"hard_cutoff", cfg.hard_cutoff},
                     {"impact_mode", to_string(cfg.impact_mode)},
                     {"strict_amm", cfg.strict_amm}};
    j["all"] = agg(rep.all);
    j["by_label"] = ordered_json::object();
    for (const auto& [label, a] : rep.by_label) j["by_label"][to_string(label)] = agg(a);
    j["exit_reasons"] = ordered_json::object();
    for (const auto& [reason, n] : rep.exit_reasons) j["exit_reasons"][reason] = n;
    j["max_profit"] = jnum(rep.max_profit);

    Csv hist({"lo", "hi", "count"});
    const auto& h = rep.profit_histogram;
    for (std::size_t i = 0; i < h.counts.size(); ++i) hist.row({num(h.edges[i]), num(h.edges[i + 1]), num(h.counts[i])});
    j["profit_histogram"] = {{"underflow", h.underflow}, {"overflow", h.overflow}};

    return {write_text(dir, "backtest_outcomes.csv", outcomes.text()),
            write_text(dir, "backtest_summary.json", j.dump(2) + "\n"),
            write_text(dir, "backtest_profit_histogram.csv", hist.text())};
}

std::vector<std::string> emit_ntv(const fs::path& dir, const Corpus& corpus, const RunConfig& cfg) {
    Csv totals({"n_swaps", "label", "value", "tokens", "share", "skipped"});
    for (auto n : cfg.ntv_swaps) {
        const auto t = ntv_total(corpus, n);
        for (const auto& [label, slot] : t.by_label) {
            totals.row({num(n), to_string(label), num(slot.value), num(slot.tokens), num(slot.share), num(t.skipped)});
        }
        totals.row({num(n), "total", num(t.total), num(corpus.tokens.size() - t.skipped), "1", num(t.skipped)});
    }

    Csv max_rows({"token", "label", "swaps", "max_ntv", "max_swap", "liquidity", "max_negative", "any_negative"});
    Csv rugs({"token", "label", "block", "tx_index", "log_index", "removed_fraction", "price_before", "next_swap_price",
              "price_jump"});
    for (const auto& s : corpus.tokens) {
        const std::string token = s.pair.pair.hex();
        if (s.swap_count() > 0) {
            const auto m = max_ntv_with_liquidity(s);
            max_rows.row({token, to_string(s.label), num(s.swap_count()), num(m.value), num(m.swap), num(m.liquidity),
                          m.max_negative ? "true" : "false", m.any_negative ? "true" : "false"});
        }
        for (const auto& rp : rug_pull_scan(s)) {
            rugs.row({token, to_string(s.label), std::to_string(rp.key.block), std::to_string(rp.key.tx_index),
                      std::to_string(rp.key.log_index), num(rp.removed_fraction), num(rp.price_before),
                      rp.next_swap_price ? num(*rp.next_swap_price) : "", rp.price_jump ? num(*rp.price_jump) : ""});
        }
    }

    Csv returns({"start_swap", "n_swaps", "tokens", "mean", "stddev"});
    std::vector<std::size_t> ns;
    for (std::size_t n = 1; n <= 1000; n = n < 10 ? n + 1 : n < 100 ? n + 10 : n + 100) ns.push_back(n);
    for (std::size_t start : {std::size_t{0}, cfg.return_start}) {
        for (const auto& p : return_statistics(corpus, start, ns)) {
            returns.row({num(start), num(p.n_swaps), num(p.tokens), num(p.mean), num(p.stddev)});
        }
    }

    const auto d = lifetime_and_size_distributions(corpus);
    auto hist_json = [](const Histogram& h) {
        ordered_json e = ordered_json::array();
        for (double v : h.edges) e.push_back(jnum(v));
        return ordered_json{{"edges", e}, {"counts", h.counts}, {"underflow", h.underflow}, {"overflow", h.overflow}};
    };
    ordered_json dj;
    dj["swap_counts"] = ordered_json::object();
    for (const auto& [label, h] : d.swap_counts) dj["swap_counts"][to_string(label)] = hist_json(h);
    dj["swap_counts_all"] = hist_json(d.swap_counts_all);
    dj["median_swaps"] = ordered_json::object();
    for (const auto& [label, m] : d.median_swaps) dj["median_swaps"][to_string(label)] = jnum(m);
    dj["weth_amounts"] = hist_json(d.weth_amounts);
    dj["buys"] = d.buys;
    dj["sells"] = d.sells;

    Csv daily({"day_start", "creations"});
    for (const auto& [day, n] : d.creations_per_day) daily.row({std::to_string(day), num(n)});
    Csv hourly({"hour_start", "creations"});
    for (const auto& [hour, n] : d.creations_per_hour) hourly.row({std::to_string(hour), num(n)});
    Csv hourly_dist({"creations_per_hour", "hours"});
    for (const auto& [c, n] : d.hourly_creation_distribution) hourly_dist.row({num(c), num(n)});

    return {write_text(dir, "ntv_totals.csv", totals.text()),
            write_text(dir, "ntv_max.csv", max_rows.text()),
            write_text(dir, "rug_pulls.csv", rugs.text()),
            write_text(dir, "log_returns.csv", returns.text()),
            write_text(dir, "distributions.json", dj.dump(2) + "\n"),
            write_text(dir, "creations_daily.csv", daily.text()),
            write_text(dir, "creations_hourly.csv", hourly.text()),
            write_text(dir, "creations_hourly_distribution.csv", hourly_dist.text())};
}

std::vector<std::string> emit_sandwich_scan(const fs::path& dir, const std::vector<DetectedSandwich>& found) {
    Csv csv({"pair", "block", "front_log_index", "victim_log_index", "back_log_index", "front_swap", "back_swap",
             "front_tokens", "back_tokens", "mismatch"});
    for (const auto& d : found) {
        csv.row({d.pair, std::to_string(d.block), std::to_string(d.front_log_index),
                 d.victim_log_index ? std::to_string(*d.victim_log_index) : "", std::to_string(d.back_log_index),
                 num(d.front_swap), num(d.back_swap), num(d.front_tokens), num(d.back_tokens), num(d.mismatch)});
    }
    return {write_text(dir, "sandwiches.csv", csv.text())};
}

ordered_json sandwich_opt_json(const RunConfig& cfg) {
    const double r = cfg.strategy.fee.factor();
    const double f = cfg.strategy.fee.fraction();
    const double x = cfg.pool_x;
    ordered_json j;
    j["inputs"] = {{"x", jnum(x)}, {"y", jnum(cfg.pool_y)}, {"r", jnum(r)}, {"dx_eps", jnum(cfg.dx_eps)}, {"eta", jnum(cfg.eta)}};
    const auto grid = grid_optimize(cfg.dx_eps, x, r);
    if (const auto opt = optimal_attack(cfg.dx_eps, x, f)) {
        j["closed_form"] = {{"dx_a_max", jnum(opt->dx_a_max)},
                            {"s_max", jnum(opt->s_max)},
                            {"s_at_dx_a_max", jnum(gain_closed_form(opt->dx_a_max, cfg.dx_eps, x, r))}};
        j["grid"] = {{"dx_a", jnum(grid.dx_a)},
                     {"s", jnum(grid.s)},
                     {"argmax_rel_error", jnum(std::abs(grid.dx_a - opt->dx_a_max) / opt->dx_a_max)},
                     {"max_rel_error", jnum(std::abs(grid.s - opt->s_max) / opt->s_max)}};
    } else {
        j["closed_form"] = "no_profitable_attack";
        j["grid"] = {{"dx_a", jnum(grid.dx_a)}, {"s", jnum(grid.s)}};
    }
    j["slippage_constrained_dx_a"] = jnum(slippage_constrained_optimum(cfg.dx_eps, x, cfg.pool_y, f, cfg.eta));
    const auto loss = asymptotic_loss(x, f);
    j["asymptotic_loss"] = {{"exact", jnum(loss.exact)}, {"first_order", jnum(loss.first_order)}};
    j["high_liquidity_limit_per_weth"] = jnum(high_liquidity_limit(1.0, r));
    return j;
}

std::vector<std::string> emit_sandwich_opt(const fs::path& dir, const RunConfig& cfg) {
    const double r = cfg.strategy.fee.factor();
    const double f = cfg.strategy.fee.fraction();
    Csv sweep({"dx_eps", "dx_a_max", "s_max", "grid_dx_a", "grid_s"});
    for (double m : {0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
        const double e = m * f * cfg.pool_x;
        const auto opt = optimal_attack(e, cfg.pool_x, f);
        const auto grid = grid_optimize(e, cfg.pool_x, r);
        sweep.row({num(e), opt ? num(opt->dx_a_max) : "", opt ? num(opt->s_max) : "", num(grid.dx_a), num(grid.s)});
    }
    return {write_text(dir, "sandwich_opt.json", sandwich_opt_json(cfg).dump(2) + "\n"),
            write_text(dir, "sandwich_opt_sweep.csv", sweep.text())};
}

std::vector<std::string> emit_cluster(const fs::path& dir, const Corpus& corpus, const RunConfig& cfg) {
    std::vector<NormalizedSeries> data;
    for (const auto& s : corpus.tokens) {
        if (cfg.cluster_labels != "all" && to_string(s.label) != cfg.cluster_labels) continue;
        if (cfg.basis == TimeBasis::swap) {
            if (auto n = to_swap_time(s, cfg.window)) data.push_back(std::move(*n));
        } else if (s.swap_count() > 0) {
            data.push_back(to_physical_time(s));
        }
    }
    if (data.size() < cfg.k) {
        throw ConfigError("only " + std::to_string(data.size()) + " series qualify for clustering with k = " +
                          std::to_string(cfg.k));
    }
    const bool swap_basis = cfg.basis == TimeBasis::swap;
    const auto model = swap_basis ? kmeans(data, cfg.k, cfg.seed, cfg.max_iters)
                                  : dtw_cluster(data, cfg.k, cfg.seed, cfg.max_iters, cfg.dtw_band);

    Csv assign({"token", "label", "cluster", "length", "degenerate"});
    std::vector<Label> labels;
    for (std::size_t i = 0; i < data.size(); ++i) {
        labels.push_back(data[i].label);
        assign.row({data[i].token, to_string(data[i].label), num(model.assignments[i]), num(data[i].values.size()),
                    data[i].degenerate ? "true" : "false"});
    }
    Csv centers({"cluster", "index", "value"});
    for (std::size_t c = 0; c < model.centers.size(); ++c) {
        for (std::size_t t = 0; t < model.centers[c].size(); ++t) centers.row({num(c), num(t + 1), num(model.centers[c][t])});
    }
    Csv bands({"cluster", "axis", "mean", "stddev", "members"});
    const auto b = cluster_bands(model, data);
    for (std::size_t c = 0; c < b.size(); ++c) {
        for (std::size_t t = 0; t < b[c].axis.size(); ++t) {
            bands.row({num(c), num(b[c].axis[t]), num(b[c].mean[t]), num(b[c].stddev[t]), num(b[c].members[t])});
        }
    }
    Csv comp({"cluster", "honeypot", "sellable", "unknown", "pct_honeypot", "pct_sellable", "pct_unknown"});
    const auto rows = cluster_composition(model, labels);
    for (std::size_t c = 0; c < rows.size(); ++c) {
        comp.row({num(c), num(rows[c].honeypot), num(rows[c].sellable), num(rows[c].unknown), num(rows[c].pct_honeypot),
                  num(rows[c].pct_sellable), num(rows[c].pct_unknown)});
    }
    std::vector<std::size_t> ks;
    for (auto k : cfg.elbow_ks) {
        if (k >= 1 && k <= data.size()) ks.push_back(k);
    }
    Csv elbow_csv({"k", "value"});
    if (!ks.empty()) {
        for (const auto& p : elbow(data, ks, model.method, cfg.seed, cfg.max_iters, cfg.dtw_band)) {
            elbow_csv.row({num(p.k), num(p.value)});
        }
    }

    ordered_json mj{{"k", model.k},
                    {"basis", to_string(model.basis)},
                    {"method", to_string(model.method)},
                    {"labels", cfg.cluster_labels},
                    {"seed", model.seed},
                    {"series", data.size()},
                    {"objective", jnum(model.objective)},
                    {"iterations", model.iterations},
                    {"sizes", model.cluster_sizes()}};
    if (!model.medoids.empty()) {
        ordered_json med = ordered_json::array();
        for (auto m : model.medoids) med.push_back(data[m].token);
        mj["medoids"] = med;
    }

    std::vector<std::string> files{write_text(dir, "cluster_assignments.csv", assign.text()),
                                   write_text(dir, "cluster_centers.csv", centers.text()),
                                   write_text(dir, "cluster_bands.csv", bands.text()),
                                   write_text(dir, "cluster_composition.csv", comp.text()),
                                   write_text(dir, "cluster_elbow.csv", elbow_csv.text())};
    if (swap_basis && cfg.window >= 2) {
        const auto pca = pca_project(data, 2);
        Csv coords({"token", "label", "cluster", "pc1", "pc2"});
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            coords.row({data[i].token, to_string(data[i].label), num(model.assignments[i]), num(pca.coordinates(r, 0)),
                        num(pca.coordinates(r, 1))});
        }
        files.push_back(write_text(dir, "cluster_pca.csv", coords.text()));
        mj["pca_eigenvalues"] = {jnum(pca.eigenvalues(0)), jnum(pca.eigenvalues(1))};
    }
    files.push_back(write_text(dir, "cluster_model.json", mj.dump(2) + "\n"));
    return files;
}

void run_report(const ConfigMap& map) {
    const RunConfig cfg = to_run_config(map);
    CorpusMeta meta;
    const Corpus corpus = read_corpus(cfg.corpus, &meta);
    const std::string hash = corpus_hash(cfg.corpus);

    std::vector<std::string> files;
    auto add = [&](std::vector<std::string> names) { files.insert(files.end(), names.begin(), names.end()); };
    add(emit_backtest(cfg.out, run_corpus(corpus, cfg.strategy)));
    add(emit_ntv(cfg.out, corpus, cfg));
    add(emit_sandwich_scan(cfg.out, detect_corpus(corpus, cfg.detect_tol)));
    add(emit_sandwich_opt(cfg.out, cfg));
    add(emit_cluster(cfg.out, corpus, cfg));

    ordered_json manifest;
    manifest["corpus_hash"] = hash;
    manifest["tokens"] = corpus.tokens.size();
    manifest["config"] = config_json(map);
    manifest["files"] = ordered_json::array();
    for (const auto& f : files) {
        manifest["files"].push_back({{"name", f}, {"sha256", sha256_hex(read_file(cfg.out / f))}});
    }
    write_text(cfg.out, "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace poolscope
