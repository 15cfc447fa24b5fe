#include "frogz/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "frogz/analysis.hpp"
#include "frogz/error.hpp"
#include "frogz/frog.hpp"
#include "frogz/rumor.hpp"

#ifndef FROGZ_VERSION
#define FROGZ_VERSION "0.0.0"
#endif

namespace frogz::cli {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Parsing helpers

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_real(std::string_view text) {
    const std::string s(trim(text));
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
}

std::int64_t parse_integer(std::string_view text) {
    const double v = parse_real(text);
    if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9.0e15)
        throw UsageError("not an integer: '" + std::string(trim(text)) + "'");
    return static_cast<std::int64_t>(v);
}

std::pair<std::string, std::string> split_spec(std::string_view text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos)
        throw UsageError("expected KIND:PARAMS, got '" + std::string(text) + "'");
    return {std::string(trim(text.substr(0, colon))), std::string(trim(text.substr(colon + 1)))};
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        if (part.empty()) continue;
        out.push_back(parse_real(part));
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::vector<std::int64_t> parse_int_list(std::string_view text) {
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() < 2 || parts.size() > 3)
            throw UsageError("grid must be FROM:TO or FROM:TO:PER_DECADE");
        const auto per = parts.size() == 3 ? parse_integer(parts[2]) : 1;
        if (per < 1 || per > 1000) throw UsageError("points per decade must lie in [1, 1000]");
        return log_grid(parse_integer(parts[0]), parse_integer(parts[1]), static_cast<int>(per));
    }
    std::vector<std::int64_t> out;
    for (auto part : split(text, ',')) {
        if (part.empty()) continue;
        out.push_back(parse_integer(part));
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

OccupancyLaw parse_occupancy(std::string_view text) {
    const auto [kind, params] = split_spec(text);
    OccupancyLaw law;
    if (kind == "const" || kind == "constant")
        law = ConstantOccupancy{parse_integer(params)};
    else if (kind == "bernoulli")
        law = BernoulliOccupancy{parse_real(params)};
    else if (kind == "poisson")
        law = PoissonOccupancy{parse_real(params)};
    else if (kind == "geometric")
        law = GeometricOccupancy{parse_real(params)};
    else
        throw UsageError("unknown occupancy law '" + kind + "' (expected const|bernoulli|poisson|geometric)");
    validate(law);
    return law;
}

PiLaw parse_pi_law(std::string_view text) {
    const auto [kind, params] = split_spec(text);
    PiLaw law;
    if (kind == "point") {
        law = PointMass{parse_real(params)};
    } else if (kind == "beta") {
        const auto v = parse_real_list(params);
        if (v.size() != 2) throw UsageError("beta law needs two parameters: beta:A,B");
        law = BetaLaw{v[0], v[1]};
    } else {
        throw UsageError("unknown survival-parameter law '" + kind + "' (expected beta|point)");
    }
    validate(law);
    return law;
}

RadiusModel parse_radius(std::string_view text) {
    const auto [kind, params] = split_spec(text);
    RadiusModel model;
    if (kind == "bernoulli") {
        model = BernoulliRadius{parse_real(params)};
    } else if (kind == "geometric") {
        model = GeometricTail{parse_real(params)};
    } else if (kind == "powerlaw") {
        model = PowerLawTail{parse_real(params)};
    } else if (kind == "pmf") {
        const auto pmf = parse_real_list(params);
        double total = 0.0;
        for (double p : pmf) {
            if (!(p >= 0.0)) throw UsageError("pmf entries must be non-negative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw UsageError("pmf entries must sum to 1");
        auto tail = std::make_shared<std::vector<double>>(pmf.size() + 1, 0.0);
        for (std::size_t n = pmf.size(); n-- > 0;) (*tail)[n] = (*tail)[n + 1] + pmf[n];
        (*tail)[0] = 1.0;
        model = AnalyticTail{[tail](std::int64_t n) {
            if (n <= 0) return 1.0;
            return static_cast<std::size_t>(n) < tail->size() ? (*tail)[static_cast<std::size_t>(n)] : 0.0;
        }};
    } else {
        throw UsageError("unknown radius law '" + kind + "' (expected bernoulli|geometric|powerlaw|pmf)");
    }
    validate(model);
    return model;
}

// ---------------------------------------------------------------------------
// Output

namespace {

const std::vector<std::string> kFixedColumns = {"alpha", "beta",     "occupancy", "engine",
                                                "window", "reps",    "estimate",  "ci_lo",
                                                "ci_hi",  "seed",    "tag"};

using Echo = std::vector<std::pair<std::string, std::string>>;

struct Table {
    std::vector<std::string> extra_columns;
    std::vector<std::vector<std::string>> rows;  // fixed columns then extras
};

struct Report {
    std::string command;
    std::uint64_t seed = 0;
    Echo config;
    ojson json;   // body for --format json
    Table table;  // body for --format csv
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render_csv(const Report& r) {
    std::ostringstream os;
    os << "# frogz " << FROGZ_VERSION << " " << r.command << "\n";
    os << "# seed=" << r.seed << "\n";
    for (const auto& [k, v] : r.config) os << "# " << k << "=" << v << "\n";
    bool first = true;
    for (const auto& c : kFixedColumns) {
        os << (first ? "" : ",") << c;
        first = false;
    }
    for (const auto& c : r.table.extra_columns) os << "," << c;
    os << "\n";
    for (const auto& row : r.table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
        os << "\n";
    }
    return os.str();
}

std::string render_json(const Report& r) {
    ojson doc = r.json;
    ojson meta;
    meta["tool"] = "frogz";
    meta["version"] = FROGZ_VERSION;
    meta["command"] = r.command;
    meta["seed"] = r.seed;
    ojson cfg = ojson::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    meta["config"] = cfg;
    doc["meta"] = meta;
    return doc.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& text) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        f << text;
        f.flush();
        if (!f) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, target);
}

std::string num(double v) { return format_number(v); }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

ojson json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

// Fixed-column prefix of a CSV row.
struct Prefix {
    std::string alpha, beta, occupancy, engine, window, reps, estimate, ci_lo, ci_hi, seed, tag;

    std::vector<std::string> cells() const {
        return {alpha, beta, occupancy, engine, window, reps, estimate, ci_lo, ci_hi, seed, tag};
    }
};

std::vector<std::string> row(const Prefix& p, std::vector<std::string> extras = {}) {
    auto cells = p.cells();
    cells.insert(cells.end(), extras.begin(), extras.end());
    return cells;
}

// ---------------------------------------------------------------------------
// Options

struct Options {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
    std::string format;
    std::string config;

    double alpha = 1.0;
    double beta = 0.5;
    std::string pi;
    std::string occupancy = "const:1";
    std::string engine = "exact";
    std::string sampler = "range";
    std::int64_t window = 100;
    std::uint64_t reps = 1000;
    std::uint64_t step_budget = 0;

    std::string n_grid = "10:1e6:2";
    std::string mean_eta;
    std::string alpha_grid = "0.5,1,2";
    std::string beta_grid = "0.25,0.5,0.75";
    std::string windows = "100,1000,10000";

    std::string process = "fw";
    std::string radius = "bernoulli:0.9";
    bool dp = false;
    std::int64_t r_max = 64;
    std::int64_t n_max = 10000;
};

unsigned effective_threads(unsigned t) {
    if (t == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }
    return t;
}

std::string default_format(const std::string& command) {
    if (command == "alpha0" || command == "frog" || command == "rumor" || command == "couple" ||
        command == "series")
        return "json";
    return "csv";
}

PiLaw pi_law_of(const Options& o) {
    if (!o.pi.empty()) return parse_pi_law(o.pi);
    PiLaw law = BetaLaw{o.alpha, o.beta};
    validate(law);
    return law;
}

Prefix pi_prefix(const PiLaw& law) {
    Prefix p;
    if (const auto* b = std::get_if<BetaLaw>(&law)) {
        p.alpha = num(b->alpha);
        p.beta = num(b->beta);
    }
    return p;
}

std::string tag_of(const PiLaw& law, const OccupancyLaw& occ) {
    if (const auto* b = std::get_if<BetaLaw>(&law)) return std::string(to_string(classify_cell(b->alpha, b->beta, occ)));
    return "";
}

WalkSampler parse_sampler(const std::string& s) {
    if (s == "range") return WalkSampler::RangeJump;
    if (s == "step") return WalkSampler::Stepwise;
    throw UsageError("unknown sampler '" + s + "' (expected range|step)");
}

void require_positive(std::int64_t v, const char* what) {
    if (v < 1) throw UsageError(std::string(what) + " must be >= 1");
}

FrogConfig frog_config_of(const Options& o) {
    FrogConfig c;
    c.window = o.window;
    c.engine = parse_engine(o.engine);
    c.occupancy = parse_occupancy(o.occupancy);
    c.pi_law = pi_law_of(o);
    c.step_budget = o.step_budget;
    c.sampler = parse_sampler(o.sampler);
    c.seed.master_seed = o.seed;
    require_positive(c.window, "--window");
    validate(c);
    return c;
}

Echo law_echo(const Options& o) {
    Echo e;
    if (o.pi.empty()) {
        e.emplace_back("alpha", num(o.alpha));
        e.emplace_back("beta", num(o.beta));
    } else {
        e.emplace_back("pi", o.pi);
    }
    e.emplace_back("occupancy", o.occupancy);
    return e;
}

// ---------------------------------------------------------------------------
// Commands

Report cmd_tail(const Options& o) {
    Report r;
    const auto grid = parse_int_list(o.n_grid);
    const OccupancyLaw occ = parse_occupancy(o.occupancy);
    const CriterionReport rep = criterion_check(o.alpha, o.beta, occ, grid);
    const ScaledTailCurve curve = scaled_tail_curve(o.alpha, o.beta, grid);
    r.config = {{"alpha", num(o.alpha)}, {"beta", num(o.beta)}, {"occupancy", o.occupancy},
                {"n-grid", o.n_grid}};
    const std::string tag(to_string(classify_cell(o.alpha, o.beta, occ)));
    r.table.extra_columns = {"n", "tail", "scaled_tail", "scaled_star_bound"};
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < rep.n.size(); ++i) {
        const double tail = rep.scaled_right[i] / static_cast<double>(rep.n[i]);
        Prefix p;
        p.alpha = num(o.alpha);
        p.beta = num(o.beta);
        p.occupancy = describe(occ);
        p.engine = "quadrature";
        p.estimate = num(rep.scaled_right[i]);
        p.seed = num(o.seed);
        p.tag = tag;
        r.table.rows.push_back(row(p, {num(rep.n[i]), num(tail), num(rep.scaled_right[i]),
                                       num(rep.scaled_star_bound[i])}));
        rows.push_back({{"n", rep.n[i]},
                        {"tail", json_number(tail)},
                        {"scaled_tail", json_number(rep.scaled_right[i])},
                        {"scaled_star_bound", json_number(rep.scaled_star_bound[i])}});
    }
    r.json["alpha"] = o.alpha;
    r.json["beta"] = o.beta;
    r.json["tag"] = tag;
    r.json["rows"] = rows;
    r.json["trend"] = std::string(to_string(curve.trend));
    r.json["terminal_slope"] = json_number(rep.terminal_slope);
    r.json["survival_threshold"] = json_number(rep.survival_threshold);
    r.json["extinction_threshold"] = json_number(rep.extinction_threshold);
    r.json["verdict"] = std::string(to_string(rep.verdict));
    r.json["note"] = rep.note;
    return r;
}

Report cmd_alpha0(const Options& o) {
    Report r;
    if (o.mean_eta.empty()) throw UsageError("alpha0 requires --mean-eta");
    const double mean = parse_real(o.mean_eta);
    const double a0 = alpha0(mean);
    r.config = {{"mean-eta", format_number(mean)}};
    if (a0 == 0.0)
        r.json["alpha0"] = 0;
    else
        r.json["alpha0"] = a0;
    r.json["mean_eta"] = json_number(mean);
    if (std::isfinite(mean)) r.json["residual"] = beta_function(a0, 0.5) - mean * std::sqrt(2.0);
    Prefix p;
    p.beta = "0.5";
    p.estimate = num(a0);
    p.seed = num(o.seed);
    r.table.extra_columns = {"mean_eta", "alpha0"};
    r.table.rows.push_back(row(p, {format_number(mean), num(a0)}));
    return r;
}

Report cmd_frog(const Options& o, unsigned threads) {
    Report r;
    const FrogConfig config = frog_config_of(o);
    if (o.reps < 1) throw UsageError("--reps must be >= 1");
    r.config = law_echo(o);
    r.config.emplace_back("engine", o.engine);
    r.config.emplace_back("sampler", o.sampler);
    r.config.emplace_back("window", num(o.window));
    r.config.emplace_back("reps", num(o.reps));
    r.config.emplace_back("step-budget", num(config.effective_step_budget()));

    const auto runs = run_replications(config, o.reps, threads);
    const SurvivalEstimate est = summarize_survival(runs, config.window);
    std::uint64_t truncations = 0, root_visits = 0;
    for (const auto& run : runs) {
        truncations += run.truncation_events;
        root_visits += run.root_visit_count;
    }
    const std::string tag = tag_of(config.pi_law, config.occupancy);

    r.json["window"] = config.window;
    r.json["replications"] = est.replications;
    r.json["survivors"] = est.survivors;
    r.json["estimate"] = est.estimate;
    r.json["ci_lo"] = est.ci_lo;
    r.json["ci_hi"] = est.ci_hi;
    r.json["engine"] = o.engine;
    r.json["tag"] = tag;
    r.json["truncation_events"] = truncations;
    r.json["mean_root_visits"] = static_cast<double>(root_visits) / static_cast<double>(runs.size());

    r.table.extra_columns = {"replication", "activated_left", "activated_right", "reached_left",
                             "reached_right", "root_visits", "particles", "truncations"};
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& run = runs[i];
        Prefix p = pi_prefix(config.pi_law);
        p.occupancy = describe(config.occupancy);
        p.engine = o.engine;
        p.window = num(config.window);
        p.reps = num(o.reps);
        p.estimate = run.survived() ? "1" : "0";
        p.seed = num(o.seed);
        p.tag = tag;
        r.table.rows.push_back(row(p, {num(static_cast<std::uint64_t>(i)), num(run.activated_left),
                                       num(run.activated_right), run.reached_left_boundary ? "1" : "0",
                                       run.reached_right_boundary ? "1" : "0",
                                       num(run.root_visit_count), num(run.particles_activated),
                                       num(run.truncation_events)}));
    }
    return r;
}

Report cmd_phase(const Options& o, unsigned threads) {
    Report r;
    PhaseDiagramSpec spec;
    spec.alphas = parse_real_list(o.alpha_grid);
    spec.betas = parse_real_list(o.beta_grid);
    spec.occupancy = parse_occupancy(o.occupancy);
    spec.windows = parse_int_list(o.windows);
    for (auto w : spec.windows) require_positive(w, "--windows entries");
    spec.replications = o.reps;
    if (o.reps < 1) throw UsageError("--reps must be >= 1");
    spec.engine = parse_engine(o.engine);
    spec.master_seed = o.seed;
    for (double a : spec.alphas)
        for (double b : spec.betas) validate(PiLaw{BetaLaw{a, b}});
    r.config = {{"alpha-grid", o.alpha_grid}, {"beta-grid", o.beta_grid}, {"occupancy", o.occupancy},
                {"windows", o.windows},       {"reps", num(o.reps)},      {"engine", o.engine}};

    const auto cells = phase_diagram(spec, threads);
    r.table.extra_columns = {"survivors"};
    ojson rows = ojson::array();
    for (const auto& c : cells) {
        Prefix p;
        p.alpha = num(c.alpha);
        p.beta = num(c.beta);
        p.occupancy = describe(spec.occupancy);
        p.engine = std::string(to_string(c.engine));
        p.window = num(c.window);
        p.reps = num(c.replications);
        p.estimate = num(c.estimate.estimate);
        p.ci_lo = num(c.estimate.ci_lo);
        p.ci_hi = num(c.estimate.ci_hi);
        p.seed = num(o.seed);
        p.tag = std::string(to_string(c.tag));
        r.table.rows.push_back(row(p, {num(c.estimate.survivors)}));
        rows.push_back({{"alpha", c.alpha},
                        {"beta", c.beta},
                        {"window", c.window},
                        {"replications", c.replications},
                        {"survivors", c.estimate.survivors},
                        {"estimate", c.estimate.estimate},
                        {"ci_lo", c.estimate.ci_lo},
                        {"ci_hi", c.estimate.ci_hi},
                        {"tag", std::string(to_string(c.tag))}});
    }
    r.json["cells"] = rows;
    return r;
}

Report cmd_rumor(const Options& o, unsigned threads) {
    Report r;
    const RumorProcess process = parse_rumor_process(o.process);
    const OccupancyLaw occ = parse_occupancy(o.occupancy);
    const RadiusModel radius = parse_radius(o.radius);
    require_positive(o.window, "--window");
    r.config = {{"process", o.process}, {"radius", o.radius}, {"occupancy", o.occupancy},
                {"window", num(o.window)}};
    Prefix p;
    p.occupancy = describe(occ);
    p.engine = std::string(to_string(process));
    p.window = num(o.window);
    p.seed = num(o.seed);
    r.table.extra_columns = {"method", "radius"};
    r.json["process"] = std::string(to_string(process));
    r.json["radius"] = o.radius;
    r.json["window"] = o.window;
    if (o.dp) {
        if (process != RumorProcess::Firework)
            throw UsageError("--dp is only available for --process fw");
        r.config.emplace_back("dp", "true");
        r.config.emplace_back("r-max", num(o.r_max));
        const auto pmf = radius_pmf(occ, radius, o.r_max);
        const double prob = fw_reach_probability_dp(pmf, o.window);
        r.json["method"] = "dp";
        r.json["r_max"] = o.r_max;
        r.json["probability"] = prob;
        p.estimate = num(prob);
        r.table.rows.push_back(row(p, {"dp", o.radius}));
        return r;
    }
    if (o.reps < 1) throw UsageError("--reps must be >= 1");
    r.config.emplace_back("reps", num(o.reps));
    SeedSpec seed;
    seed.master_seed = o.seed;
    const auto est = estimate_rumor_reach(process, occ, radius, o.window, o.reps, seed, threads);
    r.json["method"] = "monte-carlo";
    r.json["replications"] = est.trials;
    r.json["hits"] = est.hits;
    r.json["probability"] = est.estimate;
    r.json["ci_lo"] = est.ci_lo;
    r.json["ci_hi"] = est.ci_hi;
    p.reps = num(est.trials);
    p.estimate = num(est.estimate);
    p.ci_lo = num(est.ci_lo);
    p.ci_hi = num(est.ci_hi);
    r.table.rows.push_back(row(p, {"monte-carlo", o.radius}));
    return r;
}

Report cmd_series(const Options& o) {
    Report r;
    const OccupancyLaw occ = parse_occupancy(o.occupancy);
    const RadiusModel radius = parse_radius(o.radius);
    const SeriesDiagnostic d = series_criterion(occ, radius, o.n_max);
    r.config = {{"radius", o.radius}, {"occupancy", o.occupancy}, {"n-max", num(o.n_max)}};
    r.json["radius"] = o.radius;
    r.json["n_max"] = d.n_max;
    r.json["decay_exponent"] = json_number(d.decay_exponent);
    r.json["classification"] = std::string(to_string(d.classification));
    r.json["squared_classification"] = std::string(to_string(d.squared_classification));
    r.json["partial_sum"] = json_number(d.partial_sums.back());
    r.json["squared_partial_sum"] = json_number(d.squared_partial_sums.back());
    r.json["tail_liminf_proxy"] = json_number(d.tail_liminf_proxy);
    r.json["tail_limsup_proxy"] = json_number(d.tail_limsup_proxy);
    r.json["inverse_mean"] = json_number(d.inverse_mean);
    r.json["fw_percolation_predicted"] = d.fw_percolation_predicted();
    r.json["bfw_extinction_certified"] = d.bfw_extinction_certified();
    Prefix p;
    p.occupancy = describe(occ);
    p.engine = "series";
    p.window = num(d.n_max);
    p.estimate = num(d.decay_exponent);
    p.seed = num(o.seed);
    r.table.extra_columns = {"radius", "classification", "squared_classification", "partial_sum",
                             "squared_partial_sum"};
    r.table.rows.push_back(row(p, {o.radius, std::string(to_string(d.classification)),
                                   std::string(to_string(d.squared_classification)),
                                   num(d.partial_sums.back()), num(d.squared_partial_sums.back())}));
    return r;
}

Report cmd_couple(const Options& o, unsigned threads, bool& violated) {
    Report r;
    if (o.reps < 1) throw UsageError("--reps must be >= 1");
    FrogConfig frog = frog_config_of(o);
    const OccupancyLaw occ = parse_occupancy(o.occupancy);
    const RadiusModel radius = parse_radius(o.radius);
    r.config = law_echo(o);
    r.config.emplace_back("radius", o.radius);
    r.config.emplace_back("window", num(o.window));
    r.config.emplace_back("reps", num(o.reps));
    r.config.emplace_back("sampler", o.sampler);

    SeedSpec seed;
    seed.master_seed = o.seed;
    const RumorCouplingAudit rumor = audit_rumor_coupling(occ, radius, o.window, o.reps, seed, threads);
    const EngineNestingAudit engines = audit_engine_nesting(frog, o.reps, threads);
    const std::uint64_t total = rumor.violations() + engines.violations();
    violated = total > 0;

    r.json["violations"] = total;
    r.json["rumor"] = {{"runs", rumor.runs},
                       {"fw_reached", rumor.fw_reached},
                       {"bfw_reached", rumor.bfw_reached},
                       {"fw_star_reached", rumor.fw_star_reached},
                       {"fw_not_in_bfw", rumor.fw_not_in_bfw},
                       {"bfw_not_in_fw_star", rumor.bfw_not_in_fw_star},
                       {"set_violations", rumor.set_violations}};
    r.json["engines"] = {{"runs", engines.runs},
                         {"right_only_survived", engines.right_only_survived},
                         {"exact_survived", engines.exact_survived},
                         {"star_upper_survived", engines.star_upper_survived},
                         {"right_only_not_exact", engines.right_only_not_exact},
                         {"exact_not_star_upper", engines.exact_not_star_upper},
                         {"interval_violations", engines.interval_violations}};

    r.table.extra_columns = {"chain", "violations"};
    Prefix rp;
    rp.occupancy = describe(occ);
    rp.engine = "fw<=bfw<=fw-star";
    rp.window = num(o.window);
    rp.reps = num(o.reps);
    rp.seed = num(o.seed);
    r.table.rows.push_back(row(rp, {"rumor", num(rumor.violations())}));
    Prefix fp = pi_prefix(frog.pi_law);
    fp.occupancy = describe(frog.occupancy);
    fp.engine = "right-only<=exact<=star-upper";
    fp.window = num(o.window);
    fp.reps = num(o.reps);
    fp.seed = num(o.seed);
    fp.tag = tag_of(frog.pi_law, frog.occupancy);
    r.table.rows.push_back(row(fp, {"engines", num(engines.violations())}));
    return r;
}

Report cmd_recurrence(const Options& o, unsigned threads) {
    Report r;
    FrogConfig tmpl = frog_config_of(o);
    const auto ladder = parse_int_list(o.windows);
    for (auto w : ladder) require_positive(w, "--windows entries");
    if (o.reps < 1) throw UsageError("--reps must be >= 1");
    r.config = law_echo(o);
    r.config.emplace_back("engine", o.engine);
    r.config.emplace_back("sampler", o.sampler);
    r.config.emplace_back("windows", o.windows);
    r.config.emplace_back("reps", num(o.reps));

    const RecurrenceProfile prof = recurrence_profile(tmpl, ladder, o.reps, threads);
    const std::string tag = tag_of(tmpl.pi_law, tmpl.occupancy);
    r.table.extra_columns = {"survivors", "mean_root_visits", "mean_census"};
    ojson rows = ojson::array();
    for (const auto& row_data : prof.rows) {
        const SurvivalEstimate est = [&] {
            SurvivalEstimate e;
            e.estimate = static_cast<double>(row_data.survivors) / static_cast<double>(row_data.replications);
            const Interval ci = wilson_interval(row_data.survivors, row_data.replications);
            e.ci_lo = ci.lo;
            e.ci_hi = ci.hi;
            return e;
        }();
        Prefix p = pi_prefix(tmpl.pi_law);
        p.occupancy = describe(tmpl.occupancy);
        p.engine = o.engine;
        p.window = num(row_data.window);
        p.reps = num(row_data.replications);
        p.estimate = num(est.estimate);
        p.ci_lo = num(est.ci_lo);
        p.ci_hi = num(est.ci_hi);
        p.seed = num(o.seed);
        p.tag = tag;
        const std::string visits = row_data.mean_root_visits ? num(*row_data.mean_root_visits) : "";
        const std::string census = row_data.mean_census ? num(*row_data.mean_census) : "";
        r.table.rows.push_back(row(p, {num(row_data.survivors), visits, census}));
        ojson j = {{"window", row_data.window},
                   {"replications", row_data.replications},
                   {"survivors", row_data.survivors},
                   {"estimate", est.estimate},
                   {"ci_lo", est.ci_lo},
                   {"ci_hi", est.ci_hi}};
        j["mean_root_visits"] = row_data.mean_root_visits ? ojson(*row_data.mean_root_visits) : ojson();
        j["mean_census"] = row_data.mean_census ? ojson(*row_data.mean_census) : ojson();
        rows.push_back(j);
    }
    r.json["tag"] = tag;
    r.json["rows"] = rows;
    return r;
}

// Flat key=value file; keys are long option names without the dashes.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string_view::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        out.emplace_back(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
    }
    return out;
}

void apply_config_file(CLI::App& app, CLI::App& sub, const std::string& path) {
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "config") throw UsageError("config files cannot include other config files");
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (!opt) opt = app.get_option_no_throw("--" + key);
        if (!opt) throw UsageError("unknown key '" + key + "' in config file for '" + sub.get_name() + "'");
        if (opt->count() > 0) continue;  // the command line wins
        opt->add_result(value);
        opt->run_callback();
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    if (const char* env = std::getenv("FROGZ_SEED")) {
        try {
            o.seed = std::stoull(env);
        } catch (const std::exception&) {
            err << "error: FROGZ_SEED is not an unsigned integer: '" << env << "'\n";
            return kUsage;
        }
    }

    CLI::App app{"Frog model with Beta-distributed geometric lifetimes on Z, and firework rumor processes"};
    app.set_version_flag("--version", std::string(FROGZ_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", o.seed, "master seed (default: $FROGZ_SEED or 0)");
    app.add_option("--threads", o.threads, "worker threads; 0 uses all cores")->capture_default_str();
    app.add_option("--out", o.out, "write output to this file (atomically) instead of stdout");
    app.add_option("--format", o.format, "csv or json (default depends on the command)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--config", o.config, "flat key=value file; command-line flags override it");

    auto add_law = [&o](CLI::App* s) {
        s->add_option("--alpha", o.alpha, "Beta law alpha")->capture_default_str();
        s->add_option("--beta", o.beta, "Beta law beta")->capture_default_str();
        s->add_option("--pi", o.pi, "survival-parameter law, beta:A,B or point:P (overrides --alpha/--beta)");
        s->add_option("--occupancy", o.occupancy, "const:K | bernoulli:Q | poisson:L | geometric:S")
            ->capture_default_str();
    };
    auto add_frog = [&o](CLI::App* s) {
        s->add_option("--engine", o.engine, "exact | marginal | right-only | star-upper")->capture_default_str();
        s->add_option("--sampler", o.sampler, "range (exact range-jump) | step (literal walk)")
            ->capture_default_str();
        s->add_option("--step-budget", o.step_budget, "jumps per particle for the step sampler; 0 = 10 cap^2");
    };

    auto* tail = app.add_subcommand("tail", "scaled tail n P(D-> >= n) under Beta(alpha, beta) and criterion check");
    tail->add_option("--alpha", o.alpha)->capture_default_str();
    tail->add_option("--beta", o.beta)->capture_default_str();
    tail->add_option("--occupancy", o.occupancy)->capture_default_str();
    tail->add_option("--n-grid", o.n_grid, "comma list or FROM:TO[:PER_DECADE]")->capture_default_str();

    auto* a0 = app.add_subcommand("alpha0", "survival threshold alpha0 on the beta = 1/2 line");
    a0->add_option("--mean-eta", o.mean_eta, "mean occupancy, or inf");

    auto* frog = app.add_subcommand("frog", "survival estimate on [-N, N]");
    add_law(frog);
    add_frog(frog);
    frog->add_option("--window", o.window)->capture_default_str();
    frog->add_option("--reps", o.reps)->capture_default_str();

    auto* phase = app.add_subcommand("phase", "phase-diagram sweep");
    phase->add_option("--alpha-grid", o.alpha_grid)->capture_default_str();
    phase->add_option("--beta-grid", o.beta_grid)->capture_default_str();
    phase->add_option("--occupancy", o.occupancy)->capture_default_str();
    phase->add_option("--windows", o.windows)->capture_default_str();
    phase->add_option("--reps", o.reps)->capture_default_str();
    phase->add_option("--engine", o.engine)->capture_default_str();

    auto* rumor = app.add_subcommand("rumor", "firework reach probability");
    rumor->add_option("--process", o.process, "fw | bfw | bfw-star")->capture_default_str();
    rumor->add_option("--radius", o.radius, "bernoulli:Q | geometric:R | powerlaw:C | pmf:P0,P1,...")
        ->capture_default_str();
    rumor->add_option("--occupancy", o.occupancy, "spreaders per vertex")->capture_default_str();
    rumor->add_option("--window", o.window)->capture_default_str();
    rumor->add_option("--reps", o.reps)->capture_default_str();
    rumor->add_flag("--dp", o.dp, "exact dynamic programme instead of Monte Carlo (fw only)");
    rumor->add_option("--r-max", o.r_max, "radius truncation for --dp")->capture_default_str();

    auto* series = app.add_subcommand("series", "series percolation criteria for FW and BFW");
    series->add_option("--radius", o.radius)->capture_default_str();
    series->add_option("--occupancy", o.occupancy)->capture_default_str();
    series->add_option("--n-max", o.n_max)->capture_default_str();

    auto* couple = app.add_subcommand("couple", "shared-randomness coupling audits");
    add_law(couple);
    couple->add_option("--sampler", o.sampler)->capture_default_str();
    couple->add_option("--radius", o.radius, "rumor radius law (default powerlaw:2)");
    couple->add_option("--window", o.window)->capture_default_str();
    couple->add_option("--reps", o.reps)->capture_default_str();

    auto* rec = app.add_subcommand("recurrence", "root visits and return census over a window ladder");
    add_law(rec);
    add_frog(rec);
    rec->add_option("--windows", o.windows)->capture_default_str();
    rec->add_option("--reps", o.reps)->capture_default_str();

    bool reps_given = false;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    int status = kOk;
    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!o.config.empty()) apply_config_file(app, *sub, o.config);
        reps_given = sub->get_option_no_throw("--reps") && sub->get_option_no_throw("--reps")->count() > 0;
        const std::string command = sub->get_name();
        if (command == "couple") {
            // audits default to 10^4 runs and a radius law that percolates
            if (!reps_given) o.reps = 10000;
            if (sub->get_option("--radius")->count() == 0) o.radius = "powerlaw:2";
        }
        const unsigned threads = effective_threads(o.threads);

        Report report;
        bool violated = false;
        if (command == "tail") report = cmd_tail(o);
        else if (command == "alpha0") report = cmd_alpha0(o);
        else if (command == "frog") report = cmd_frog(o, threads);
        else if (command == "phase") report = cmd_phase(o, threads);
        else if (command == "rumor") report = cmd_rumor(o, threads);
        else if (command == "series") report = cmd_series(o);
        else if (command == "couple") report = cmd_couple(o, threads, violated);
        else if (command == "recurrence") report = cmd_recurrence(o, threads);
        report.command = command;
        report.seed = o.seed;

        const std::string format = o.format.empty() ? default_format(command) : o.format;
        const std::string text = format == "json" ? render_json(report) : render_csv(report);
        if (o.out.empty())
            out << text;
        else
            write_atomically(o.out, text);
        if (violated) {
            err << "coupling audit found violations\n";
            status = kAuditViolation;
        }
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return status;
}

}  // namespace frogz::cli
