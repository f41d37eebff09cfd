// cheaptalk: command-line front end for the equilibrium solvers.
//
//   cheaptalk solve   --dist exponential --lambda 1 --bias 0 --bins 2
//   cheaptalk sweep   --over bins --from 1 --to 8 --dist exponential --bias 0.1
//   cheaptalk bounds  uniform --bias 0.05
//   cheaptalk exp     lstar --lambda 1 --bias 0.1
//   cheaptalk verify  --grid default --seed 7
//   cheaptalk export  --dist gaussian --bias 0.2 --max-bins 6 --out results/
//   cheaptalk replay  run.json
//
// JSON goes to stdout, diagnostics to stderr. Exit status: 0 success,
// 1 usage or input error, 2 no equilibrium / collapsed / failed check.

#include "cheaptalk/cheaptalk.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ct = cheaptalk;
using ct::io::Json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoEquilibrium = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DistOptions {
    std::string dist = "exponential";
    double lambda = 1.0;
    double mu = 0.0;
    double sigma = 1.0;
    double lower = 0.0;
    double upper = 1.0;
};

void add_dist_options(CLI::App* app, DistOptions& o) {
    app->add_option("--dist", o.dist, "exponential | gaussian | uniform | custom:<file>")->capture_default_str();
    app->add_option("--lambda", o.lambda, "exponential rate")->capture_default_str();
    app->add_option("--mu", o.mu, "gaussian mean")->capture_default_str();
    app->add_option("--sigma", o.sigma, "gaussian standard deviation")->capture_default_str();
    app->add_option("--lower", o.lower, "uniform lower bound")->capture_default_str();
    app->add_option("--upper", o.upper, "uniform upper bound")->capture_default_str();
}

ct::SourceDistribution make_distribution(const DistOptions& o) {
    if (o.dist == "exponential") return ct::SourceDistribution::exponential(o.lambda);
    if (o.dist == "gaussian") return ct::SourceDistribution::gaussian(o.mu, o.sigma);
    if (o.dist == "uniform") return ct::SourceDistribution::uniform(o.lower, o.upper);
    if (o.dist.rfind("custom:", 0) == 0) return ct::io::load_density(o.dist.substr(7));
    throw UsageError("unknown --dist '" + o.dist + "'");
}

void print(const Json& j) { std::cout << ct::io::dump(j); }

int status_exit(ct::SolveStatus s) { return s == ct::SolveStatus::Converged ? kExitOk : kExitNoEquilibrium; }

// ---------------------------------------------------------------- manifest

std::string option_key(const CLI::Option* opt) {
    if (!opt->get_lnames().empty()) return opt->get_lnames().front();
    return opt->get_name(true, false);
}

// Every option of `app` (given or defaulted), sorted by name. Flags record
// "true"/"false"; list options are comma-joined.
// Empty cell for costs that do not exist.
std::string csv_real(double x) { return std::isfinite(x) ? ct::io::format_real(x) : std::string(); }

std::map<std::string, std::string> collect_parameters(const CLI::App* app) {
    std::map<std::string, std::string> out;
    for (const CLI::Option* opt : app->get_options()) {
        const auto key = option_key(opt);
        if (key == "help" || key == "manifest") continue;
        if (opt->get_items_expected_max() == 0) {
            out[key] = opt->count() > 0 ? "true" : "false";
            continue;
        }
        if (opt->count() == 0) {
            out[key] = opt->get_default_str();
            continue;
        }
        std::string joined;
        for (const auto& r : opt->results()) {
            if (!joined.empty()) joined += ',';
            joined += r;
        }
        out[key] = joined;
    }
    return out;
}

Json manifest_json(const std::vector<std::string>& command, const CLI::App* app, std::uint64_t seed) {
    Json j = Json::object();
    std::string name;
    for (const auto& word : command) name += (name.empty() ? "" : " ") + word;
    j["subcommand"] = name;
    Json params = Json::object();
    for (const auto& [k, v] : collect_parameters(app)) params[k] = v;
    j["parameters"] = params;
    j["seed"] = seed;
    j["tool_version"] = kToolVersion;
    return j;
}

void write_manifest(const std::string& path, const Json& manifest) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write manifest '" + path + "'");
    out << ct::io::dump(manifest);
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
    DistOptions dist;
    double bias = 0.0;
    std::string bins = "2";
    std::string method = "lloyd";
    std::vector<double> init;
    double tol = 1e-11;
    int max_iterations = 200000;
    bool reduce = false;
    bool check_encoder_cost = false;
    int tail_bins = 20;
    std::string manifest;
};

// Bin lengths read outward from the side the bias points to, with their
// distance from the 2|b| asymptote.
Json tail_report(const ct::EquilibriumResult& r, double bias, int count) {
    const auto& m = r.quantizer.edges;
    std::vector<double> lengths;
    for (std::size_t k = 1; k < m.size(); ++k) lengths.push_back(m[k] - m[k - 1]);
    if (bias < 0.0) std::reverse(lengths.begin(), lengths.end());
    const double target = 2.0 * std::abs(bias);
    const std::size_t n = std::min<std::size_t>(lengths.size(), static_cast<std::size_t>(count));
    std::vector<double> tail(lengths.end() - static_cast<std::ptrdiff_t>(n), lengths.end());
    Json gaps = Json::array();
    bool monotone = true;
    bool within = true;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        const double gap = std::abs(tail[i] - target) / target;
        gaps.push_back(gap);
        within = within && gap <= 0.15;
        if (i > 0) monotone = monotone && std::abs(tail[i] - target) < std::abs(tail[i - 1] - target);
    }
    Json j = Json::object();
    j["side"] = bias > 0.0 ? "upper" : "lower";
    j["asymptote"] = target;
    j["lengths"] = ct::io::real_array(tail);
    j["relative_gaps"] = gaps;
    j["monotone_approach"] = monotone;
    j["within_15_percent"] = within;
    return j;
}

int solve_infinite(const ct::SourceDistribution& d, const SolveOptions& o) {
    Json j = Json::object();
    j["dist"] = ct::io::to_json(d);
    j["bias"] = o.bias;
    j["bins"] = "inf";
    if (d.kind() == ct::DistributionKind::Exponential && o.bias > 0.0) {
        const double rate = d.as<ct::Exponential>().rate;
        const double ls = ct::exponential::infinite_bin_length(rate, o.bias);
        const double cost = ct::exponential::bin_variance(ls, rate);
        j["method"] = "closed form";
        j["bin_length"] = ls;
        j["psi_residual"] = ct::exponential::psi(ls, rate, o.bias);
        j["decoder_cost"] = cost;
        j["encoder_cost"] = cost + o.bias * o.bias;
        j["status"] = "Converged";
        print(j);
        return kExitOk;
    }
    if (d.kind() == ct::DistributionKind::Gaussian && o.bias != 0.0) {
        ct::GameConfig cfg;
        cfg.bias = o.bias;
        cfg.bins = o.tail_bins;
        cfg.edge_tolerance = o.tol;
        cfg.max_iterations = o.max_iterations;
        const auto r = o.method == "shooting" ? ct::solve_shooting(d, cfg) : ct::solve_lloyd_max(d, cfg);
        j["method"] = "truncated approximation";
        j["truncated_bins"] = o.tail_bins;
        j["equilibrium"] = ct::io::to_json(d, r, o.tail_bins);
        if (r.converged()) j["tail"] = tail_report(r, o.bias, 3);
        j["status"] = ct::to_string(r.status);
        print(j);
        return status_exit(r.status);
    }
    j["method"] = "none";
    j["status"] = "NoEquilibrium";
    print(j);
    std::cerr << "no infinite-bin equilibrium is available for this source and bias\n";
    return kExitNoEquilibrium;
}

int cmd_solve(const SolveOptions& o) {
    const auto d = make_distribution(o.dist);
    if (o.method != "lloyd" && o.method != "shooting") throw UsageError("--method must be lloyd or shooting");
    if (o.bins == "inf") return solve_infinite(d, o);
    int bins = 0;
    try {
        std::size_t used = 0;
        bins = std::stoi(o.bins, &used);
        if (used != o.bins.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw UsageError("--bins must be a positive integer or 'inf'");
    }
    if (bins < 1) throw UsageError("--bins must be >= 1");
    if (!o.init.empty() && o.method != "lloyd") throw UsageError("--init applies to --method lloyd only");

    ct::GameConfig cfg;
    cfg.bias = o.bias;
    cfg.bins = bins;
    cfg.edge_tolerance = o.tol;
    cfg.max_iterations = o.max_iterations;
    cfg.reduce_on_collapse = o.reduce;
    ct::EquilibriumResult r;
    if (o.method == "shooting") {
        r = ct::solve_shooting(d, cfg);
    } else {
        std::optional<std::vector<double>> init;
        if (!o.init.empty()) init = o.init;
        r = ct::solve_lloyd_max(d, cfg, init);
    }
    Json j = ct::io::to_json(d, r, bins);
    if (o.check_encoder_cost && r.converged()) {
        Json diag = Json::object();
        const double direct = ct::encoder_cost_direct(d, r.quantizer, o.bias);
        diag["encoder_cost_quadrature"] = direct;
        diag["identity_error"] = std::abs(direct - r.encoder_cost);
        j["diagnostics"] = diag;
    }
    print(j);
    if (!r.message.empty()) std::cerr << ct::to_string(r.status) << ": " << r.message << "\n";
    return status_exit(r.status);
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    DistOptions dist;
    std::string over;
    double from = 0.0;
    double to = 0.0;
    double step = 1.0;
    double bias = 0.0;
    std::string bins = "2";
    std::string method = "shooting";
    std::string manifest;
};

std::vector<double> grid_points(double from, double to, double step) {
    if (!(step > 0.0)) throw UsageError("--step must be positive");
    if (!(to >= from)) throw UsageError("--to must be >= --from");
    const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> xs;
    for (long i = 0; i < n; ++i) {
        double x = from + static_cast<double>(i) * step;
        // A grid crossing zero should hit it exactly; b = 0 is a regime boundary.
        if (std::abs(x) < 1e-9 * step) x = 0.0;
        xs.push_back(x);
    }
    return xs;
}

// Paper bin-count bound for the family at this bias, when one exists.
std::optional<int> family_bound(const ct::SourceDistribution& d, double bias) {
    if (d.kind() == ct::DistributionKind::Uniform && bias != 0.0) {
        return ct::bounds::nmax_uniform(bias, d.support().upper - d.support().lower);
    }
    if (d.kind() == ct::DistributionKind::Exponential && bias < 0.0) {
        return ct::exponential::nmax_exponential(d.as<ct::Exponential>().rate, bias);
    }
    return std::nullopt;
}

ct::EquilibriumResult run_solver(const ct::SourceDistribution& d, double bias, int bins, const std::string& method) {
    ct::GameConfig cfg;
    cfg.bias = bias;
    cfg.bins = bins;
    return method == "lloyd" ? ct::solve_lloyd_max(d, cfg) : ct::solve_shooting(d, cfg);
}

int cmd_sweep(const SweepOptions& o) {
    const auto d = make_distribution(o.dist);
    if (o.method != "lloyd" && o.method != "shooting") throw UsageError("--method must be lloyd or shooting");
    std::vector<std::string> lines;
    bool any = false;
    if (o.over == "bins") {
        const auto xs = grid_points(o.from, o.to, o.step);
        std::vector<ct::EquilibriumResult> rows(xs.size());
        for (double x : xs) {
            if (x < 1.0 || x != std::floor(x)) throw UsageError("bin counts must be positive integers");
        }
        ct::parallel_for(rows.size(), [&](std::size_t i) {
            rows[i] = run_solver(d, o.bias, static_cast<int>(xs[i]), o.method);
        });
        lines.push_back("N,decoder_cost,encoder_cost,status");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            any = any || r.converged();
            lines.push_back(std::to_string(static_cast<int>(xs[i])) + "," + csv_real(r.decoder_cost) + "," +
                            csv_real(r.encoder_cost) + "," + ct::to_string(r.status));
        }
    } else if (o.over == "bias") {
        const auto xs = grid_points(o.from, o.to, o.step);
        int fixed_bins = 0;
        if (o.bins != "nmax") {
            try {
                fixed_bins = std::stoi(o.bins);
            } catch (const std::exception&) {
                throw UsageError("--bins must be an integer or 'nmax'");
            }
            if (fixed_bins < 1) throw UsageError("--bins must be >= 1");
        }
        struct Row {
            std::optional<int> bound;
            int bins = 0;
            ct::EquilibriumResult result;
        };
        std::vector<Row> rows(xs.size());
        ct::parallel_for(rows.size(), [&](std::size_t i) {
            auto& row = rows[i];
            row.bound = family_bound(d, xs[i]);
            row.bins = fixed_bins > 0 ? fixed_bins : row.bound.value_or(0);
            if (row.bins > 0) row.result = run_solver(d, xs[i], row.bins, o.method);
        });
        lines.push_back("bias,N,decoder_cost,encoder_cost,status,nmax_bound");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& row = rows[i];
            const std::string bound = row.bound ? std::to_string(*row.bound) : "";
            if (row.bins == 0) {
                lines.push_back(ct::io::format_real(xs[i]) + ",,,,Unbounded," + bound);
                continue;
            }
            any = any || row.result.converged();
            lines.push_back(ct::io::format_real(xs[i]) + "," + std::to_string(row.bins) + "," +
                            csv_real(row.result.decoder_cost) + "," +
                            csv_real(row.result.encoder_cost) + "," + ct::to_string(row.result.status) +
                            "," + bound);
        }
    } else {
        throw UsageError("--over must be bias or bins");
    }
    for (const auto& line : lines) std::cout << line << "\n";
    return any ? kExitOk : kExitNoEquilibrium;
}

// ---------------------------------------------------------------- bounds

struct BoundsOptions {
    std::string family;
    std::vector<double> biases;
    double lambda = 1.0;
    double mu = 0.0;
    double sigma = 1.0;
    double lower = 0.0;
    double upper = 1.0;
    double tail_a = 0.0;
    double tail_k = 0.0;
    double tail_eta = 0.0;
    int cap = 64;
    std::string manifest;
};

Json empirical_json(const ct::SourceDistribution& d, double bias, int cap) {
    const auto e = ct::bounds::empirical_nmax(d, bias, cap);
    Json j = Json::object();
    j["value"] = e.value;
    j["capped"] = e.capped;
    j["label"] = e.capped ? "empirical lower bound (search cap reached)" : "empirical";
    return j;
}

int cmd_bounds(const BoundsOptions& o) {
    if (o.biases.empty()) throw UsageError("--bias is required");
    Json out = Json::object();
    out["family"] = o.family;
    Json params = Json::object();
    Json rows = Json::array();
    if (o.family == "uniform") {
        params["lower"] = o.lower;
        params["upper"] = o.upper;
        const auto d = ct::SourceDistribution::uniform(o.lower, o.upper);
        for (double b : o.biases) {
            Json row = Json::object();
            row["bias"] = b;
            if (b != 0.0) {
                row["nmax_bound"] = ct::bounds::nmax_uniform(b, o.upper - o.lower);
            } else {
                row["nmax_bound"] = nullptr;
            }
            row["empirical_nmax"] = empirical_json(d, b, o.cap);
            rows.push_back(row);
        }
    } else if (o.family == "exponential") {
        params["lambda"] = o.lambda;
        const auto d = ct::SourceDistribution::exponential(o.lambda);
        const auto th = ct::bounds::exponential_thresholds(o.lambda);
        Json thresholds = Json::object();
        thresholds["two_bin"] = th.two_bin;
        thresholds["three_bin"] = th.three_bin;
        params["thresholds"] = thresholds;
        for (double b : o.biases) {
            Json row = Json::object();
            row["bias"] = b;
            if (b < 0.0) {
                row["nmax_bound"] = ct::exponential::nmax_exponential(o.lambda, b);
                row["general_bound"] = ct::bounds::general_semi_unbounded_bound(ct::bounds::exponential_tail(o.lambda), b);
            } else {
                row["nmax_bound"] = nullptr;
                row["general_bound"] = nullptr;
            }
            row["noninformative"] = ct::bounds::noninformative_semi_unbounded(1.0 / o.lambda, 0.0,
                                                                              ct::bounds::Side::Lower, b);
            row["empirical_nmax"] = empirical_json(d, b, o.cap);
            rows.push_back(row);
        }
    } else if (o.family == "gaussian") {
        params["mu"] = o.mu;
        params["sigma"] = o.sigma;
        const auto d = ct::SourceDistribution::gaussian(o.mu, o.sigma);
        for (double b : o.biases) {
            Json row = Json::object();
            row["bias"] = b;
            if (b != 0.0) {
                const auto h = ct::bounds::gaussian_halfline_bound(o.sigma, b);
                Json hb = Json::object();
                hb["count"] = h.count;
                hb["side"] = ct::bounds::to_string(h.side);
                row["halfline_bound"] = hb;
            } else {
                row["halfline_bound"] = nullptr;
            }
            row["empirical_nmax"] = empirical_json(d, b, o.cap);
            rows.push_back(row);
        }
    } else if (o.family == "general") {
        const ct::bounds::TailAssumptions t{o.tail_a, o.tail_k, o.tail_eta, std::nullopt, std::nullopt};
        t.validate();
        params["a"] = o.tail_a;
        params["K"] = o.tail_k;
        params["eta"] = o.tail_eta;
        for (double b : o.biases) {
            Json row = Json::object();
            row["bias"] = b;
            if (b < 0.0) {
                row["general_bound"] = ct::bounds::general_semi_unbounded_bound(t, b);
            } else {
                row["general_bound"] = nullptr;
            }
            row["noninformative"] = ct::bounds::general_noninformative(t, b);
            row["empirical_nmax"] = nullptr;
            rows.push_back(row);
        }
    } else {
        throw UsageError("bounds family must be uniform, exponential, gaussian or general");
    }
    out["parameters"] = params;
    out["rows"] = rows;
    print(out);
    return kExitOk;
}

// ---------------------------------------------------------------- exp

struct ExpOptions {
    double lambda = 1.0;
    double bias = 0.0;
    std::string bins = "2";
    double x = 0.0;
    std::string branch = "W0";
    std::string manifest;
};

Json exp_header(const ExpOptions& o) {
    Json j = Json::object();
    j["lambda"] = o.lambda;
    j["bias"] = o.bias;
    return j;
}

int cmd_exp_lstar(const ExpOptions& o) {
    const double ls = ct::exponential::infinite_bin_length(o.lambda, o.bias);
    Json j = exp_header(o);
    j["l_star"] = ls;
    j["psi_residual"] = ct::exponential::psi(ls, o.lambda, o.bias);
    j["bracket"] = ct::io::real_array(std::vector<double>{2.0 * o.bias, 2.0 / o.lambda + 2.0 * o.bias});
    j["infinite_cost"] = ct::exponential::bin_variance(ls, o.lambda);
    print(j);
    return kExitOk;
}

int cmd_exp_two_bin(const ExpOptions& o) {
    const auto edge = ct::exponential::two_bin_edge(o.lambda, o.bias);
    Json j = exp_header(o);
    j["edge"] = edge ? Json(*edge) : Json(nullptr);
    j["threshold"] = ct::bounds::exponential_thresholds(o.lambda).two_bin;
    j["status"] = edge ? "Converged" : "NoEquilibrium";
    print(j);
    return edge ? kExitOk : kExitNoEquilibrium;
}

int parse_bins(const std::string& s) {
    try {
        std::size_t used = 0;
        const int n = std::stoi(s, &used);
        if (used == s.size() && n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw UsageError("--bins must be a positive integer");
}

int cmd_exp_recursion(const ExpOptions& o) {
    const int bins = parse_bins(o.bins);
    if (bins < 2) throw UsageError("recursion needs --bins >= 2");
    const auto state = ct::exponential::backward_recursion(o.lambda, o.bias, bins);
    Json j = exp_header(o);
    j["bins"] = bins;
    if (state) {
        j["lengths"] = ct::io::real_array(state->lengths);
        j["edges"] = ct::io::real_array(state->edges());
        j["decoder_cost"] = ct::exponential::finite_cost(o.lambda, state->lengths);
    } else {
        j["lengths"] = Json::array();
        j["edges"] = Json::array();
        j["decoder_cost"] = nullptr;
    }
    j["status"] = state ? "Converged" : "NoEquilibrium";
    print(j);
    return state ? kExitOk : kExitNoEquilibrium;
}

int cmd_exp_nmax(const ExpOptions& o) {
    Json j = exp_header(o);
    j["nmax_bound"] = ct::exponential::nmax_exponential(o.lambda, o.bias);
    j["general_bound"] = ct::bounds::general_semi_unbounded_bound(ct::bounds::exponential_tail(o.lambda), o.bias);
    const auto th = ct::bounds::exponential_thresholds(o.lambda);
    Json thresholds = Json::object();
    thresholds["two_bin"] = th.two_bin;
    thresholds["three_bin"] = th.three_bin;
    j["thresholds"] = thresholds;
    print(j);
    return kExitOk;
}

int cmd_exp_cost(const ExpOptions& o) {
    Json j = exp_header(o);
    if (o.bins == "inf") {
        const double cost = ct::exponential::infinite_cost(o.lambda, o.bias);
        j["bins"] = "inf";
        j["decoder_cost"] = cost;
        j["encoder_cost"] = cost + o.bias * o.bias;
        j["status"] = "Converged";
        print(j);
        return kExitOk;
    }
    const int bins = parse_bins(o.bins);
    j["bins"] = bins;
    std::optional<double> cost;
    if (bins == 1) {
        cost = 1.0 / (o.lambda * o.lambda);
    } else if (const auto state = ct::exponential::backward_recursion(o.lambda, o.bias, bins)) {
        cost = ct::exponential::finite_cost(o.lambda, state->lengths);
    }
    j["decoder_cost"] = cost ? Json(*cost) : Json(nullptr);
    j["encoder_cost"] = cost ? Json(*cost + o.bias * o.bias) : Json(nullptr);
    if (cost && o.bias > 0.0) {
        j["infinite_cost"] = ct::exponential::infinite_cost(o.lambda, o.bias);
    }
    j["status"] = cost ? "Converged" : "NoEquilibrium";
    print(j);
    return cost ? kExitOk : kExitNoEquilibrium;
}

int cmd_exp_lambertw(const ExpOptions& o) {
    ct::LambertBranch branch;
    if (o.branch == "W0") {
        branch = ct::LambertBranch::W0;
    } else if (o.branch == "Wm1") {
        branch = ct::LambertBranch::Wm1;
    } else {
        throw UsageError("--branch must be W0 or Wm1");
    }
    const double w = ct::lambert_w(branch, o.x);
    Json j = Json::object();
    j["x"] = o.x;
    j["branch"] = o.branch;
    j["w"] = w;
    j["residual"] = w * std::exp(w) - o.x;
    print(j);
    return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
    std::string grid = "default";
    std::uint64_t seed = 0;
    std::string manifest;
};

struct VerifyCase {
    std::string family;
    ct::SourceDistribution dist;
    double bias;
    int bins;
};

std::vector<VerifyCase> verify_grid(const std::string& name) {
    if (name != "default") throw UsageError("unknown --grid '" + name + "' (only 'default' is defined)");
    const std::vector<std::pair<std::string, ct::SourceDistribution>> families{
        {"exponential", ct::SourceDistribution::exponential(1.0)},
        {"gaussian", ct::SourceDistribution::gaussian(0.0, 1.0)},
        {"uniform", ct::SourceDistribution::uniform(0.0, 1.0)},
    };
    std::vector<VerifyCase> cases;
    for (const auto& [family, d] : families) {
        for (double b : {-0.3, -0.15, 0.0, 0.1, 0.2}) {
            for (int n : {2, 3, 4}) cases.push_back({family, d, b, n});
        }
    }
    return cases;
}

int cmd_verify(const VerifyOptions& o) {
    const auto cases = verify_grid(o.grid);
    struct Outcome {
        bool oracle = false;
        ct::SolveStatus shooting = ct::SolveStatus::Converged;
        ct::SolveStatus lloyd = ct::SolveStatus::Converged;
        std::optional<bool> closed_form;
        double difference = 0.0;
        bool pass = false;
    };
    std::vector<Outcome> outcomes(cases.size());
    ct::parallel_for(cases.size(), [&](std::size_t i) {
        const auto& c = cases[i];
        auto& out = outcomes[i];
        const auto oracle = ct::oracle::brute_force_equilibrium(c.dist, c.bias, c.bins, ct::oracle::default_grid(c.dist));
        ct::GameConfig cfg;
        cfg.bias = c.bias;
        cfg.bins = c.bins;
        const auto shot = ct::solve_shooting(c.dist, cfg);
        const auto lloyd = ct::solve_lloyd_max(c.dist, cfg, ct::random_initial_edges(c.dist, c.bins, o.seed, i));
        out.oracle = oracle.has_value();
        out.shooting = shot.status;
        out.lloyd = lloyd.status;
        bool agree = out.oracle == shot.converged() && out.oracle == lloyd.converged();
        std::optional<std::vector<double>> closed;
        if (c.family == "uniform") {
            closed = ct::oracle::uniform_closed_form(c.bias, c.bins);
            out.closed_form = closed.has_value();
            agree = agree && closed.has_value() == out.oracle;
        }
        if (agree && out.oracle) {
            out.difference = std::max(ct::detail::sup_distance(*oracle, shot.quantizer.edges),
                                      ct::detail::sup_distance(*oracle, lloyd.quantizer.edges));
            if (closed) out.difference = std::max(out.difference, ct::detail::sup_distance(*oracle, *closed));
            agree = out.difference <= 1e-7;
        }
        out.pass = agree;
    });

    Json j = Json::object();
    j["grid"] = o.grid;
    j["seed"] = o.seed;
    Json rows = Json::array();
    int passed = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        const auto& out = outcomes[i];
        Json row = Json::object();
        row["family"] = c.family;
        row["bias"] = c.bias;
        row["bins"] = c.bins;
        row["oracle"] = out.oracle ? "equilibrium" : "none";
        row["shooting"] = ct::to_string(out.shooting);
        row["lloyd"] = ct::to_string(out.lloyd);
        row["closed_form"] = out.closed_form ? Json(*out.closed_form ? "equilibrium" : "none") : Json(nullptr);
        row["max_edge_difference"] = out.difference;
        row["pass"] = out.pass;
        rows.push_back(row);
        passed += out.pass ? 1 : 0;
    }
    j["instances"] = rows;
    j["passed"] = passed;
    j["failed"] = static_cast<int>(cases.size()) - passed;
    j["all_pass"] = passed == static_cast<int>(cases.size());
    print(j);
    return passed == static_cast<int>(cases.size()) ? kExitOk : kExitNoEquilibrium;
}

// ---------------------------------------------------------------- export

struct ExportOptions {
    DistOptions dist;
    double bias = 0.0;
    int min_bins = 1;
    int max_bins = 8;
    std::string out_dir;
    std::string manifest;
};

int cmd_export(const ExportOptions& o, const Json& manifest) {
    const auto d = make_distribution(o.dist);
    if (o.out_dir.empty()) throw UsageError("--out is required");
    const auto rows = ct::informativeness_table(d, o.bias, o.min_bins, o.max_bins);
    std::filesystem::create_directories(o.out_dir);
    const auto csv_path = std::filesystem::path(o.out_dir) / "informativeness.csv";
    const auto manifest_path = std::filesystem::path(o.out_dir) / "manifest.json";
    {
        std::ofstream csv(csv_path);
        if (!csv) throw UsageError("cannot write '" + csv_path.string() + "'");
        csv << "N,decoder_cost,encoder_cost,status\n";
        for (const auto& row : rows) {
            const bool ok = row.status == ct::SolveStatus::Converged;
            csv << row.bins << "," << (ok ? csv_real(row.report.decoder_cost) : "") << ","
                << (ok ? csv_real(row.report.encoder_cost) : "") << "," << ct::to_string(row.status)
                << "\n";
        }
    }
    write_manifest(manifest_path.string(), manifest);
    Json j = Json::object();
    j["csv"] = csv_path.string();
    j["manifest"] = manifest_path.string();
    j["rows"] = static_cast<int>(rows.size());
    j["strictly_decreasing"] = ct::strictly_more_informative(rows);
    print(j);
    return kExitOk;
}

// ---------------------------------------------------------------- replay

// Rebuilds the argument vector recorded in a manifest.
std::vector<std::string> replay_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open manifest '" + path + "'");
    Json m;
    try {
        m = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!m.contains("subcommand") || !m.contains("parameters")) throw UsageError("manifest lacks subcommand/parameters");
    if (m.value("tool_version", std::string()) != kToolVersion) {
        std::cerr << "warning: manifest was written by tool version " << m.value("tool_version", std::string("?"))
                  << "\n";
    }
    std::vector<std::string> args;
    std::istringstream words(m.at("subcommand").get<std::string>());
    for (std::string w; words >> w;) args.push_back(w);
    std::vector<std::string> positional;
    for (const auto& [key, value] : m.at("parameters").items()) {
        const auto v = value.get<std::string>();
        if (key == "family") {
            positional.push_back(v);
        } else if (v == "true" || v == "false") {
            if (v == "true") args.push_back("--" + key);
        } else if (!v.empty()) {
            args.push_back("--" + key);
            args.push_back(v);
        }
    }
    args.insert(args.begin() + 1, positional.begin(), positional.end());
    return args;
}

int run(std::vector<std::string> args) {
    CLI::App app{"Equilibria of the quadratic cheap-talk game"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    SolveOptions solve;
    auto* s = app.add_subcommand("solve", "compute one equilibrium");
    add_dist_options(s, solve.dist);
    s->add_option("--bias", solve.bias, "encoder bias b")->capture_default_str();
    s->add_option("--bins", solve.bins, "number of bins, or inf")->capture_default_str();
    s->add_option("--method", solve.method, "lloyd | shooting")->capture_default_str();
    s->add_option("--init", solve.init, "initial edges, comma separated")->delimiter(',');
    s->add_option("--tol", solve.tol, "sup-norm stopping tolerance")->capture_default_str();
    s->add_option("--max-iterations", solve.max_iterations)->capture_default_str();
    s->add_flag("--reduce-on-collapse", solve.reduce, "drop collapsed edges and continue");
    s->add_flag("--check-encoder-cost", solve.check_encoder_cost, "recompute J^e by quadrature");
    s->add_option("--tail-bins", solve.tail_bins, "bins used for the gaussian --bins inf approximation")
        ->capture_default_str();
    s->add_option("--manifest", solve.manifest, "write a run manifest to this file");

    SweepOptions sweep;
    auto* w = app.add_subcommand("sweep", "tabulate equilibria over a bias or bin-count grid (CSV)");
    add_dist_options(w, sweep.dist);
    w->add_option("--over", sweep.over, "bias | bins")->required();
    w->add_option("--from", sweep.from)->required();
    w->add_option("--to", sweep.to)->required();
    w->add_option("--step", sweep.step)->capture_default_str();
    w->add_option("--bias", sweep.bias, "bias for --over bins")->capture_default_str();
    w->add_option("--bins", sweep.bins, "bins for --over bias, or nmax")->capture_default_str();
    w->add_option("--method", sweep.method, "lloyd | shooting")->capture_default_str();
    w->add_option("--manifest", sweep.manifest);

    BoundsOptions bounds;
    auto* b = app.add_subcommand("bounds", "bin-count bounds and empirical N_max (JSON)");
    b->add_option("family", bounds.family, "uniform | exponential | gaussian | general")->required();
    b->add_option("--bias", bounds.biases, "one or more biases, comma separated")->delimiter(',')->required();
    b->add_option("--lambda", bounds.lambda)->capture_default_str();
    b->add_option("--mu", bounds.mu)->capture_default_str();
    b->add_option("--sigma", bounds.sigma)->capture_default_str();
    b->add_option("--lower", bounds.lower)->capture_default_str();
    b->add_option("--upper", bounds.upper)->capture_default_str();
    b->add_option("--tail-a", bounds.tail_a, "support lower end a (general)")->capture_default_str();
    b->add_option("--tail-k", bounds.tail_k, "tail threshold K (general)")->capture_default_str();
    b->add_option("--tail-eta", bounds.tail_eta, "centroid gap eta (general)")->capture_default_str();
    b->add_option("--cap", bounds.cap, "largest N tried by the empirical search")->capture_default_str();
    b->add_option("--manifest", bounds.manifest);

    ExpOptions expo;
    auto* e = app.add_subcommand("exp", "exponential-source closed forms (JSON)");
    e->require_subcommand(1);
    auto add_exp = [&](const char* name, const char* help, bool bins, bool lambert) {
        auto* c = e->add_subcommand(name, help);
        if (lambert) {
            c->add_option("--x", expo.x)->required();
            c->add_option("--branch", expo.branch, "W0 | Wm1")->capture_default_str();
        } else {
            c->add_option("--lambda", expo.lambda)->capture_default_str();
            c->add_option("--bias", expo.bias)->capture_default_str();
        }
        if (bins) c->add_option("--bins", expo.bins)->capture_default_str();
        c->add_option("--manifest", expo.manifest);
        return c;
    };
    auto* e_lstar = add_exp("lstar", "common bin length of the infinite-bin equilibrium", false, false);
    auto* e_two = add_exp("two-bin", "two-bin equilibrium edge", false, false);
    auto* e_rec = add_exp("recursion", "finite-N bin lengths by backward recursion", true, false);
    auto* e_nmax = add_exp("nmax", "bin-count bound for b < 0", false, false);
    auto* e_cost = add_exp("cost", "closed-form decoder cost for N bins or inf", true, false);
    auto* e_lw = add_exp("lambertw", "Lambert W", false, true);

    VerifyOptions verify;
    auto* v = app.add_subcommand("verify", "oracle versus solver comparison matrix (JSON)");
    v->add_option("--grid", verify.grid)->capture_default_str();
    v->add_option("--seed", verify.seed, "seed for random Lloyd-Max starts")->capture_default_str();
    v->add_option("--manifest", verify.manifest);

    ExportOptions exporter;
    auto* x = app.add_subcommand("export", "write the informativeness table as CSV plus a manifest");
    add_dist_options(x, exporter.dist);
    x->add_option("--bias", exporter.bias)->capture_default_str();
    x->add_option("--min-bins", exporter.min_bins)->capture_default_str();
    x->add_option("--max-bins", exporter.max_bins)->capture_default_str();
    x->add_option("--out", exporter.out_dir, "output directory")->required();
    x->add_option("--manifest", exporter.manifest);

    std::string replay_path;
    auto* r = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    r->add_option("manifest", replay_path)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForVersion& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kExitUsage;
    }

    try {
        if (r->parsed()) return run(replay_arguments(replay_path));
        auto manifest_for = [&](std::vector<std::string> command, const CLI::App* sub, std::uint64_t seed) {
            return manifest_json(command, sub, seed);
        };
        if (s->parsed()) {
            write_manifest(solve.manifest, manifest_for({"solve"}, s, 0));
            return cmd_solve(solve);
        }
        if (w->parsed()) {
            write_manifest(sweep.manifest, manifest_for({"sweep"}, w, 0));
            return cmd_sweep(sweep);
        }
        if (b->parsed()) {
            write_manifest(bounds.manifest, manifest_for({"bounds"}, b, 0));
            return cmd_bounds(bounds);
        }
        if (v->parsed()) {
            write_manifest(verify.manifest, manifest_for({"verify"}, v, verify.seed));
            return cmd_verify(verify);
        }
        if (x->parsed()) {
            const auto m = manifest_for({"export"}, x, 0);
            write_manifest(exporter.manifest, m);
            return cmd_export(exporter, m);
        }
        const std::vector<std::pair<CLI::App*, int (*)(const ExpOptions&)>> exp_commands{
            {e_lstar, cmd_exp_lstar}, {e_two, cmd_exp_two_bin}, {e_rec, cmd_exp_recursion},
            {e_nmax, cmd_exp_nmax},   {e_cost, cmd_exp_cost},   {e_lw, cmd_exp_lambertw},
        };
        for (const auto& [sub, fn] : exp_commands) {
            if (sub->parsed()) {
                write_manifest(expo.manifest, manifest_for({"exp", sub->get_name()}, sub, 0));
                return fn(expo);
            }
        }
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const ct::ConfigError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const ct::DomainError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args));
}
