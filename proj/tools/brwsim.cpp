// Command-line driver: wires the samplers, estimators, and oracle
// cross-checks into reproducible runs.  Every run with --out leaves a
// manifest alongside the results; result payloads never contain timings,
// so a rerun from the same manifest is byte-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brwsim/brw.hpp"
#include "brwsim/estimators.hpp"
#include "brwsim/io.hpp"
#include "brwsim/oracle.hpp"
#include "brwsim/rng.hpp"
#include "brwsim/ssbrw.hpp"
#include "brwsim/tree.hpp"
#include "brwsim/validation.hpp"

namespace {

using brwsim::TreeShape;
namespace est = brwsim::est;
namespace io = brwsim::io;
namespace oracle = brwsim::oracle;
namespace validation = brwsim::validation;

constexpr const char* kVersion = "0.1.0";
// Default master seed when --seed is not given; there is deliberately no
// environment override, so runs are reproducible from their flags alone.
constexpr std::uint64_t kDefaultSeed = 1234567;

std::string now_utc() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += io::format_g17(v[i]);
    }
    return out;
}

// Ties a CLI option to a config-file key: config values apply only when the
// flag was not given on the command line, and the merged value is what the
// manifest records.
struct Binding {
    CLI::Option* opt = nullptr;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

class FlagTable {
public:
    explicit FlagTable(CLI::App* cmd) : cmd_(cmd) {}

    void add(const std::string& key, CLI::Option* opt, std::function<void(const std::string&)> set,
             std::function<std::string()> get) {
        bindings_[key] = Binding{opt, std::move(set), std::move(get)};
    }

    template <class T>
    CLI::Option* option(const std::string& flag, T& target, const std::string& help) {
        CLI::Option* opt = cmd_->add_option(flag, target, help);
        const std::string key = flag.substr(2);
        add(key, opt, [&target](const std::string& s) { target = parse<T>(s); },
            [&target] { return to_text(target); });
        return opt;
    }

    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        out.reserve(bindings_.size());
        for (const auto& [k, b] : bindings_) out.push_back(k);
        return out;
    }

    void apply_config(const std::string& path) {
        const auto values = io::load_config(path, keys());
        for (const auto& [key, value] : values) {
            auto& binding = bindings_.at(key);
            if (binding.opt->count() == 0) binding.set(value);
        }
    }

    std::map<std::string, std::string> effective() const {
        std::map<std::string, std::string> out;
        for (const auto& [key, binding] : bindings_) out[key] = binding.get();
        return out;
    }

private:
    template <class T>
    static T parse(const std::string& s);
    template <class T>
    static std::string to_text(const T& v);

    CLI::App* cmd_;
    std::map<std::string, Binding> bindings_;
};

template <>
int FlagTable::parse<int>(const std::string& s) { return std::stoi(s); }
template <>
std::int64_t FlagTable::parse<std::int64_t>(const std::string& s) { return std::stoll(s); }
template <>
std::uint64_t FlagTable::parse<std::uint64_t>(const std::string& s) { return std::stoull(s); }
template <>
double FlagTable::parse<double>(const std::string& s) { return std::stod(s); }
template <>
std::string FlagTable::parse<std::string>(const std::string& s) { return s; }

template <>
std::string FlagTable::to_text<int>(const int& v) { return std::to_string(v); }
template <>
std::string FlagTable::to_text<std::int64_t>(const std::int64_t& v) { return std::to_string(v); }
template <>
std::string FlagTable::to_text<std::uint64_t>(const std::uint64_t& v) { return std::to_string(v); }
template <>
std::string FlagTable::to_text<double>(const double& v) { return io::format_g17(v); }
template <>
std::string FlagTable::to_text<std::string>(const std::string& v) { return v; }

// Shared run state: output routing plus the manifest lifecycle.
struct Run {
    std::string command_line;
    std::string subcommand;
    std::string out_path;  // empty -> stdout
    std::map<std::string, std::string> options;
    std::string started;

    void manifest(bool finished) const {
        if (out_path.empty()) return;
        nlohmann::json m;
        m["tool"] = std::string("brwsim ") + kVersion;
        m["command_line"] = command_line;
        m["subcommand"] = subcommand;
        m["options"] = options;
        m["started_utc"] = started;
        if (finished) m["finished_utc"] = now_utc();
        m["outputs"] = std::vector<std::string>{out_path};
        std::ofstream f(out_path + ".manifest.json");
        f << m.dump(2) << "\n";
    }

    // Manifest goes down before any result byte, then gains the end stamp.
    void write_results(const std::vector<std::string>& lines) const {
        manifest(false);
        if (out_path.empty()) {
            for (const auto& line : lines) std::cout << line << "\n";
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
            for (const auto& line : lines) f << line << "\n";
        }
        manifest(true);
    }
};

est::Model parse_model(const std::string& name, int n_prime) {
    if (name == "brw") return est::Model::brw();
    if (name == "switching" || name == "phi-tilde") return est::Model::switching();
    if (name == "comparison") {
        if (n_prime < 1) throw std::invalid_argument("comparison model needs --n-prime");
        return est::Model::comparison(n_prime);
    }
    throw std::invalid_argument("unknown model '" + name + "' (brw, switching, comparison)");
}

int run_validate(const Run& run, validation::Tier tier, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = validation::run_suite(tier, seed);

    std::vector<std::string> lines;
    lines.reserve(results.size());
    bool all_passed = true;
    for (const auto& r : results) {
        all_passed = all_passed && r.passed;
        std::string line = "{";
        line += "\"check\":" + io::quote(r.name);
        line += ",\"pass\":" + std::string(r.passed ? "true" : "false");
        line += ",\"detail\":" + io::quote(r.detail);
        line += ",\"seed\":" + std::to_string(seed);
        line += "}";
        lines.push_back(std::move(line));
    }
    run.write_results(lines);

    // human-readable table; timings stay out of the payload
    std::FILE* table = run.out_path.empty() ? stderr : stdout;
    for (const auto& r : results)
        std::fprintf(table, "%-28s %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL");
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "validate: %zu checks, %s, %.1f s\n", results.size(),
                 all_passed ? "all passed" : "FAILURES", elapsed);
    return all_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    std::string command_line;
    for (int i = 0; i < argc; ++i) {
        if (i) command_line += ' ';
        command_line += argv[i];
    }

    CLI::App app{"branching random walk simulation and hard-wall estimation toolkit"};
    app.require_subcommand(1);

    // shared flag storage; each subcommand registers the subset it uses
    int d = 2, n = 4, n_prime = 0, shards = 8;
    std::int64_t samples = 100000;
    std::uint64_t seed = kDefaultSeed;
    std::string out, format = "jsonl", sample_format = "csv", config, model_name = "brw";
    std::string method = "conditional";
    std::string mode = "full", kind = "positivity", thresholds_text, lambdas_text;
    double tilt = 0.0, cpp_const = 1.0, lambda_prime_given = -1.0;
    est::BoundParams params;

    struct Sub {
        CLI::App* cmd;
        FlagTable flags;
        std::string config_path;
    };
    std::deque<Sub> subs;  // stable addresses: CLI11 keeps pointers into elements

    auto make_sub = [&](const std::string& name, const std::string& help) -> Sub& {
        CLI::App* cmd = app.add_subcommand(name, help);
        subs.push_back(Sub{cmd, FlagTable(cmd), {}});
        Sub& sub = subs.back();
        cmd->add_option("--config", sub.config_path, "key=value file; flags override it");
        return sub;
    };
    auto add_shape = [&](Sub& s) {
        s.flags.option("--d", d, "branching factor (>= 2)");
        s.flags.option("--n", n, "tree height (>= 1)");
    };
    auto add_sampling = [&](Sub& s) {
        s.flags.option("--samples", samples, "Monte Carlo sample count");
        s.flags.option("--seed", seed, "master seed (default " + std::to_string(kDefaultSeed) + ")");
        s.flags.option("--shards", shards, "independent stream shards");
    };
    auto add_out = [&](Sub& s) {
        s.flags.option("--out", out, "output file (default stdout); manifest written alongside");
        s.flags.option("--format", format, "jsonl or csv");
    };

    Sub& sample_cmd = make_sub("sample", "draw field realizations and export them");
    add_shape(sample_cmd);
    add_sampling(sample_cmd);
    sample_cmd.flags.option("--out", out, "output file (default stdout); manifest written alongside");
    sample_cmd.flags.option("--format", sample_format, "csv or bin");
    sample_cmd.flags.option("--model", model_name, "brw, switching (alias phi-tilde), comparison");
    sample_cmd.flags.option("--n-prime", n_prime, "subtree height for the comparison field");
    sample_cmd.flags.option("--mode", mode, "full or max-only");

    Sub& cov_cmd = make_sub("cov", "write the exact covariance matrix as CSV");
    add_shape(cov_cmd);
    cov_cmd.flags.option("--model", model_name, "brw or switching");
    cov_cmd.flags.option("--out", out, "output file (default stdout)");

    Sub& tail_cmd = make_sub("tail", "left-tail estimates for a field maximum");
    add_shape(tail_cmd);
    add_sampling(tail_cmd);
    add_out(tail_cmd);
    tail_cmd.flags.option("--model", model_name, "brw, switching (alias phi-tilde), comparison");
    tail_cmd.flags.option("--n-prime", n_prime, "subtree height for the comparison field");
    tail_cmd.flags.option("--thresholds", thresholds_text, "comma list of absolute thresholds");
    tail_cmd.flags.option("--lambda", lambdas_text,
                          "comma list of offsets below the centering (tilted estimator)");
    tail_cmd.flags.option("--tilt", tilt, "mean shift for the tilted estimator (>= 0)");

    Sub& pos_cmd = make_sub("positivity", "hard-wall probability estimators");
    add_shape(pos_cmd);
    add_sampling(pos_cmd);
    add_out(pos_cmd);
    pos_cmd.flags.option("--method", method, "naive or conditional");

    Sub& mean_cmd = make_sub("cond-mean", "conditional typical-leaf height");
    add_shape(mean_cmd);
    add_sampling(mean_cmd);
    add_out(mean_cmd);

    Sub& lp_cmd = make_sub("lambda-prime", "downward-shift fixed point");
    add_shape(lp_cmd);
    lp_cmd.flags.option("--cpp", cpp_const, "left-tail upper-bound rate constant");
    lp_cmd.flags.option("--out", out, "output file (default stdout)");

    Sub& bounds_cmd = make_sub("bounds", "closed-form bound evaluation");
    add_shape(bounds_cmd);
    bounds_cmd.flags.option("--kind", kind, "positivity or left-tail");
    bounds_cmd.flags.option("--lambda", lambdas_text, "offset(s) for left-tail bounds");
    bounds_cmd.flags.option("--lambda-prime", lambda_prime_given,
                            "fixed point override (solved from --cpp when omitted)");
    bounds_cmd.flags.option("--k1", params.k1, "positivity lower constant");
    bounds_cmd.flags.option("--k2", params.k2, "positivity upper constant");
    bounds_cmd.flags.option("--k3", params.k3, "positivity lower rate");
    bounds_cmd.flags.option("--cp", params.cp, "left-tail upper prefactor");
    bounds_cmd.flags.option("--cpp", params.cpp, "left-tail upper rate");
    bounds_cmd.flags.option("--kp", params.kp, "left-tail lower prefactor");
    bounds_cmd.flags.option("--kpp", params.kpp, "left-tail lower rate");
    bounds_cmd.flags.option("--c-star", params.c_star, "single-exponential tail rate");
    bounds_cmd.flags.option("--p-bar", params.p_bar, "auxiliary constant");
    bounds_cmd.flags.option("--a-bar", params.a_bar, "auxiliary constant");
    bounds_cmd.flags.option("--out", out, "output file (default stdout)");

    Sub& lemma_cmd = make_sub("lemma-sum", "weighted geometric sum and closed-form bound");
    add_shape(lemma_cmd);
    lemma_cmd.flags.option("--out", out, "output file (default stdout)");

    Sub& validate_cmd = make_sub("validate", "oracle cross-check suite");
    bool quick = false, full = false;
    validate_cmd.cmd->add_flag("--quick", quick, "reduced sample counts (seconds)");
    validate_cmd.cmd->add_flag("--full", full, "complete suite at stated sample counts");
    validate_cmd.flags.option("--seed", seed, "master seed");
    validate_cmd.flags.option("--out", out, "payload file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        Sub* active = nullptr;
        for (auto& s : subs)
            if (s.cmd->parsed()) active = &s;
        if (!active) {
            std::cerr << "error: no subcommand\n";
            return 1;
        }
        if (!active->config_path.empty()) active->flags.apply_config(active->config_path);

        Run run;
        run.command_line = command_line;
        run.subcommand = active->cmd->get_name();
        run.out_path = out;
        run.options = active->flags.effective();
        run.started = now_utc();

        const std::string& cmd_name = run.subcommand;

        if (cmd_name == "validate") {
            if (quick && full) throw std::invalid_argument("choose one of --quick / --full");
            return run_validate(run, full ? validation::Tier::full : validation::Tier::quick,
                                seed);
        }

        if (cmd_name == "sample") {
            const TreeShape shape(d, n);
            const est::Model model = parse_model(model_name, n_prime);
            const bool full_mode = mode == "full";
            if (!full_mode && mode != "max-only")
                throw std::invalid_argument("mode must be full or max-only");
            if (model.kind == est::Model::Kind::comparison && full_mode)
                throw std::invalid_argument("the comparison field is exposed max-only");
            if (sample_format != "csv" && sample_format != "bin")
                throw std::invalid_argument("sample formats: csv, bin");

            run.manifest(false);
            std::ofstream file;
            std::ostream* os = &std::cout;
            if (!out.empty()) {
                file.open(out, std::ios::binary);
                if (!file) throw std::runtime_error("cannot open output file '" + out + "'");
                os = &file;
            }
            brwsim::RngStream stream(seed, 0);
            auto emit_row = [&](const std::vector<double>& row) {
                if (sample_format == "bin") {
                    os->write(reinterpret_cast<const char*>(row.data()),
                              static_cast<std::streamsize>(row.size() * sizeof(double)));
                } else {
                    std::string line;
                    for (std::size_t i = 0; i < row.size(); ++i) {
                        if (i) line += ',';
                        line += io::format_g17(row[i]);
                    }
                    *os << line << "\n";
                }
            };
            for (std::int64_t i = 0; i < samples; ++i) {
                std::vector<double> row;
                switch (model.kind) {
                    case est::Model::Kind::brw: {
                        auto s = brwsim::brw::sample(
                            shape, stream,
                            full_mode ? brwsim::SampleMode::full : brwsim::SampleMode::max_only);
                        row = full_mode ? std::move(s.values) : std::vector<double>{s.max};
                        break;
                    }
                    case est::Model::Kind::switching: {
                        auto s = brwsim::ssbrw::sample(
                            shape, stream,
                            full_mode ? brwsim::SampleMode::full : brwsim::SampleMode::max_only);
                        row = full_mode ? std::move(s.values) : std::vector<double>{s.max};
                        row.push_back(s.shared_gaussian);
                        break;
                    }
                    case est::Model::Kind::comparison: {
                        auto s = brwsim::brw::sample_comparison_max(shape, model.n_prime, stream);
                        row = {s.max};
                        break;
                    }
                }
                emit_row(row);
            }
            if (os == &file) file.close();
            run.manifest(true);
            return 0;
        }

        if (cmd_name == "cov") {
            const TreeShape shape(d, n);
            oracle::Kernel kernel;
            if (model_name == "brw")
                kernel = oracle::Kernel::brw;
            else if (model_name == "switching" || model_name == "phi-tilde")
                kernel = oracle::Kernel::switching;
            else
                throw std::invalid_argument("cov models: brw, switching");
            const auto cov = oracle::dense_covariance(shape, kernel);
            std::vector<std::string> lines;
            lines.reserve(static_cast<std::size_t>(cov.dim));
            for (int i = 0; i < cov.dim; ++i) {
                std::string line;
                for (int j = 0; j < cov.dim; ++j) {
                    if (j) line += ',';
                    line += io::format_g17(cov.at(i, j));
                }
                lines.push_back(std::move(line));
            }
            run.write_results(lines);
            return 0;
        }

        if (cmd_name == "tail") {
            const TreeShape shape(d, n);
            std::vector<std::string> lines;
            if (!lambdas_text.empty()) {
                const est::Model model = parse_model(model_name, n_prime);
                if (model.kind != est::Model::Kind::switching)
                    throw std::invalid_argument("--lambda tail estimates run on --model switching");
                for (double lambda : parse_double_list(lambdas_text)) {
                    const auto r = est::tilted_left_tail(shape, lambda, tilt, samples, seed, shards);
                    if (format == "csv") {
                        lines.push_back(io::format_g17(
                                            brwsim::brw::expected_max_center(shape) - lambda) +
                                        "," +
                                        (r.log_value ? io::format_g17(*r.log_value) : "nan"));
                    } else {
                        lines.push_back(io::record_line(
                            r, {{"op", io::quote("tail")},
                                {"lambda", io::format_g17(lambda)},
                                {"tilt", io::format_g17(tilt)}}));
                    }
                }
            } else {
                if (thresholds_text.empty())
                    throw std::invalid_argument("tail needs --thresholds or --lambda");
                const est::Model model = parse_model(model_name, n_prime);
                const auto curve = est::max_cdf_curve(shape, model, parse_double_list(thresholds_text),
                                                      samples, seed, shards);
                for (const auto& point : curve.points) {
                    if (format == "csv") {
                        lines.push_back(
                            io::format_g17(point.threshold) + "," +
                            (point.record.log_value ? io::format_g17(*point.record.log_value)
                                                    : "nan"));
                    } else {
                        lines.push_back(io::record_line(
                            point.record, {{"op", io::quote("tail")},
                                           {"model", io::quote(model_name)},
                                           {"threshold", io::format_g17(point.threshold)}}));
                    }
                }
            }
            run.write_results(lines);
            return 0;
        }

        if (cmd_name == "positivity") {
            const TreeShape shape(d, n);
            est::PositivityMethod m;
            if (method == "naive")
                m = est::PositivityMethod::naive;
            else if (method == "conditional")
                m = est::PositivityMethod::conditional;
            else
                throw std::invalid_argument("positivity methods: naive, conditional");
            const auto r = est::estimate_positivity(shape, samples, seed, shards, m);
            run.write_results({io::record_line(r, {{"op", io::quote("positivity")}})});
            std::fprintf(stderr, "positivity: value=%s stderr=%s (%.2f s)\n",
                         io::format_g17(r.value).c_str(), io::format_g17(r.std_error).c_str(),
                         r.wall_seconds);
            return 0;
        }

        if (cmd_name == "cond-mean") {
            const TreeShape shape(d, n);
            const auto r = est::estimate_conditional_mean(shape, samples, seed, shards);
            run.write_results({io::record_line(r, {{"op", io::quote("cond-mean")}})});
            std::fprintf(stderr, "cond-mean: value=%s stderr=%s (%.2f s)\n",
                         io::format_g17(r.value).c_str(), io::format_g17(r.std_error).c_str(),
                         r.wall_seconds);
            return 0;
        }

        if (cmd_name == "lambda-prime") {
            const TreeShape shape(d, n);
            const double lp = est::solve_lambda_prime(shape, cpp_const);
            std::string line = "{\"op\":\"lambda-prime\",\"d\":" + std::to_string(d) +
                               ",\"n\":" + std::to_string(n) +
                               ",\"cpp\":" + io::format_g17(cpp_const) +
                               ",\"value\":" + io::format_g17(lp) + "}";
            run.write_results({line});
            return 0;
        }

        if (cmd_name == "bounds") {
            const TreeShape shape(d, n);
            const auto centering = brwsim::brw::Centering::for_degree(d);
            std::vector<std::string> lines;
            if (kind == "positivity") {
                const double lp = lambda_prime_given >= 0.0
                                      ? lambda_prime_given
                                      : est::solve_lambda_prime(shape, params.cpp, centering);
                const auto b = est::positivity_bounds(shape, params, lp, centering);
                lines.push_back("{\"op\":\"bounds\",\"kind\":\"positivity\",\"d\":" +
                                std::to_string(d) + ",\"n\":" + std::to_string(n) +
                                ",\"lambda_prime\":" + io::format_g17(lp) +
                                ",\"log_lower\":" + io::format_g17(b.log_lower) +
                                ",\"log_upper\":" + io::format_g17(b.log_upper) + "}");
            } else if (kind == "left-tail") {
                if (lambdas_text.empty())
                    throw std::invalid_argument("left-tail bounds need --lambda");
                for (double lambda : parse_double_list(lambdas_text)) {
                    const auto b = est::left_tail_bounds(shape, lambda, params, centering);
                    lines.push_back("{\"op\":\"bounds\",\"kind\":\"left-tail\",\"d\":" +
                                    std::to_string(d) + ",\"n\":" + std::to_string(n) +
                                    ",\"lambda\":" + io::format_g17(lambda) +
                                    ",\"lower\":" + io::format_g17(b.lower) +
                                    ",\"upper\":" + io::format_g17(b.upper) +
                                    ",\"log_lower\":" + io::format_g17(b.log_lower) +
                                    ",\"log_upper\":" + io::format_g17(b.log_upper) + "}");
                }
            } else {
                throw std::invalid_argument("bounds kinds: positivity, left-tail");
            }
            run.write_results(lines);
            return 0;
        }

        if (cmd_name == "lemma-sum") {
            const auto s = est::log_weighted_power_sum(n, d);
            std::string line = "{\"op\":\"lemma-sum\",\"d\":" + std::to_string(d) +
                               ",\"n\":" + std::to_string(n) +
                               ",\"sum\":" + io::format_g17(s.sum) +
                               ",\"ratio\":" + io::format_g17(s.ratio) +
                               ",\"upper\":" + io::format_g17(s.upper) +
                               ",\"log_sum\":" + io::format_g17(s.log_sum) +
                               ",\"log_upper\":" + io::format_g17(s.log_upper) +
                               ",\"overflowed\":" + (s.overflowed ? "true" : "false") + "}";
            run.write_results({line});
            return 0;
        }

        std::cerr << "error: unhandled subcommand '" << cmd_name << "'\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
