#include "peaky/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "peaky/analytic.hpp"
#include "peaky/errors.hpp"
#include "peaky/montecarlo.hpp"
#include "peaky/rng.hpp"
#include "peaky/validation.hpp"

#ifndef PEAKY_VERSION
#define PEAKY_VERSION "0.0.0"
#endif

namespace peaky::cli {

namespace {

// Thrown for bad flags or config values; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto log = std::make_shared<spdlog::logger>("peaky", sink);
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("PEAKY_LOG")) log->set_level(spdlog::level::from_str(env));
    return log;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> sweep_values(const ScenarioConfig& c) {
    if (!c.sweep) throw UsageError("a sweep is required (--ebn0-db or --snr-db, or in the config)");
    return c.sweep->values();
}

std::string sweep_text(const ScenarioConfig& c) {
    if (!c.sweep) return "";
    return std::string(c.axis == SweepAxis::SnrDb ? "snr_db=" : "ebn0_db=") + c.sweep->text();
}

// One sweep point; the swept quantity is written as given rather than
// recomputed through the dB conversion.
struct Point {
    Scenario scenario;
    double K;
    SweepAxis axis;
    double axis_db;
};

std::string row_prefix(const Point& p) {
    const auto& sc = p.scenario;
    const double ebn0_db = p.axis == SweepAxis::EbN0Db ? p.axis_db : to_db(sc.link.ebn0);
    std::ostringstream os;
    os << to_string(sc.modulation.scheme()) << ',' << to_string(sc.fading.regime()) << ','
       << sc.modulation.M() << ',' << format_number(sc.modulation.nu()) << ',' << format_number(p.K) << ','
       << format_number(sc.fading.omega()) << ',' << format_number(sc.link.snr) << ','
       << format_number(ebn0_db);
    return os.str();
}

template <class F>
void for_each_point(const ScenarioConfig& c, F&& f) {
    const auto values = sweep_values(c);
    for (int M : c.M) {
        for (double nu : c.nu) {
            for (double K : c.K) {
                for (double v : values) f(Point{c.scenario(M, nu, K, v), K, c.axis, v});
            }
        }
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

// ---- flag handling ---------------------------------------------------------

struct ScenarioFlags {
    std::string config;
    std::string scheme, regime;
    std::vector<int> M;
    std::vector<double> nu;
    std::vector<std::string> K;
    std::optional<double> omega;
    std::string ebn0_db, snr_db;
    std::string out;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f) {
    app->add_option("--config", f.config, "JSON scenario config");
    app->add_option("--scheme", f.scheme, "oopsk | oofsk");
    app->add_option("--regime", f.regime, "coherent | noncoherent");
    app->add_option("--M", f.M, "constellation size(s), comma separated")->delimiter(',');
    app->add_option("--nu", f.nu, "duty cycle(s), comma separated")->delimiter(',');
    app->add_option("--K", f.K, "Rician factor(s), comma separated; 'inf' allowed")->delimiter(',');
    app->add_option("--omega", f.omega, "E|h|^2");
    app->add_option("--ebn0-db", f.ebn0_db, "Eb/N0 grid A:B:S in dB");
    app->add_option("--snr-db", f.snr_db, "SNR grid A:B:S in dB");
    app->add_option("--out", f.out, "output CSV path (default: stdout)");
}

ScenarioConfig build_config(const ScenarioFlags& f) {
    ScenarioConfig c = f.config.empty() ? ScenarioConfig{} : load_config(f.config);
    if (!f.scheme.empty()) c.scheme = parse_scheme(f.scheme);
    if (!f.regime.empty()) c.regime = parse_coherence(f.regime);
    if (!f.M.empty()) c.M = f.M;
    if (!f.nu.empty()) c.nu = f.nu;
    if (!f.K.empty()) {
        c.K.clear();
        for (const auto& k : f.K) c.K.push_back(parse_number(k));
    }
    if (f.omega) c.omega = *f.omega;
    if (!f.ebn0_db.empty() && !f.snr_db.empty()) throw UsageError("give --ebn0-db or --snr-db, not both");
    if (!f.ebn0_db.empty()) {
        c.axis = SweepAxis::EbN0Db;
        c.sweep = parse_grid(f.ebn0_db);
    }
    if (!f.snr_db.empty()) {
        c.axis = SweepAxis::SnrDb;
        c.sweep = parse_grid(f.snr_db);
    }
    // Re-validate after overrides.
    return parse_config(c.to_json());
}

void emit(const std::string& command, const ScenarioConfig& config, std::uint64_t seed,
          const std::string& csv, const std::vector<std::pair<std::string, std::string>>& side_files,
          const std::string& out_path, std::ostream& out, spdlog::logger& log) {
    if (out_path.empty()) {
        out << csv;
        return;
    }
    RunManifest m;
    m.tool_version = tool_version();
    m.command = command;
    m.scenario = config.to_json();
    m.sweep = sweep_text(config);
    m.seed = seed;
    m.timestamp = utc_now();
    write_file(out_path, csv);
    m.output_paths.push_back(out_path);
    for (const auto& [suffix, text] : side_files) {
        write_file(out_path + suffix, text);
        m.output_paths.push_back(out_path + suffix);
    }
    write_file(out_path + ".manifest.json", m.to_json());
    log.info("wrote {} and {} side file(s)", out_path, side_files.size() + 1);
}

}  // namespace

std::string tool_version() { return PEAKY_VERSION; }

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["scenario"] = nlohmann::json::parse(scenario);
    j["sweep"] = sweep;
    j["seed"] = seed;
    j["timestamp"] = timestamp;
    j["output_paths"] = output_paths;
    return j.dump(2) + "\n";
}

std::string analytic_csv(const ScenarioConfig& config, std::string* thresholds) {
    std::ostringstream csv, taus;
    csv << kErrorRateHeader << '\n';
    taus << "scheme,coherence,M,nu,K,omega,snr,ebn0_db,tau\n";
    for_each_point(config, [&](const Point& p) {
        const auto& sc = p.scenario;
        const auto b = error_probability(sc);
        const auto prefix = row_prefix(p);
        csv << prefix << ',' << format_number(b.pe) << ',' << format_number(b.pc_s0) << ','
            << format_number(b.pc_s1) << ",,,,\n";
        taus << prefix << ',' << format_number(reference_threshold(sc)) << '\n';
    });
    if (thresholds) *thresholds = taus.str();
    return csv.str();
}

std::string simulate_csv(const ScenarioConfig& config, std::int64_t trials, std::uint64_t seed, int workers) {
    std::ostringstream csv;
    csv << kErrorRateHeader << '\n';
    std::uint64_t row = 0;
    SimulationOptions opts;
    opts.workers = workers;
    for_each_point(config, [&](const Point& p) {
        const std::uint64_t row_seed = splitmix64(seed + row++);
        const auto r = simulate(p.scenario, trials, row_seed, opts);
        csv << row_prefix(p) << ",,,," << format_number(r.pe_hat) << ',' << format_number(r.std_error) << ','
            << r.trials << ',' << r.seed << '\n';
    });
    return csv.str();
}

std::string exponent_csv(const ScenarioConfig& config, const ExponentOptions& options, std::string* e0_table) {
    if (config.K.size() != 1) throw UsageError("exponent runs take a single K (the CSV has no K column)");
    struct Item {
        Scenario scenario;
        ExponentModel model;
    };
    std::vector<Item> items;
    for_each_point(config, [&](const Point& p) { items.push_back({p.scenario, ExponentModel(p.scenario, options)}); });

    std::vector<double> rates;
    if (config.rates) {
        rates = config.rates->values();
        if (config.rates_in_bits) {
            for (double& r : rates) r *= std::numbers::ln2;
        }
    } else {
        double top = std::numeric_limits<double>::infinity();
        for (const auto& it : items) top = std::min(top, it.model.slope_at_zero());
        for (int k = 0; k <= 40; ++k) rates.push_back(top * k / 40.0);
    }

    std::ostringstream csv, e0s;
    csv << kExponentHeader << '\n';
    e0s << "scheme,coherence,M,nu,snr,rho,e0\n";
    for (const auto& it : items) {
        const auto& sc = it.scenario;
        const auto curve = it.model.curve(rates);
        std::ostringstream prefix;
        prefix << to_string(sc.modulation.scheme()) << ',' << to_string(sc.fading.regime()) << ','
               << sc.modulation.M() << ',' << format_number(sc.modulation.nu()) << ','
               << format_number(sc.link.snr);
        for (const auto& p : curve.points) {
            csv << prefix.str() << ',' << format_number(p.rate) << ',' << format_number(p.exponent) << ','
                << format_number(p.rho_star) << ',' << format_number(curve.integration_stderr) << '\n';
        }
        for (const auto& [rho, v] : curve.e0_grid) {
            e0s << prefix.str() << ',' << format_number(rho) << ',' << format_number(v) << '\n';
        }
    }
    if (e0_table) *e0_table = e0s.str();
    return csv.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto log = make_logger(err);

    CLI::App app{"Error probabilities and error exponents of peaky OOPSK/OOFSK signaling"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    ScenarioFlags an_flags, sim_flags, exp_flags;
    auto* analytic = app.add_subcommand("analytic", "analytic error probabilities over a sweep");
    add_scenario_flags(analytic, an_flags);

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo error rates over a sweep");
    add_scenario_flags(simulate_cmd, sim_flags);
    std::optional<std::int64_t> trials;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    simulate_cmd->add_option("--trials", trials, "symbols per sweep point (>= 1000)");
    simulate_cmd->add_option("--seed", seed, "base seed");
    simulate_cmd->add_option("--workers", workers, "OpenMP threads (0 = default)");

    auto* exponent = app.add_subcommand("exponent", "random coding error exponents");
    add_scenario_flags(exponent, exp_flags);
    std::string rates;
    bool bits = false;
    ExponentOptions exp_opts;
    exponent->add_option("--rates", rates, "rate grid A:B:S (nats unless --bits)");
    exponent->add_flag("--bits", bits, "read --rates in bits per symbol");
    exponent->add_option("--rho-points", exp_opts.rho_points, "points of the reported E0 grid");
    exponent->add_option("--workers", exp_opts.workers, "OpenMP threads (0 = default)");
    exponent->add_option("--seed", exp_opts.mc_seed, "seed for Monte Carlo E0 integration");

    auto* validate = app.add_subcommand("validate", "run the analytic-vs-simulation acceptance checks");
    ValidationOptions val;
    validate->add_option("--trials", val.trials, "symbols per grid cell");
    validate->add_option("--seed", val.seed, "base seed");
    validate->add_option("--workers", val.workers, "OpenMP threads (0 = default)");
    validate->add_option("--perturb-tau", val.perturb_tau, "scale analytic thresholds by (1 + x); test hook");
    validate->add_flag("--smoke", val.smoke, "four grid cells only");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analytic->parsed()) {
            const auto config = build_config(an_flags);
            std::string taus;
            const auto csv = analytic_csv(config, &taus);
            emit("analytic", config, 0, csv, {{".thresholds.csv", taus}}, an_flags.out, out, *log);
        } else if (simulate_cmd->parsed()) {
            auto config = build_config(sim_flags);
            const std::int64_t n = trials.value_or(config.trials.value_or(1'000'000));
            const std::uint64_t s = seed.value_or(config.seed.value_or(1));
            if (n < 1000) throw UsageError("--trials must be >= 1000");
            if (workers < 0) throw UsageError("--workers must be >= 0");
            config.trials = n;
            config.seed = s;
            const auto csv = simulate_csv(config, n, s, workers);
            emit("simulate", config, s, csv, {}, sim_flags.out, out, *log);
        } else if (exponent->parsed()) {
            auto config = build_config(exp_flags);
            if (!rates.empty()) {
                config.rates = parse_grid(rates);
                config.rates_in_bits = bits;
            } else if (bits && config.rates) {
                config.rates_in_bits = true;
            }
            if (exp_opts.rho_points < 2) throw UsageError("--rho-points must be >= 2");
            std::string e0s;
            const auto csv = exponent_csv(config, exp_opts, &e0s);
            emit("exponent", config, exp_opts.mc_seed, csv, {{".e0.csv", e0s}}, exp_flags.out, out, *log);
        } else if (validate->parsed()) {
            if (val.trials < 1000) throw UsageError("--trials must be >= 1000");
            const auto report = run_validation(val, out);
            return report.passed() ? kExitOk : kExitFailure;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace peaky::cli
