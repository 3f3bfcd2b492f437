#include "peaky/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "peaky/errors.hpp"

namespace peaky {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_double(const std::string& text, const char* what) {
    if (text == "inf" || text == "Inf" || text == "infinity") return kInf;
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw DomainError(std::string("cannot parse ") + what + " from '" + text + "'");
    }
    return v;
}

double number_or_inf(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_double(j.get<std::string>(), what);
    throw DomainError(std::string(what) + " must be a number");
}

template <class T, class Read>
std::vector<T> scalar_or_list(const json& j, const char* what, Read read) {
    std::vector<T> out;
    if (j.is_array()) {
        for (const auto& e : j) out.push_back(read(e));
    } else {
        out.push_back(read(j));
    }
    if (out.empty()) throw DomainError(std::string(what) + " list is empty");
    return out;
}

Grid grid_from(const json& j, const char* what) {
    if (j.is_number()) {
        const double v = j.get<double>();
        return {v, v, 1.0};
    }
    if (j.is_string()) return parse_grid(j.get<std::string>());
    throw DomainError(std::string(what) + " must be a number or an 'A:B:S' string");
}

json number_json(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

}  // namespace

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw NumericError("format_number failed");
    return std::string(buf, ptr);
}

std::vector<double> Grid::values() const {
    const auto n = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) v.push_back(start + static_cast<double>(k) * step);
    return v;
}

std::string Grid::text() const {
    return format_number(start) + ":" + format_number(stop) + ":" + format_number(step);
}

double parse_number(const std::string& text) { return parse_double(text, "number"); }

Grid parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    Grid g;
    if (parts.size() == 1) {
        g.start = g.stop = parse_double(parts[0], "grid value");
    } else if (parts.size() == 3) {
        g.start = parse_double(parts[0], "grid start");
        g.stop = parse_double(parts[1], "grid stop");
        g.step = parse_double(parts[2], "grid step");
    } else {
        throw DomainError("grid must be 'start:stop:step' or a single number, got '" + text + "'");
    }
    if (!std::isfinite(g.start) || !std::isfinite(g.stop) || !std::isfinite(g.step)) {
        throw DomainError("grid values must be finite");
    }
    if (!(g.step > 0.0)) throw DomainError("grid step must be > 0");
    if (g.stop < g.start) throw DomainError("grid stop must be >= start");
    if ((g.stop - g.start) / g.step > 1e6) throw DomainError("grid has more than 1e6 points");
    return g;
}

Scenario ScenarioConfig::scenario(int m, double n, double k, double axis_db) const {
    ModulationSpec mod(scheme, m, n);
    auto fading = FadingSpec::from_rician(regime, k, omega);
    const auto link = axis == SweepAxis::SnrDb ? LinkOperatingPoint::from_snr(from_db(axis_db), mod)
                                               : LinkOperatingPoint::from_ebn0(from_db(axis_db), mod);
    return {mod, fading, link};
}

std::string ScenarioConfig::to_json() const {
    json j;
    j["scheme"] = to_string(scheme);
    j["regime"] = to_string(regime);
    j["M"] = M;
    j["nu"] = nu;
    json ks = json::array();
    for (double k : K) ks.push_back(number_json(k));
    j["K"] = ks;
    j["omega"] = omega;
    if (sweep) j[axis == SweepAxis::SnrDb ? "snr_db" : "ebn0_db"] = sweep->text();
    if (rates) {
        j["rates"] = rates->text();
        j["rates_unit"] = rates_in_bits ? "bits" : "nats";
    }
    if (trials) j["trials"] = *trials;
    if (seed) j["seed"] = *seed;
    return j.dump(2);
}

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    static const char* known[] = {"scheme", "M",      "nu",     "regime", "K",          "omega",
                                  "snr_db", "ebn0_db", "rates", "rates_unit", "trials", "seed",
                                  "description"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw DomainError("unknown config key '" + key + "'");
    }

    ScenarioConfig c;
    try {
        if (j.contains("scheme")) c.scheme = parse_scheme(j["scheme"].get<std::string>());
        if (j.contains("regime")) c.regime = parse_coherence(j["regime"].get<std::string>());
        if (j.contains("M")) c.M = scalar_or_list<int>(j["M"], "M", [](const json& e) { return e.get<int>(); });
        if (j.contains("nu")) {
            c.nu = scalar_or_list<double>(j["nu"], "nu", [](const json& e) { return e.get<double>(); });
        }
        if (j.contains("K")) {
            c.K = scalar_or_list<double>(j["K"], "K", [](const json& e) { return number_or_inf(e, "K"); });
        }
        if (j.contains("omega")) c.omega = j["omega"].get<double>();
        if (j.contains("snr_db") && j.contains("ebn0_db")) {
            throw DomainError("config may give snr_db or ebn0_db, not both");
        }
        if (j.contains("snr_db")) {
            c.axis = SweepAxis::SnrDb;
            c.sweep = grid_from(j["snr_db"], "snr_db");
        } else if (j.contains("ebn0_db")) {
            c.axis = SweepAxis::EbN0Db;
            c.sweep = grid_from(j["ebn0_db"], "ebn0_db");
        }
        if (j.contains("rates")) c.rates = grid_from(j["rates"], "rates");
        if (j.contains("rates_unit")) {
            const auto unit = j["rates_unit"].get<std::string>();
            if (unit != "bits" && unit != "nats") throw DomainError("rates_unit must be bits or nats");
            c.rates_in_bits = unit == "bits";
        }
        if (j.contains("trials")) c.trials = j["trials"].get<std::int64_t>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw DomainError(std::string("config has a field of the wrong type: ") + e.what());
    }

    // Validate every combination up front.
    for (int m : c.M) {
        for (double n : c.nu) ModulationSpec(c.scheme, m, n);
    }
    for (double k : c.K) FadingSpec::from_rician(c.regime, k, c.omega);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace peaky
