#include "chaossup/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chaossup/tableau.hpp"

namespace chaossup {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& key) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ConfigError(key, "not a number: '" + text + "'");
    return v;
}

namespace {

int parse_int(const std::string& text, const std::string& key) {
    int v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ConfigError(key, "not an integer: '" + text + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

ExperimentConfig::ExperimentConfig() {
    const Experiment e = default_experiment();
    params = e.params;
    y0 = e.y0;
    h = e.h;
    t_final = e.t_final;
}

StepperConfig ExperimentConfig::stepper() const {
    return StepperConfig{h, t_final, find_tableau(method)};
}

void ExperimentConfig::validate() const {
    try {
        find_model(model, params);
    } catch (const std::exception& e) {
        throw ConfigError("model", e.what());
    }
    try {
        find_tableau(method);
    } catch (const std::exception& e) {
        throw ConfigError("method", e.what());
    }
    if (!(h > 0.0)) throw ConfigError("h", "must be > 0");
    if (!(t_final > 0.0)) throw ConfigError("t_final", "must be > 0");
    if (std::llround(t_final / h) < 1)
        throw ConfigError("t_final", "shorter than one step");
    if (!std::isfinite(y0.x) || !std::isfinite(y0.y) || !std::isfinite(y0.z))
        throw ConfigError("x0", "initial state must be finite");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "model") model = value;
    else if (key == "sigma") params.sigma = parse_double(value, key);
    else if (key == "rho") params.rho = parse_double(value, key);
    else if (key == "beta") params.beta = parse_double(value, key);
    else if (key == "x0") y0.x = parse_double(value, key);
    else if (key == "y0") y0.y = parse_double(value, key);
    else if (key == "z0") y0.z = parse_double(value, key);
    else if (key == "h") h = parse_double(value, key);
    else if (key == "t_final") t_final = parse_double(value, key);
    else if (key == "method") method = value;
    else if (key == "filter") {
        if (value == "on") filter = true;
        else if (value == "off") filter = false;
        else throw ConfigError(key, "expected on|off");
    } else if (key == "rounding_backend") {
        if (value == "hardware") backend = RoundingBackend::HardwareEnv;
        else if (value == "emulated") backend = RoundingBackend::SoftwareEmulated;
        else throw ConfigError(key, "expected hardware|emulated");
    } else if (key == "policy") {
        if (value == "strict") policy = RoundingPolicy::Strict;
        else if (value == "matlab_faithful") policy = RoundingPolicy::MatlabFaithful;
        else throw ConfigError(key, "expected strict|matlab_faithful");
    }
    else if (key == "lyap_tau") lyapunov.delay = parse_int(value, key);
    else if (key == "lyap_m") lyapunov.dimension = parse_int(value, key);
    else if (key == "lyap_theiler") lyapunov.theiler_window = parse_int(value, key);
    else if (key == "lyap_fit_min") lyapunov.fit_min = parse_int(value, key);
    else if (key == "lyap_fit_max") lyapunov.fit_max = parse_int(value, key);
    else if (key == "lyap_neighbors") lyapunov.neighbor_count = parse_int(value, key);
    else if (key == "lyap_mi_bins") lyapunov.mi_bins = parse_int(value, key);
    else if (key == "out") out_path = value;
    else if (key == "report_out") report_path = value;
    else throw ConfigError(key, "unknown key");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("model", model);
    kv.emplace_back("sigma", format_double(params.sigma));
    kv.emplace_back("rho", format_double(params.rho));
    kv.emplace_back("beta", format_double(params.beta));
    kv.emplace_back("x0", format_double(y0.x));
    kv.emplace_back("y0", format_double(y0.y));
    kv.emplace_back("z0", format_double(y0.z));
    kv.emplace_back("h", format_double(h));
    kv.emplace_back("t_final", format_double(t_final));
    kv.emplace_back("method", method);
    kv.emplace_back("filter", filter ? "on" : "off");
    kv.emplace_back("rounding_backend", chaossup::to_string(backend));
    kv.emplace_back("policy", chaossup::to_string(policy));
    kv.emplace_back("lyap_tau", std::to_string(lyapunov.delay));
    kv.emplace_back("lyap_m", std::to_string(lyapunov.dimension));
    kv.emplace_back("lyap_theiler", std::to_string(lyapunov.theiler_window));
    kv.emplace_back("lyap_fit_min", std::to_string(lyapunov.fit_min));
    kv.emplace_back("lyap_fit_max", std::to_string(lyapunov.fit_max));
    kv.emplace_back("lyap_neighbors", std::to_string(lyapunov.neighbor_count));
    kv.emplace_back("lyap_mi_bins", std::to_string(lyapunov.mi_bins));
    if (!out_path.empty()) kv.emplace_back("out", out_path);
    if (!report_path.empty()) kv.emplace_back("report_out", report_path);
    return kv;
}

std::string ExperimentConfig::to_string() const {
    std::ostringstream os;
    for (const auto& [k, v] : to_kv()) os << k << " = " << v << "\n";
    return os.str();
}

ExperimentConfig ExperimentConfig::from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv) {
    ExperimentConfig cfg;
    for (const auto& [k, v] : kv) cfg.set(k, v);
    return cfg;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    return parse(in);
}

} // namespace chaossup
