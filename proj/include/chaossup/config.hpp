#ifndef CHAOSSUP_CONFIG_HPP
#define CHAOSSUP_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chaossup/lyapunov.hpp"
#include "chaossup/models.hpp"
#include "chaossup/orbits.hpp"

namespace chaossup {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error("config key '" + key + "': " + what) {}
};

/// Everything a run needs, expressible as a flat key=value file so that a
/// run's effective configuration can be written next to its outputs and
/// replayed bit-for-bit.
struct ExperimentConfig {
    std::string model = "lorenz";
    LorenzParams params;      // sigma, rho, beta
    StateVector y0;           // x0, y0, z0
    double h = 0.01;
    double t_final = 100.0;
    std::string method = "rk4";
    bool filter = false;
    RoundingBackend backend = RoundingBackend::HardwareEnv;
    RoundingPolicy policy = RoundingPolicy::Strict;
    EmbeddingConfig lyapunov; // lyap_* keys
    std::string out_path;
    std::string report_path;

    ExperimentConfig();      // Table-style defaults via default_experiment()

    void validate() const;   // throws ConfigError with the offending key

    StepperConfig stepper() const;

    /// Ordered key=value view, round-trip exact (shortest decimal that
    /// parses back to the same binary64).
    std::vector<std::pair<std::string, std::string>> to_kv() const;
    std::string to_string() const;

    static ExperimentConfig from_kv(
        const std::vector<std::pair<std::string, std::string>>& kv);
    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig load(const std::string& path);

    /// Applies one key=value assignment (CLI overrides reuse this).
    void set(const std::string& key, const std::string& value);
};

/// Shortest decimal form of a double that round-trips bit-exactly.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& key);

} // namespace chaossup

#endif
