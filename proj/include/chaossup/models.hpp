#ifndef CHAOSSUP_MODELS_HPP
#define CHAOSSUP_MODELS_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaossup/rounding.hpp"
#include "chaossup/stepper.hpp"

namespace chaossup {

/// Parameters of the convection model: sigma the Prandtl number, rho the
/// Rayleigh number, beta the geometric factor.
struct LorenzParams {
    double sigma = 7.6;
    double rho = 65.0;
    double beta = 5.3;

    void validate() const; // throws std::invalid_argument
};

/// (x, y, z): intensity of the convective motion, temperature-difference
/// proxy, distortion of the vertical temperature profile.
struct StateVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Derivative of the convection system:
///   x' = sigma*(y - x)
///   y' = x*(rho - z) - y
///   z' = x*y - beta*z
/// Every elementary operation goes through `ops` in exactly the order the
/// equations read; directed rounding observes that order, so it is fixed.
StateVector lorenz_field(const LorenzParams& p, const StateVector& s,
                         const RoundingOps& ops);

/// A named vector field of fixed dimension; the rounding contract of the
/// field arithmetic is the caller's via the RoundingOps argument.
struct Model {
    std::string name;
    std::size_t dim = 0;
    std::function<void(double t, std::span<const double> y,
                       std::span<double> dydt, const RoundingOps& ops)>
        field;
};

/// "lorenz" (parameterized) and "zero3" (f == 0, for calibration runs).
/// Throws std::out_of_range for unknown names.
Model find_model(const std::string& name, const LorenzParams& params);
std::vector<std::string> model_names();

/// The default experiment: sigma=7.6, rho=65, beta=5.3 from y0 =
/// (0.06735, 1.8841, 15.7734), h = 10 ms, 100 s horizon. Decimal literals
/// are parsed once, to nearest, and shared by every orbit of a run.
struct Experiment {
    LorenzParams params;
    StateVector y0;
    double h = 0.0;
    double t_final = 0.0;
};
Experiment default_experiment() noexcept;

} // namespace chaossup

#endif
