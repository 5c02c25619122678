#include "chaossup/models.hpp"

#include <cmath>
#include <stdexcept>

namespace chaossup {

void LorenzParams::validate() const {
    if (!std::isfinite(sigma) || !std::isfinite(rho) || !std::isfinite(beta))
        throw std::invalid_argument("lorenz parameters must be finite");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
}

StateVector lorenz_field(const LorenzParams& p, const StateVector& s,
                         const RoundingOps& ops) {
    StateVector d;
    d.x = ops.mul(p.sigma, ops.sub(s.y, s.x));
    d.y = ops.sub(ops.mul(s.x, ops.sub(p.rho, s.z)), s.y);
    d.z = ops.sub(ops.mul(s.x, s.y), ops.mul(p.beta, s.z));
    return d;
}

Model find_model(const std::string& name, const LorenzParams& params) {
    if (name == "lorenz") {
        params.validate();
        return Model{
            "lorenz", 3,
            [params](double, std::span<const double> y, std::span<double> dydt,
                     const RoundingOps& ops) {
                const StateVector d =
                    lorenz_field(params, {y[0], y[1], y[2]}, ops);
                dydt[0] = d.x;
                dydt[1] = d.y;
                dydt[2] = d.z;
            }};
    }
    if (name == "zero3") {
        return Model{"zero3", 3,
                     [](double, std::span<const double>, std::span<double> dydt,
                        const RoundingOps&) {
                         for (double& v : dydt) v = 0.0;
                     }};
    }
    throw std::out_of_range("unknown model '" + name + "' (have: lorenz, zero3)");
}

std::vector<std::string> model_names() { return {"lorenz", "zero3"}; }

Experiment default_experiment() noexcept {
    Experiment e;
    e.params = LorenzParams{7.6, 65.0, 5.3};
    e.y0 = StateVector{0.06735, 1.8841, 15.7734};
    e.h = 0.01;
    e.t_final = 100.0;
    return e;
}

} // namespace chaossup
