#ifndef CHAOSSUP_STEPPER_HPP
#define CHAOSSUP_STEPPER_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaossup/rounding.hpp"
#include "chaossup/tableau.hpp"

namespace chaossup {

/// A trajectory diverged: a stage or state picked up a NaN or infinity.
class NonFiniteState : public std::runtime_error {
public:
    explicit NonFiniteState(std::size_t step)
        : std::runtime_error("non-finite state at step " + std::to_string(step)),
          step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Time-indexed sequence of states stored flat, row-major.
struct StateSequence {
    std::size_t dim = 0;
    std::vector<double> data;

    std::size_t size() const noexcept { return dim ? data.size() / dim : 0; }
    std::span<const double> state(std::size_t k) const {
        return {data.data() + k * dim, dim};
    }
    std::span<double> state(std::size_t k) {
        return {data.data() + k * dim, dim};
    }
    void append(std::span<const double> s) {
        data.insert(data.end(), s.begin(), s.end());
    }
};

/// dydt <- f(t, y). The rounding contract of the arithmetic inside the
/// field belongs to the field itself (capture a RoundingOps when building
/// one); the stepper only controls its own combination arithmetic.
using VectorField =
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct StepperConfig {
    double h = 0.0;
    double t_final = 0.0;
    ButcherTableau tableau;

    std::size_t step_count() const;
    void validate() const; // throws std::invalid_argument
};

/// One explicit Runge-Kutta step: out = y + h*(sum_i b_i k_i) with stages
/// k_i = f(t + c_i*h, y + h*(sum_j a_ij k_j)).
///
/// Every combination operation (stage-state assembly, stage times and the
/// final update) goes through `ops`, with sums accumulated left-to-right
/// in stage index; directed rounding makes that order observable, so it is
/// part of the contract. Zero tableau coefficients contribute no
/// operations. `stages` must hold stages()*dim doubles of scratch.
void rk_step(const ButcherTableau& tab, const VectorField& f, double t,
             std::span<const double> y, double h, const RoundingOps& ops,
             std::span<double> out, std::span<double> stages);

/// Convenience form for small states.
std::vector<double> rk_step(const ButcherTableau& tab, const VectorField& f,
                            double t, std::span<const double> y, double h,
                            const RoundingOps& ops);

/// Fixed-step integration: returns [y_0, ..., y_N], N = config.step_count().
/// Step times t_k = k*h are computed through `ops` as well. Throws
/// NonFiniteState with the index of the first bad state.
StateSequence integrate(const StepperConfig& config, const VectorField& f,
                        std::span<const double> y0, const RoundingOps& ops);

} // namespace chaossup

#endif
