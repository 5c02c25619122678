#ifndef CHAOSSUP_ORBITS_HPP
#define CHAOSSUP_ORBITS_HPP

#include <span>
#include <string>
#include <vector>

#include "chaossup/models.hpp"
#include "chaossup/rounding.hpp"
#include "chaossup/stepper.hpp"

namespace chaossup {

/// Mode discipline of a coupled run.
///
/// Strict: stage assembly and the final update of each member orbit run
/// under that orbit's directed mode; the surrogate averaging and the
/// derivative arithmetic run to nearest.
///
/// MatlabFaithful: the directed mode is set once at the top of each step
/// and left wherever the derivative evaluation puts it (to nearest, which
/// it never restores), so combination arithmetic after the first stage
/// runs to nearest as well.
enum class RoundingPolicy { Strict, MatlabFaithful };

const char* to_string(RoundingPolicy policy) noexcept;

/// One finite-precision trajectory together with the provenance that
/// produced it.
struct PseudoOrbit {
    StateSequence states;
    RoundingMode mode = RoundingMode::ToNearestEven;
    RoundingBackend backend = RoundingBackend::HardwareEnv;
    RoundingPolicy policy = RoundingPolicy::Strict;
    std::string tableau_name;
    double h = 0.0;
};

/// The toward-neg-inf orbit, the toward-pos-inf orbit and their per-step
/// midpoint. All three share the time grid.
struct CoupledOrbitPair {
    PseudoOrbit lower;
    PseudoOrbit upper;
    PseudoOrbit averaged;
};

/// Per-step max-norm separation of the coupled pair. A computable proxy
/// for how far the two directed orbits have drifted apart; zero at step 0
/// when both start from the shared initial state.
struct DivergenceSeries {
    std::vector<double> delta;
};

/// Component-wise (a+b)/2 to nearest; commutative, and the identity when
/// both arguments agree.
StateVector average_filter(const StateVector& lower, const StateVector& upper);

DivergenceSeries divergence(const CoupledOrbitPair& pair);

/// Single orbit of `model` integrated entirely under `mode`.
PseudoOrbit run_traditional(const Model& model, const StateVector& y0,
                            const StepperConfig& config,
                            RoundingMode mode = RoundingMode::ToNearestEven,
                            RoundingBackend backend = RoundingBackend::HardwareEnv);

/// The coupled dual-rounding run. Per step k, the lower orbit advances one
/// RK step under toward-neg-inf in which every derivative evaluation at a
/// stage state s sees the surrogate midpoint(s, upper[k]); the upper orbit
/// advances symmetrically under toward-pos-inf against the pre-update
/// lower[k]. The partner state stays frozen for all stages of a step.
/// averaged[k+1] = midpoint(lower[k+1], upper[k+1]) to nearest.
CoupledOrbitPair run_filtered(const Model& model, const StateVector& y0,
                              const StepperConfig& config,
                              RoundingPolicy policy = RoundingPolicy::Strict,
                              RoundingBackend backend = RoundingBackend::HardwareEnv);

namespace detail {

/// One member-orbit step of the coupled scheme, dimension-generic.
/// `partner` is the frozen partner state for every stage of this step.
void coupled_rk_step(const ButcherTableau& tab, const Model& model, double t,
                     std::span<const double> y, std::span<const double> partner,
                     double h, RoundingMode directed, RoundingPolicy policy,
                     RoundingBackend backend, std::span<double> out);

} // namespace detail

} // namespace chaossup

#endif
