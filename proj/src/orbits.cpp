#include "chaossup/orbits.hpp"

#include <cmath>

namespace chaossup {

const char* to_string(RoundingPolicy policy) noexcept {
    return policy == RoundingPolicy::Strict ? "strict" : "matlab_faithful";
}

StateVector average_filter(const StateVector& lower, const StateVector& upper) {
    return StateVector{
        dir_div(dir_add(lower.x, upper.x, RoundingMode::ToNearestEven), 2.0,
                RoundingMode::ToNearestEven),
        dir_div(dir_add(lower.y, upper.y, RoundingMode::ToNearestEven), 2.0,
                RoundingMode::ToNearestEven),
        dir_div(dir_add(lower.z, upper.z, RoundingMode::ToNearestEven), 2.0,
                RoundingMode::ToNearestEven)};
}

DivergenceSeries divergence(const CoupledOrbitPair& pair) {
    const std::size_t n = pair.lower.states.size();
    const std::size_t dim = pair.lower.states.dim;
    DivergenceSeries series;
    series.delta.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto lo = pair.lower.states.state(k);
        const auto hi = pair.upper.states.state(k);
        double d = 0.0;
        for (std::size_t c = 0; c < dim; ++c)
            d = std::max(d, std::fabs(hi[c] - lo[c]));
        series.delta.push_back(d);
    }
    return series;
}

PseudoOrbit run_traditional(const Model& model, const StateVector& y0,
                            const StepperConfig& config, RoundingMode mode,
                            RoundingBackend backend) {
    EnvScope scope(mode, backend);
    const RoundingOps ops(mode, backend);
    const VectorField f = [&model, &ops](double t, std::span<const double> y,
                                         std::span<double> dydt) {
        model.field(t, y, dydt, ops);
    };
    const double y0v[3] = {y0.x, y0.y, y0.z};

    PseudoOrbit orbit;
    orbit.states = integrate(config, f, {y0v, model.dim}, ops);
    orbit.mode = mode;
    orbit.backend = backend;
    orbit.tableau_name = config.tableau.name;
    orbit.h = config.h;
    return orbit;
}

namespace detail {

void coupled_rk_step(const ButcherTableau& tab, const Model& model, double t,
                     std::span<const double> y, std::span<const double> partner,
                     double h, RoundingMode directed, RoundingPolicy policy,
                     RoundingBackend backend, std::span<double> out) {
    const int s = tab.stages();
    const std::size_t dim = y.size();
    const RoundingOps near(RoundingMode::ToNearestEven, backend);

    std::vector<double> stages(static_cast<std::size_t>(s) * dim);
    std::vector<double> state(dim);
    std::vector<double> surrogate(dim);

    // combination-arithmetic mode; under MatlabFaithful the first
    // derivative call leaves the environment at nearest for the rest of
    // the step
    RoundingMode comb_mode = directed;

    for (int i = 0; i < s; ++i) {
        const RoundingOps comb(comb_mode, backend);
        for (std::size_t c = 0; c < dim; ++c) {
            double acc = 0.0;
            bool any = false;
            for (int j = 0; j < i; ++j) {
                const double aij = tab.a[i][j];
                if (aij == 0.0) continue;
                const double term = comb.mul(aij, stages[j * dim + c]);
                acc = any ? comb.add(acc, term) : term;
                any = true;
            }
            state[c] = any ? comb.add(y[c], comb.mul(h, acc)) : y[c];
        }
        const double ti =
            tab.c[i] == 0.0 ? t : comb.add(t, comb.mul(tab.c[i], h));

        // the derivative sees the midpoint of the stage state and the
        // frozen partner, both formed to nearest
        for (std::size_t c = 0; c < dim; ++c)
            surrogate[c] = near.div(near.add(state[c], partner[c]), 2.0);
        model.field(ti, surrogate, {stages.data() + i * dim, dim}, near);

        if (policy == RoundingPolicy::MatlabFaithful)
            comb_mode = RoundingMode::ToNearestEven;
    }

    const RoundingOps comb(comb_mode, backend);
    for (std::size_t c = 0; c < dim; ++c) {
        double acc = 0.0;
        bool any = false;
        for (int i = 0; i < s; ++i) {
            const double bi = tab.b[i];
            if (bi == 0.0) continue;
            const double term = comb.mul(bi, stages[i * dim + c]);
            acc = any ? comb.add(acc, term) : term;
            any = true;
        }
        out[c] = any ? comb.add(y[c], comb.mul(h, acc)) : y[c];
    }
}

} // namespace detail

CoupledOrbitPair run_filtered(const Model& model, const StateVector& y0,
                              const StepperConfig& config, RoundingPolicy policy,
                              RoundingBackend backend) {
    config.validate();
    const std::size_t n = config.step_count();
    const std::size_t dim = model.dim;
    const RoundingOps near(RoundingMode::ToNearestEven, backend);
    EnvScope scope(RoundingMode::ToNearestEven, backend);

    CoupledOrbitPair pair;
    for (PseudoOrbit* o : {&pair.lower, &pair.upper, &pair.averaged}) {
        o->states.dim = dim;
        o->states.data.reserve((n + 1) * dim);
        o->backend = backend;
        o->policy = policy;
        o->tableau_name = config.tableau.name;
        o->h = config.h;
    }
    pair.lower.mode = RoundingMode::TowardNegInf;
    pair.upper.mode = RoundingMode::TowardPosInf;
    pair.averaged.mode = RoundingMode::ToNearestEven;

    // both members start from the one shared initial state
    std::vector<double> lo(dim), hi(dim), lo_next(dim), hi_next(dim), avg(dim);
    const double y0v[3] = {y0.x, y0.y, y0.z};
    for (std::size_t c = 0; c < dim; ++c) lo[c] = hi[c] = avg[c] = y0v[c];
    pair.lower.states.append(lo);
    pair.upper.states.append(hi);
    pair.averaged.states.append(avg);

    for (std::size_t k = 0; k < n; ++k) {
        const double t = near.mul(static_cast<double>(k), config.h);
        // both members advance against the partner's pre-update state
        detail::coupled_rk_step(config.tableau, model, t, lo, hi, config.h,
                                RoundingMode::TowardNegInf, policy, backend,
                                lo_next);
        detail::coupled_rk_step(config.tableau, model, t, hi, lo, config.h,
                                RoundingMode::TowardPosInf, policy, backend,
                                hi_next);
        for (std::size_t c = 0; c < dim; ++c) {
            if (!std::isfinite(lo_next[c]) || !std::isfinite(hi_next[c]))
                throw NonFiniteState(k + 1);
            avg[c] = near.div(near.add(lo_next[c], hi_next[c]), 2.0);
        }
        pair.lower.states.append(lo_next);
        pair.upper.states.append(hi_next);
        pair.averaged.states.append(avg);
        lo.swap(lo_next);
        hi.swap(hi_next);
    }
    return pair;
}

} // namespace chaossup
