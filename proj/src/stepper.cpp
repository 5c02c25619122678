#include "chaossup/stepper.hpp"

#include <cmath>

namespace chaossup {

std::size_t StepperConfig::step_count() const {
    return static_cast<std::size_t>(std::llround(t_final / h));
}

void StepperConfig::validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("step size h must be > 0");
    if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be > 0");
    if (step_count() < 1)
        throw std::invalid_argument("t_final/h rounds to zero steps");
    tableau.validate();
}

void rk_step(const ButcherTableau& tab, const VectorField& f, double t,
             std::span<const double> y, double h, const RoundingOps& ops,
             std::span<double> out, std::span<double> stages) {
    const int s = tab.stages();
    const std::size_t dim = y.size();

    std::vector<double> state(dim); // stage state buffer
    for (int i = 0; i < s; ++i) {
        std::span<double> ki = stages.subspan(i * dim, dim);
        // stage state: y + h*(sum_j a_ij k_j), inner sum left-to-right
        for (std::size_t c = 0; c < dim; ++c) {
            double acc = 0.0;
            bool any = false;
            for (int j = 0; j < i; ++j) {
                const double aij = tab.a[i][j];
                if (aij == 0.0) continue;
                const double term = ops.mul(aij, stages[j * dim + c]);
                acc = any ? ops.add(acc, term) : term;
                any = true;
            }
            state[c] = any ? ops.add(y[c], ops.mul(h, acc)) : y[c];
        }
        const double ti =
            tab.c[i] == 0.0 ? t : ops.add(t, ops.mul(tab.c[i], h));
        f(ti, state, ki);
    }

    // final update: y + h*(sum_i b_i k_i), left-to-right in i
    for (std::size_t c = 0; c < dim; ++c) {
        double acc = 0.0;
        bool any = false;
        for (int i = 0; i < s; ++i) {
            const double bi = tab.b[i];
            if (bi == 0.0) continue;
            const double term = ops.mul(bi, stages[i * dim + c]);
            acc = any ? ops.add(acc, term) : term;
            any = true;
        }
        out[c] = any ? ops.add(y[c], ops.mul(h, acc)) : y[c];
    }
}

std::vector<double> rk_step(const ButcherTableau& tab, const VectorField& f,
                            double t, std::span<const double> y, double h,
                            const RoundingOps& ops) {
    std::vector<double> out(y.size());
    std::vector<double> stages(static_cast<std::size_t>(tab.stages()) * y.size());
    rk_step(tab, f, t, y, h, ops, out, stages);
    return out;
}

StateSequence integrate(const StepperConfig& config, const VectorField& f,
                        std::span<const double> y0, const RoundingOps& ops) {
    config.validate();
    const std::size_t n = config.step_count();
    const std::size_t dim = y0.size();

    StateSequence seq;
    seq.dim = dim;
    seq.data.reserve((n + 1) * dim);
    seq.append(y0);

    std::vector<double> cur(y0.begin(), y0.end());
    std::vector<double> next(dim);
    std::vector<double> stages(static_cast<std::size_t>(config.tableau.stages()) * dim);

    for (std::size_t k = 0; k < n; ++k) {
        const double t = ops.mul(static_cast<double>(k), config.h);
        rk_step(config.tableau, f, t, cur, config.h, ops, next, stages);
        for (double v : next)
            if (!std::isfinite(v)) throw NonFiniteState(k + 1);
        seq.append(next);
        cur.swap(next);
    }
    return seq;
}

} // namespace chaossup
