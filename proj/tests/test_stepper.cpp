#include <doctest.h>

#include <cmath>
#include <vector>

#include "chaossup/models.hpp"
#include "chaossup/stepper.hpp"

using namespace chaossup;

namespace {

const RoundingOps kNearest(RoundingMode::ToNearestEven,
                           RoundingBackend::SoftwareEmulated);

VectorField linear_field() {
    return [](double, std::span<const double> y, std::span<double> dydt) {
        dydt[0] = y[0];
    };
}

VectorField zero_field() {
    return [](double, std::span<const double>, std::span<double> dydt) {
        for (double& v : dydt) v = 0.0;
    };
}

// y' = y over one step equals the order-p truncated exponential series
double truncated_exp(int p, double h) {
    double sum = 0.0, term = 1.0;
    for (int j = 0; j <= p; ++j) {
        sum += term;
        term *= h / (j + 1);
    }
    return sum;
}

double ulp_distance(double a, double b) {
    return std::fabs(a - b) / std::ldexp(1.0, std::ilogb(a) - 52);
}

} // namespace

TEST_CASE("a zero field fixes the state under any mode") {
    const double y0[3] = {1.0, 2.0, 3.0};
    for (RoundingMode mode : {RoundingMode::TowardNegInf,
                              RoundingMode::TowardPosInf,
                              RoundingMode::ToNearestEven}) {
        const RoundingOps ops(mode, RoundingBackend::SoftwareEmulated);
        for (const char* name : {"rk3", "rk4", "rk5"}) {
            const auto out = rk_step(find_tableau(name), zero_field(), 0.0,
                                     std::span<const double>(y0, 3), 0.1, ops);
            CHECK(out == std::vector<double>{1.0, 2.0, 3.0});
        }
    }
}

TEST_CASE("one rk4 step of y' = y matches the truncated series") {
    const double y0 = 1.0;
    const auto out = rk_step(find_tableau("rk4"), linear_field(), 0.0,
                             std::span<const double>(&y0, 1), 0.1, kNearest);
    const double oracle = truncated_exp(4, 0.1);
    CHECK(ulp_distance(out[0], oracle) <= 4);
    CHECK(out[0] == doctest::Approx(1.1051708333333332).epsilon(1e-15));
}

TEST_CASE("one rk3 step of y' = y matches the degree-3 series") {
    const double y0 = 1.0;
    const auto out = rk_step(find_tableau("rk3"), linear_field(), 0.0,
                             std::span<const double>(&y0, 1), 0.1, kNearest);
    CHECK(ulp_distance(out[0], truncated_exp(3, 0.1)) <= 4);
    CHECK(out[0] == doctest::Approx(1.1051666666666666).epsilon(1e-15));
}

TEST_CASE("integrate produces N+1 states") {
    StepperConfig cfg{0.1, 0.2, find_tableau("rk4")};
    const double y0[3] = {1.0, 2.0, 3.0};
    const StateSequence seq =
        integrate(cfg, zero_field(), std::span<const double>(y0, 3), kNearest);
    REQUIRE(seq.size() == 3);
    for (std::size_t k = 0; k < seq.size(); ++k) {
        CHECK(seq.state(k)[0] == 1.0);
        CHECK(seq.state(k)[1] == 2.0);
        CHECK(seq.state(k)[2] == 3.0);
    }

    StepperConfig table{0.01, 100.0, find_tableau("rk4")};
    CHECK(table.step_count() == 10000);
    const double one = 1.0;
    // 10001 states over the default horizon
    const StateSequence lin =
        integrate(table, linear_field(), std::span<const double>(&one, 1), kNearest);
    CHECK(lin.size() == 10001);
}

TEST_CASE("rk4 reaches e to within 5e-9 over [0,1]") {
    StepperConfig cfg{0.01, 1.0, find_tableau("rk4")};
    const double one = 1.0;
    const StateSequence seq =
        integrate(cfg, linear_field(), std::span<const double>(&one, 1), kNearest);
    CHECK(std::fabs(seq.state(seq.size() - 1)[0] - std::exp(1.0)) < 5e-9);
}

TEST_CASE("empirical convergence order matches each tableau") {
    for (const char* name : {"rk3", "rk4", "rk5"}) {
        const ButcherTableau& tab = find_tableau(name);
        double err[3];
        const double hs[3] = {0.1, 0.05, 0.025};
        for (int i = 0; i < 3; ++i) {
            StepperConfig cfg{hs[i], 1.0, tab};
            const double one = 1.0;
            const StateSequence seq = integrate(
                cfg, linear_field(), std::span<const double>(&one, 1), kNearest);
            err[i] = std::fabs(seq.state(seq.size() - 1)[0] - std::exp(1.0));
        }
        for (int i = 0; i + 1 < 3; ++i) {
            const double order = std::log2(err[i] / err[i + 1]);
            CAPTURE(name);
            CAPTURE(i);
            CHECK(order == doctest::Approx(tab.order).epsilon(0.3 / tab.order));
        }
    }
}

TEST_CASE("nonlinear fields are mode sensitive, constant fields are not") {
    const Experiment exp = default_experiment();
    const StepperConfig cfg{exp.h, 10.0, find_tableau("rk4")}; // 1000 steps
    const double y0[3] = {exp.y0.x, exp.y0.y, exp.y0.z};

    StateSequence out[2];
    const RoundingMode modes[2] = {RoundingMode::TowardNegInf,
                                   RoundingMode::TowardPosInf};
    for (int i = 0; i < 2; ++i) {
        const RoundingOps ops(modes[i], RoundingBackend::SoftwareEmulated);
        const VectorField f = [&](double, std::span<const double> y,
                                  std::span<double> dydt) {
            const StateVector d =
                lorenz_field(exp.params, {y[0], y[1], y[2]}, ops);
            dydt[0] = d.x;
            dydt[1] = d.y;
            dydt[2] = d.z;
        };
        out[i] = integrate(cfg, f, std::span<const double>(y0, 3), ops);
    }
    CHECK(out[0].data != out[1].data);

    for (int i = 0; i < 2; ++i) {
        const RoundingOps ops(modes[i], RoundingBackend::SoftwareEmulated);
        out[i] = integrate(cfg, zero_field(), std::span<const double>(y0, 3), ops);
    }
    CHECK(out[0].data == out[1].data);
}

TEST_CASE("divergence reports the first bad step") {
    // y' = y^2 from y=1 blows up in finite time
    const VectorField f = [](double, std::span<const double> y,
                             std::span<double> dydt) { dydt[0] = y[0] * y[0]; };
    StepperConfig cfg{0.5, 400.0, find_tableau("rk4")};
    const double one = 1.0;
    CHECK_THROWS_AS(
        integrate(cfg, f, std::span<const double>(&one, 1), kNearest),
        NonFiniteState);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS((StepperConfig{-0.1, 1.0, find_tableau("rk4")}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((StepperConfig{0.1, 0.0, find_tableau("rk4")}.validate()),
                    std::invalid_argument);
    CHECK_THROWS_AS((StepperConfig{1.0, 0.2, find_tableau("rk4")}.validate()),
                    std::invalid_argument);
    CHECK_NOTHROW((StepperConfig{0.1, 0.1, find_tableau("rk4")}.validate()));
}
