#include <doctest.h>

#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "chaossup/rounding.hpp"

using namespace chaossup;
using Rat = boost::multiprecision::cpp_rational;

namespace {

const RoundingMode kModes[] = {RoundingMode::TowardNegInf,
                               RoundingMode::TowardPosInf,
                               RoundingMode::ToNearestEven};

double dir_op(char op, double a, double b, RoundingMode m) {
    switch (op) {
        case '+': return dir_add(a, b, m);
        case '-': return dir_sub(a, b, m);
        case '*': return dir_mul(a, b, m);
        default: return dir_div(a, b, m);
    }
}

double hw_op(char op, double a, double b, const RoundingOps& ops) {
    switch (op) {
        case '+': return ops.add(a, b);
        case '-': return ops.sub(a, b);
        case '*': return ops.mul(a, b);
        default: return ops.div(a, b);
    }
}

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// mixed operand generator: everyday magnitudes, full-exponent-range bit
// patterns and subnormals
struct OperandGen {
    std::mt19937_64 rng{20240907};
    std::uniform_real_distribution<double> uni{-1000.0, 1000.0};

    double next() {
        switch (rng() % 4) {
            case 0:
            case 1: return uni(rng);
            case 2: { // random finite bit pattern
                for (;;) {
                    const double v = std::bit_cast<double>(rng());
                    if (std::isfinite(v)) return v;
                }
            }
            default: { // subnormal / tiny
                const std::uint64_t frac = rng() & ((std::uint64_t(1) << 52) - 1);
                const std::uint64_t sign = (rng() & 1) << 63;
                return std::bit_cast<double>(sign | frac);
            }
        }
    }
};

Rat rat(double x) { return Rat(x); }

// exact-rational oracle: r must be the representable on the requested side
// of the exact value, adjacent to it
void check_against_oracle(char op, double a, double b) {
    if (op == '/' && b == 0.0) return;
    Rat exact;
    switch (op) {
        case '+': exact = rat(a) + rat(b); break;
        case '-': exact = rat(a) - rat(b); break;
        case '*': exact = rat(a) * rat(b); break;
        default: exact = rat(a) / rat(b); break;
    }
    static const Rat kFringe = Rat(std::ldexp(1.0, 1020));
    if (exact > kFringe || exact < -kFringe) return; // overflow fringe: edge tests cover it

    const double dn = dir_op(op, a, b, RoundingMode::TowardNegInf);
    const double up = dir_op(op, a, b, RoundingMode::TowardPosInf);
    const double nr = dir_op(op, a, b, RoundingMode::ToNearestEven);

    REQUIRE(std::isfinite(dn));
    REQUIRE(std::isfinite(up));
    CHECK(rat(dn) <= exact);
    CHECK(rat(std::nextafter(dn, HUGE_VAL)) > exact);
    CHECK(rat(up) >= exact);
    CHECK(rat(std::nextafter(up, -HUGE_VAL)) < exact);

    const Rat err = abs(rat(nr) - exact);
    const double lo = std::nextafter(nr, -HUGE_VAL);
    const double hi = std::nextafter(nr, HUGE_VAL);
    const Rat err_lo = abs(rat(lo) - exact);
    Rat err_hi;
    if (std::isinf(hi))
        err_hi = err + 1;
    else
        err_hi = abs(rat(hi) - exact);
    CHECK(err <= err_lo);
    CHECK(err <= err_hi);
    if (err != 0 && (err == err_lo || err == err_hi)) {
        // tie: the kept significand must be even
        CHECK((std::bit_cast<std::uint64_t>(nr) & 1) == 0);
    }
}

} // namespace

TEST_CASE("rational conversion of doubles is exact") {
    CHECK(rat(0.5) == Rat(1, 2));
    CHECK(rat(0.1) != Rat(1, 10)); // 0.1 is not exactly representable
    const boost::multiprecision::cpp_int den = boost::multiprecision::cpp_int(1)
                                                << 1074;
    CHECK(rat(std::ldexp(1.0, -1074)) == Rat(1, den));
}

TEST_CASE("with_mode evaluates the deferred computation under the mode") {
    for (RoundingBackend be :
         {RoundingBackend::HardwareEnv, RoundingBackend::SoftwareEmulated}) {
        if (be == RoundingBackend::HardwareEnv && !hardware_env_available())
            continue;
        CAPTURE(to_string(be));
        CHECK(with_mode(RoundingMode::TowardNegInf, be, [](const RoundingOps& o) {
                  return o.add(1.0, 1e-20);
              }) == 1.0);
        CHECK(with_mode(RoundingMode::TowardPosInf, be, [](const RoundingOps& o) {
                  return o.add(1.0, 1e-20);
              }) == 1.0000000000000002);
        CHECK(with_mode(RoundingMode::ToNearestEven, be, [](const RoundingOps& o) {
                  return o.add(0.5, 0.25);
              }) == 0.75);
    }
}

TEST_CASE("with_mode governs plain arithmetic under the hardware backend") {
    if (!hardware_env_available()) return;
    const double up =
        with_mode(RoundingMode::TowardPosInf, RoundingBackend::HardwareEnv,
                  [](const RoundingOps&) { return opaque(1.0) + opaque(1e-20); });
    CHECK(up == 1.0000000000000002);
}

TEST_CASE("directed scalar examples") {
    CHECK(dir_add(1.0, 1e-20, RoundingMode::TowardNegInf) == 1.0);
    CHECK(dir_mul(2.0, 4.0, RoundingMode::TowardPosInf) == 8.0);

    // 0.1 + 0.2: the two directed results are adjacent and bracket 3/10
    const double dn = dir_add(0.1, 0.2, RoundingMode::TowardNegInf);
    const double up = dir_add(0.1, 0.2, RoundingMode::TowardPosInf);
    const Rat exact = rat(0.1) + rat(0.2);
    CHECK(rat(dn) < Rat(3, 10));
    CHECK(rat(up) > Rat(3, 10));
    CHECK(std::nextafter(dn, HUGE_VAL) == up);
    CHECK(rat(dn) <= exact);
    CHECK(rat(up) >= exact);
}

TEST_CASE("scope restoration, including through exceptions") {
    if (!hardware_env_available()) return;
    const RoundingMode before = active_mode();
    with_mode(RoundingMode::TowardNegInf, RoundingBackend::HardwareEnv,
              [&](const RoundingOps&) {
                  CHECK(active_mode() == RoundingMode::TowardNegInf);
                  with_mode(RoundingMode::TowardPosInf, RoundingBackend::HardwareEnv,
                            [&](const RoundingOps&) {
                                CHECK(active_mode() == RoundingMode::TowardPosInf);
                                return 0;
                            });
                  CHECK(active_mode() == RoundingMode::TowardNegInf);
                  return 0;
              });
    CHECK(active_mode() == before);

    try {
        with_mode(RoundingMode::TowardPosInf, RoundingBackend::HardwareEnv,
                  [](const RoundingOps&) -> int { throw std::runtime_error("x"); });
    } catch (const std::runtime_error&) {
    }
    CHECK(active_mode() == before);
}

TEST_CASE("bracketing holds over 1e5 random pairs per op") {
    OperandGen gen;
    for (char op : {'+', '-', '*', '/'}) {
        CAPTURE(op);
        std::size_t checked = 0;
        while (checked < 100000) {
            const double a = gen.next(), b = gen.next();
            if (op == '/' && b == 0.0) continue;
            const double dn = dir_op(op, a, b, RoundingMode::TowardNegInf);
            const double nr = dir_op(op, a, b, RoundingMode::ToNearestEven);
            const double up = dir_op(op, a, b, RoundingMode::TowardPosInf);
            if (std::isnan(nr)) continue;
            ++checked;
            REQUIRE(dn <= nr);
            REQUIRE(nr <= up);
        }
    }
}

TEST_CASE("exact results are mode independent") {
    OperandGen gen;
    for (int i = 0; i < 20000; ++i) {
        // products/sums/quotients of modest integers are representable
        const double a = static_cast<double>(static_cast<int>(gen.rng() % 4096)) -
                         2048.0;
        const double b = static_cast<double>(static_cast<int>(gen.rng() % 4096)) -
                         2048.0;
        for (char op : {'+', '-', '*'}) {
            const double dn = dir_op(op, a, b, RoundingMode::TowardNegInf);
            const double up = dir_op(op, a, b, RoundingMode::TowardPosInf);
            const double nr = dir_op(op, a, b, RoundingMode::ToNearestEven);
            CHECK(same_bits(dn, up));
            CHECK(same_bits(dn, nr));
        }
        // division by a power of two is exact
        const double q = a * 8.0;
        const double dn = dir_div(q, 8.0, RoundingMode::TowardNegInf);
        const double up = dir_div(q, 8.0, RoundingMode::TowardPosInf);
        CHECK(same_bits(dn, up));
        CHECK(dn == a);
    }
}

TEST_CASE("hardware and emulated backends agree bit-exactly") {
    if (!hardware_env_available()) {
        MESSAGE("no settable hardware floating-point environment; skipped");
        return;
    }
    OperandGen gen;
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 100000; ++i) pairs.emplace_back(gen.next(), gen.next());
    const double specials[] = {0.0,      -0.0,      DBL_MIN,  -DBL_MIN,
                               DBL_MAX,  -DBL_MAX,  1.0,      -1.0,
                               DBL_EPSILON, std::ldexp(1.0, -1074),
                               -std::ldexp(1.0, -1074), 2.0,  0.5,
                               1.0 + DBL_EPSILON, 5.3, 7.6, 65.0};
    for (double a : specials)
        for (double b : specials) pairs.emplace_back(a, b);

    for (RoundingMode mode : kModes) {
        CAPTURE(to_string(mode));
        for (char op : {'+', '-', '*', '/'}) {
            CAPTURE(op);
            with_mode(mode, RoundingBackend::HardwareEnv,
                      [&](const RoundingOps& hw) {
                          const RoundingOps em(mode, RoundingBackend::SoftwareEmulated);
                          for (const auto& [a, b] : pairs) {
                              if (op == '/' && b == 0.0) continue;
                              const double h = hw_op(op, a, b, hw);
                              const double e = hw_op(op, a, b, em);
                              if (std::isnan(h) && std::isnan(e)) continue;
                              REQUIRE(same_bits(h, e));
                          }
                          return 0;
                      });
        }
    }
}

TEST_CASE("directed results match the exact rational oracle") {
    OperandGen gen;
    for (int i = 0; i < 8000; ++i) {
        const double a = gen.next(), b = gen.next();
        for (char op : {'+', '-', '*', '/'}) check_against_oracle(op, a, b);
    }
    // near-cancellation and near-tie constructions
    std::mt19937_64 rng(7);
    for (int i = 0; i < 4000; ++i) {
        const double a = std::ldexp(1.0 + std::uniform_real_distribution<>(0, 1)(rng),
                                    static_cast<int>(rng() % 40) - 20);
        const double b = -a * (1.0 + DBL_EPSILON * static_cast<double>(rng() % 8));
        check_against_oracle('+', a, b);
        check_against_oracle('-', a, b);
        check_against_oracle('*', a, 1.0 + DBL_EPSILON * static_cast<double>(rng() % 8));
        check_against_oracle('/', a, 3.0 + DBL_EPSILON * static_cast<double>(rng() % 8));
    }
}

TEST_CASE("signed zeros follow the direction rules") {
    const double z_dn = dir_add(1.0, -1.0, RoundingMode::TowardNegInf);
    CHECK(z_dn == 0.0);
    CHECK(std::signbit(z_dn));
    CHECK(!std::signbit(dir_add(1.0, -1.0, RoundingMode::TowardPosInf)));
    CHECK(!std::signbit(dir_add(1.0, -1.0, RoundingMode::ToNearestEven)));
    CHECK(!std::signbit(dir_add(0.0, -0.0, RoundingMode::ToNearestEven)));
    CHECK(std::signbit(dir_add(0.0, -0.0, RoundingMode::TowardNegInf)));
    CHECK(std::signbit(dir_add(-0.0, -0.0, RoundingMode::TowardPosInf)));
    CHECK(std::signbit(dir_sub(-0.0, 0.0, RoundingMode::TowardPosInf)));
}

TEST_CASE("overflow saturates toward the finite side") {
    CHECK(dir_add(DBL_MAX, DBL_MAX, RoundingMode::TowardNegInf) == DBL_MAX);
    CHECK(dir_add(DBL_MAX, DBL_MAX, RoundingMode::TowardPosInf) == HUGE_VAL);
    CHECK(dir_add(DBL_MAX, DBL_MAX, RoundingMode::ToNearestEven) == HUGE_VAL);
    CHECK(dir_add(-DBL_MAX, -DBL_MAX, RoundingMode::TowardPosInf) == -DBL_MAX);
    CHECK(dir_add(-DBL_MAX, -DBL_MAX, RoundingMode::TowardNegInf) == -HUGE_VAL);
    CHECK(dir_mul(DBL_MAX, 2.0, RoundingMode::TowardNegInf) == DBL_MAX);
    CHECK(dir_mul(-DBL_MAX, 2.0, RoundingMode::TowardPosInf) == -DBL_MAX);
    CHECK(dir_div(DBL_MAX, 0.5, RoundingMode::TowardNegInf) == DBL_MAX);
    // an exact infinite result stays infinite in every mode
    CHECK(dir_div(1.0, 0.0, RoundingMode::TowardNegInf) == HUGE_VAL);
}

TEST_CASE("subnormal boundary") {
    const double tiny = std::ldexp(1.0, -1074);
    // tiny/2 sits exactly between 0 and tiny: even -> 0, up -> tiny
    CHECK(dir_mul(tiny, 0.5, RoundingMode::ToNearestEven) == 0.0);
    CHECK(dir_mul(tiny, 0.5, RoundingMode::TowardNegInf) == 0.0);
    CHECK(dir_mul(tiny, 0.5, RoundingMode::TowardPosInf) == tiny);
    CHECK(dir_div(tiny, 2.0, RoundingMode::TowardPosInf) == tiny);
    CHECK(dir_mul(-tiny, 0.5, RoundingMode::TowardNegInf) == -tiny);
}

TEST_CASE("backend resolution") {
    CHECK(resolve_backend(RoundingBackend::SoftwareEmulated) ==
          RoundingBackend::SoftwareEmulated);
    if (hardware_env_available())
        CHECK(resolve_backend(RoundingBackend::HardwareEnv) ==
              RoundingBackend::HardwareEnv);
}
