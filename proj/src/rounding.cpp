#include "chaossup/rounding.hpp"

#include <bit>
#include <cfenv>
#include <cfloat>
#include <cmath>
#include <cstdint>

namespace chaossup {

const char* to_string(RoundingMode mode) noexcept {
    switch (mode) {
        case RoundingMode::TowardNegInf: return "toward_neg_inf";
        case RoundingMode::TowardPosInf: return "toward_pos_inf";
        case RoundingMode::ToNearestEven: return "to_nearest_even";
    }
    return "?";
}

const char* to_string(RoundingBackend backend) noexcept {
    return backend == RoundingBackend::HardwareEnv ? "hardware" : "emulated";
}

namespace {

int fe_constant(RoundingMode mode) noexcept {
    switch (mode) {
        case RoundingMode::TowardNegInf: return FE_DOWNWARD;
        case RoundingMode::TowardPosInf: return FE_UPWARD;
        case RoundingMode::ToNearestEven: return FE_TONEAREST;
    }
    return FE_TONEAREST;
}

RoundingMode mode_of_fe(int fe) noexcept {
    if (fe == FE_DOWNWARD) return RoundingMode::TowardNegInf;
    if (fe == FE_UPWARD) return RoundingMode::TowardPosInf;
    return RoundingMode::ToNearestEven;
}

// Shadow of this thread's environment mode. All mode switches in this
// project go through set_env/ensure_env, so one fegetround per thread is
// enough to seed it.
thread_local bool tl_env_known = false;
thread_local RoundingMode tl_env = RoundingMode::ToNearestEven;

RoundingMode current_env() noexcept {
    if (!tl_env_known) {
        tl_env = mode_of_fe(fegetround());
        tl_env_known = true;
    }
    return tl_env;
}

void set_env(RoundingMode mode) {
    if (std::fesetround(fe_constant(mode)) != 0) throw HardwareUnavailable();
    tl_env = mode;
    tl_env_known = true;
}

void ensure_env(RoundingMode mode) {
    if (current_env() != mode) set_env(mode);
}

// Emulated ops require a to-nearest environment for their error-free
// transformations; tolerate platforms with a fixed (nearest-only) env.
void ensure_nearest_for_emulated() {
    if (current_env() == RoundingMode::ToNearestEven) return;
    set_env(RoundingMode::ToNearestEven);
}

// ---------------------------------------------------------------------
// Software-emulated directed rounding.
//
// Fast path: compute to nearest, recover the exact residual (two-sum for
// +/-, fma for *, the division-residual identity for /), then step one
// representable in the requested direction when the residual demands it.
// The residual identities are exact only away from the underflow and
// overflow boundaries; outside those ranges an exact integer round-pack
// takes over.
// ---------------------------------------------------------------------

// Knuth two-sum error term: a + b == s + err exactly, for any finite s.
inline double two_sum_err(double s, double a, double b) noexcept {
    double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

inline double step_down(double x) noexcept {
    return std::nextafter(x, -HUGE_VAL);
}
inline double step_up(double x) noexcept {
    return std::nextafter(x, HUGE_VAL);
}

// Directed result when rounding to nearest overflowed to +-inf but the
// exact value is finite: the direction pointing away from the overflow
// side yields the largest finite magnitude instead.
inline double overflow_result(double inf_signed, RoundingMode mode) noexcept {
    if (mode == RoundingMode::TowardNegInf && inf_signed > 0) return DBL_MAX;
    if (mode == RoundingMode::TowardPosInf && inf_signed < 0) return -DBL_MAX;
    return inf_signed;
}

// Adjust the nearest result by the sign of the exact residual
// (exact = nearest + err).
inline double adjust(double nearest, double err, RoundingMode mode) noexcept {
    if (mode == RoundingMode::TowardNegInf && err < 0) return step_down(nearest);
    if (mode == RoundingMode::TowardPosInf && err > 0) return step_up(nearest);
    return nearest;
}

// --- exact integer round-pack (mul/div fallback) ----------------------

struct Unpacked {
    bool neg;
    int exp;        // value = mant * 2^exp
    std::uint64_t mant; // in [2^52, 2^53) after normalization
};

Unpacked unpack(double x) noexcept {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    Unpacked u;
    u.neg = bits >> 63;
    int be = static_cast<int>((bits >> 52) & 0x7ff);
    std::uint64_t frac = bits & ((std::uint64_t(1) << 52) - 1);
    if (be == 0) {
        // subnormal: normalize into [2^52, 2^53)
        int lead = std::countl_zero(frac) - 11; // zeros above bit 52
        u.mant = frac << lead;
        u.exp = -1074 - lead;
    } else {
        u.mant = frac | (std::uint64_t(1) << 52);
        u.exp = be - 1075;
    }
    return u;
}

int bit_length(unsigned __int128 v) noexcept {
    const std::uint64_t hi = static_cast<std::uint64_t>(v >> 64);
    if (hi) return 128 - std::countl_zero(hi);
    return 64 - std::countl_zero(static_cast<std::uint64_t>(v));
}

// Rounds (-1)^neg * mant * 2^exp (plus a sticky tail below the lsb) to
// binary64 in the given direction. mant must be nonzero.
double round_pack(bool neg, int exp, unsigned __int128 mant, bool sticky_tail,
                  RoundingMode mode) noexcept {
    const int nb = bit_length(mant);
    const int value_exp = exp + nb - 1; // value in [2^value_exp, 2^(value_exp+1))

    int drop = nb - 53;
    if (value_exp < -1022) drop += -1022 - value_exp; // subnormal target
    bool guard = false;
    bool sticky = sticky_tail;
    std::uint64_t kept;
    if (drop <= 0) {
        kept = static_cast<std::uint64_t>(mant) << -drop;
    } else if (drop > nb) {
        kept = 0;
        sticky = sticky || mant != 0;
    } else {
        guard = (mant >> (drop - 1)) & 1;
        if (drop > 1)
            sticky = sticky || (mant & (((unsigned __int128)1 << (drop - 1)) - 1)) != 0;
        kept = static_cast<std::uint64_t>(mant >> drop);
    }

    bool increment = false;
    switch (mode) {
        case RoundingMode::ToNearestEven:
            increment = guard && (sticky || (kept & 1));
            break;
        case RoundingMode::TowardNegInf:
            increment = neg && (guard || sticky);
            break;
        case RoundingMode::TowardPosInf:
            increment = !neg && (guard || sticky);
            break;
    }

    int out_exp = value_exp;
    if (increment) {
        ++kept;
        if (kept == (std::uint64_t(1) << 53)) {
            kept >>= 1;
            ++out_exp;
        }
    }

    const std::uint64_t sign_bit = std::uint64_t(neg) << 63;
    if (kept < (std::uint64_t(1) << 52)) {
        // subnormal (or zero); a carry to 2^52 packs as the smallest normal
        return std::bit_cast<double>(sign_bit | kept);
    }
    if (out_exp > 1023) {
        if (mode == RoundingMode::TowardNegInf) return neg ? -HUGE_VAL : DBL_MAX;
        if (mode == RoundingMode::TowardPosInf) return neg ? -DBL_MAX : HUGE_VAL;
        return neg ? -HUGE_VAL : HUGE_VAL;
    }
    const std::uint64_t biased = static_cast<std::uint64_t>(out_exp + 1023);
    return std::bit_cast<double>(sign_bit | (biased << 52) |
                                 (kept & ((std::uint64_t(1) << 52) - 1)));
}

double soft_mul(double a, double b, RoundingMode mode) noexcept {
    const Unpacked ua = unpack(a), ub = unpack(b);
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(ua.mant) * ub.mant;
    return round_pack(ua.neg != ub.neg, ua.exp + ub.exp, prod, false, mode);
}

double soft_div(double a, double b, RoundingMode mode) noexcept {
    const Unpacked ua = unpack(a), ub = unpack(b);
    // 55 extra quotient bits leave a guard bit below the 53-bit target
    // even after normalization.
    const unsigned __int128 dividend =
        static_cast<unsigned __int128>(ua.mant) << 55;
    const unsigned __int128 q = dividend / ub.mant;
    const unsigned __int128 r = dividend % ub.mant;
    return round_pack(ua.neg != ub.neg, ua.exp - ub.exp - 55, q, r != 0, mode);
}

// Residual identities are exact in these ranges (away from under/overflow).
constexpr double kMulSafeLo = 0x1p-968;
constexpr double kDivSafeLo = 0x1p-900;
constexpr double kDivSafeHi = 0x1p+900;

} // namespace

double dir_add(double a, double b, RoundingMode mode) {
    ensure_nearest_for_emulated();
    const double s = a + b;
    if (!std::isfinite(a) || !std::isfinite(b)) return s; // IEEE propagation
    if (std::isinf(s)) return overflow_result(s, mode);
    if (s == 0.0) {
        // exact zero; IEEE sign rules: same-signed zero operands keep their
        // sign, cancellation yields +0 except toward -inf where it is -0
        if (a == 0.0 && b == 0.0 && std::signbit(a) == std::signbit(b)) return a;
        return mode == RoundingMode::TowardNegInf ? -0.0 : 0.0;
    }
    return adjust(s, two_sum_err(s, a, b), mode);
}

double dir_sub(double a, double b, RoundingMode mode) {
    return dir_add(a, -b, mode);
}

double dir_mul(double a, double b, RoundingMode mode) {
    ensure_nearest_for_emulated();
    const double p = a * b;
    if (!std::isfinite(a) || !std::isfinite(b)) return p;
    if (a == 0.0 || b == 0.0) return p; // exact signed zero
    if (std::isinf(p)) return overflow_result(p, mode);
    if (std::fabs(p) >= kMulSafeLo)
        return adjust(p, std::fma(a, b, -p), mode);
    return soft_mul(a, b, mode);
}

double dir_div(double a, double b, RoundingMode mode) {
    ensure_nearest_for_emulated();
    const double q = a / b;
    if (!std::isfinite(a) || !std::isfinite(b)) return q;
    if (a == 0.0 || b == 0.0) return q; // signed zero / signed infinity
    if (std::isinf(q)) return overflow_result(q, mode);
    const double aa = std::fabs(a);
    if (q != 0.0 && std::fabs(q) >= DBL_MIN && std::fabs(b) >= DBL_MIN &&
        aa >= kDivSafeLo && aa <= kDivSafeHi) {
        // r = q*b - a exactly; q overshoots the true quotient iff
        // r and b share a sign
        const double r = std::fma(q, b, -a);
        if (r == 0.0) return q;
        const bool overshoot = (b > 0.0) == (r > 0.0);
        if (mode == RoundingMode::TowardNegInf)
            return overshoot ? step_down(q) : q;
        if (mode == RoundingMode::TowardPosInf)
            return overshoot ? q : step_up(q);
        return q;
    }
    return soft_div(a, b, mode);
}

// ---------------------------------------------------------------------
// Hardware backend and scopes
// ---------------------------------------------------------------------

bool hardware_env_available() noexcept {
    const int prev = fegetround();
    if (std::fesetround(FE_DOWNWARD) != 0) return false;
    const bool ok = fegetround() == FE_DOWNWARD;
    std::fesetround(prev);
    return ok;
}

RoundingBackend resolve_backend(RoundingBackend requested) noexcept {
    if (requested == RoundingBackend::HardwareEnv && !hardware_env_available())
        return RoundingBackend::SoftwareEmulated;
    return requested;
}

RoundingMode active_mode() noexcept {
    return mode_of_fe(fegetround());
}

EnvScope::EnvScope(RoundingMode mode, RoundingBackend backend)
    : saved_(current_env()) {
    if (backend == RoundingBackend::HardwareEnv) {
        set_env(mode);
    } else {
        ensure_nearest_for_emulated();
    }
}

EnvScope::~EnvScope() {
    if (current_env() != saved_) {
        std::fesetround(fe_constant(saved_));
        tl_env = saved_;
    }
}

double RoundingOps::add(double a, double b) const {
    if (backend_ == RoundingBackend::SoftwareEmulated) return dir_add(a, b, mode_);
    ensure_env(mode_);
    return opaque(opaque(a) + opaque(b));
}

double RoundingOps::sub(double a, double b) const {
    if (backend_ == RoundingBackend::SoftwareEmulated) return dir_sub(a, b, mode_);
    ensure_env(mode_);
    return opaque(opaque(a) - opaque(b));
}

double RoundingOps::mul(double a, double b) const {
    if (backend_ == RoundingBackend::SoftwareEmulated) return dir_mul(a, b, mode_);
    ensure_env(mode_);
    return opaque(opaque(a) * opaque(b));
}

double RoundingOps::div(double a, double b) const {
    if (backend_ == RoundingBackend::SoftwareEmulated) return dir_div(a, b, mode_);
    ensure_env(mode_);
    return opaque(opaque(a) / opaque(b));
}

} // namespace chaossup
