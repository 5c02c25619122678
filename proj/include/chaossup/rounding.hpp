#ifndef CHAOSSUP_ROUNDING_HPP
#define CHAOSSUP_ROUNDING_HPP

#include <stdexcept>
#include <string>

namespace chaossup {

/// IEEE-754 rounding direction for elementary binary64 operations.
/// Toward-zero is deliberately absent; nothing in this project uses it.
enum class RoundingMode { TowardNegInf, TowardPosInf, ToNearestEven };

/// How directed results are produced: by switching the hardware
/// floating-point environment, or by a software emulation that is
/// correctly rounded independently of the ambient environment.
/// Both backends agree bit-exactly on every (op, operands, mode) triple;
/// the test suite enforces this.
enum class RoundingBackend { HardwareEnv, SoftwareEmulated };

const char* to_string(RoundingMode mode) noexcept;
const char* to_string(RoundingBackend backend) noexcept;

/// Thrown when HardwareEnv is requested but the platform's floating-point
/// environment cannot be switched. Callers should retry with
/// SoftwareEmulated (see resolve_backend).
class HardwareUnavailable : public std::runtime_error {
public:
    HardwareUnavailable() : std::runtime_error(
        "hardware floating-point environment does not support "
        "directed rounding; fall back to the emulated backend") {}
};

/// True when fesetround can switch directed modes on this platform.
bool hardware_env_available() noexcept;

/// Returns the requested backend, or SoftwareEmulated when HardwareEnv
/// was requested but is unavailable.
RoundingBackend resolve_backend(RoundingBackend requested) noexcept;

/// Forces a double through a register so the compiler can neither fold it
/// at compile time nor move the surrounding operation across a rounding
/// mode switch.
inline double opaque(double x) noexcept {
#if defined(__x86_64__) || defined(__i386__)
    asm volatile("" : "+x"(x));
#elif defined(__aarch64__)
    asm volatile("" : "+w"(x));
#else
    volatile double v = x;
    x = v;
#endif
    return x;
}

/// Software-emulated directed scalar operations. Correctly rounded for all
/// finite operands (subnormals, signed zeros and overflow included) and
/// independent of the hardware rounding mode: each call evaluates to
/// nearest, recovers the exact residual with an error-free transformation
/// and steps to the adjacent representable when the residual's sign
/// disagrees with the requested direction. Non-finite operands propagate
/// per IEEE-754.
double dir_add(double a, double b, RoundingMode mode);
double dir_sub(double a, double b, RoundingMode mode);
double dir_mul(double a, double b, RoundingMode mode);
double dir_div(double a, double b, RoundingMode mode);

/// The four elementary operations under one fixed (mode, backend).
/// HardwareEnv operations switch the floating-point environment lazily and
/// leave it in the mode of the last operation; enter an EnvScope (or use
/// with_mode) around a computation so the previous mode is restored.
/// A RoundingOps value is freely copyable and carries no state of its own.
class RoundingOps {
public:
    RoundingOps(RoundingMode mode, RoundingBackend backend) noexcept
        : mode_(mode), backend_(backend) {}

    RoundingMode mode() const noexcept { return mode_; }
    RoundingBackend backend() const noexcept { return backend_; }

    double add(double a, double b) const;
    double sub(double a, double b) const;
    double mul(double a, double b) const;
    double div(double a, double b) const;

private:
    RoundingMode mode_;
    RoundingBackend backend_;
};

/// RAII guard over the hardware floating-point environment of the calling
/// thread. HardwareEnv: switches to `mode` (throws HardwareUnavailable on
/// failure). SoftwareEmulated: switches to nearest, which the emulated
/// error-free transformations require. The destructor restores the mode
/// that was active on entry, on normal exit and on unwinding alike.
/// Scopes nest; a scope must be entered and exited on the same thread.
class EnvScope {
public:
    EnvScope(RoundingMode mode, RoundingBackend backend);
    ~EnvScope();

    EnvScope(const EnvScope&) = delete;
    EnvScope& operator=(const EnvScope&) = delete;

private:
    RoundingMode saved_;
};

/// Currently active rounding mode of this thread's environment.
RoundingMode active_mode() noexcept;

/// Runs `body` with the floating-point environment configured for
/// (mode, backend) and hands it the matching operation set. The prior
/// mode is restored on exit, including when `body` throws.
///
/// Under HardwareEnv, plain double arithmetic inside `body` is also
/// evaluated in `mode` (wrap literals in opaque() to keep the compiler
/// from folding them). Under SoftwareEmulated, mode-sensitive arithmetic
/// must go through the supplied RoundingOps.
template <typename F>
auto with_mode(RoundingMode mode, RoundingBackend backend, F&& body)
    -> decltype(body(std::declval<const RoundingOps&>())) {
    EnvScope scope(mode, backend);
    return static_cast<F&&>(body)(RoundingOps(mode, backend));
}

} // namespace chaossup

#endif
