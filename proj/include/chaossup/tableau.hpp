#ifndef CHAOSSUP_TABLEAU_HPP
#define CHAOSSUP_TABLEAU_HPP

#include <string>
#include <vector>

namespace chaossup {

/// Coefficient schema of an explicit Runge-Kutta method. Row i of `a`
/// holds the i coefficients below the diagonal, so the matrix is strictly
/// lower triangular by construction.
struct ButcherTableau {
    std::string name;
    int order = 0;
    std::vector<double> c;              // stage nodes
    std::vector<std::vector<double>> a; // a[i].size() == i
    std::vector<double> b;              // stage weights

    int stages() const noexcept { return static_cast<int>(b.size()); }

    /// Throws std::invalid_argument unless the shape is consistent,
    /// sum(b) == 1 and each c[i] equals the row sum of a[i].
    void validate() const;
};

/// Built-in methods: "rk3" (Kutta's third-order), "rk4" (classical),
/// "rk5" (Butcher's six-stage fifth-order). Throws std::out_of_range for
/// unknown names.
const ButcherTableau& find_tableau(const std::string& name);
std::vector<std::string> tableau_names();

} // namespace chaossup

#endif
