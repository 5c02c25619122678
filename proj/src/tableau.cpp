#include "chaossup/tableau.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace chaossup {

void ButcherTableau::validate() const {
    const std::size_t s = b.size();
    if (s == 0) throw std::invalid_argument("tableau '" + name + "': no stages");
    if (c.size() != s || a.size() != s)
        throw std::invalid_argument("tableau '" + name + "': a/b/c sizes disagree");
    for (std::size_t i = 0; i < s; ++i)
        if (a[i].size() != i)
            throw std::invalid_argument("tableau '" + name +
                                        "': a is not strictly lower triangular");
    double bsum = 0.0;
    for (double w : b) bsum += w;
    if (std::fabs(bsum - 1.0) > 1e-12)
        throw std::invalid_argument("tableau '" + name + "': sum(b) != 1");
    for (std::size_t i = 0; i < s; ++i) {
        double rsum = 0.0;
        for (double v : a[i]) rsum += v;
        if (std::fabs(rsum - c[i]) > 1e-12)
            throw std::invalid_argument("tableau '" + name +
                                        "': row-sum condition fails at stage " +
                                        std::to_string(i));
    }
}

namespace {

std::map<std::string, ButcherTableau> make_builtin() {
    std::map<std::string, ButcherTableau> reg;

    // Kutta's third-order method
    reg["rk3"] = ButcherTableau{
        "rk3", 3,
        {0.0, 0.5, 1.0},
        {{}, {0.5}, {-1.0, 2.0}},
        {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}};

    // classical fourth-order method
    reg["rk4"] = ButcherTableau{
        "rk4", 4,
        {0.0, 0.5, 0.5, 1.0},
        {{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}},
        {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}};

    // Butcher's six-stage fifth-order method
    reg["rk5"] = ButcherTableau{
        "rk5", 5,
        {0.0, 0.25, 0.25, 0.5, 0.75, 1.0},
        {{},
         {0.25},
         {1.0 / 8.0, 1.0 / 8.0},
         {0.0, -0.5, 1.0},
         {3.0 / 16.0, 0.0, 0.0, 9.0 / 16.0},
         {-3.0 / 7.0, 2.0 / 7.0, 12.0 / 7.0, -12.0 / 7.0, 8.0 / 7.0}},
        {7.0 / 90.0, 0.0, 32.0 / 90.0, 12.0 / 90.0, 32.0 / 90.0, 7.0 / 90.0}};

    for (auto& [k, t] : reg) t.validate();
    return reg;
}

const std::map<std::string, ButcherTableau>& registry() {
    static const std::map<std::string, ButcherTableau> reg = make_builtin();
    return reg;
}

} // namespace

const ButcherTableau& find_tableau(const std::string& name) {
    const auto& reg = registry();
    auto it = reg.find(name);
    if (it == reg.end())
        throw std::out_of_range("unknown tableau '" + name +
                                "' (have: rk3, rk4, rk5)");
    return it->second;
}

std::vector<std::string> tableau_names() {
    std::vector<std::string> names;
    for (const auto& [k, t] : registry()) names.push_back(k);
    return names;
}

} // namespace chaossup
