#pragma once

#include <string>

#include <json.hpp>

namespace fk {

/// Outcome of one inequality evaluation. `slack = lhs - rhs`, oriented so
/// the claim is `lhs >= rhs`; a check passes when slack >= -tol, where tol
/// combines eigensolver residual and quadrature refinement error.
struct BoundReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tol = 0.0;
    bool pass = false;
    nlohmann::json inputs;

    nlohmann::json to_json() const {
        return nlohmann::json{{"name", name}, {"lhs", lhs},   {"rhs", rhs},
                              {"slack", slack}, {"tol", tol}, {"pass", pass},
                              {"inputs", inputs}};
    }
};

inline BoundReport make_report(std::string name, double lhs, double rhs, double tol,
                               nlohmann::json inputs = nlohmann::json::object()) {
    BoundReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = lhs - rhs;
    r.tol = tol;
    r.pass = r.slack >= -tol;
    r.inputs = std::move(inputs);
    return r;
}

}  // namespace fk
