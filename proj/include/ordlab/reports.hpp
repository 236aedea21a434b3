#pragma once

#include <json.hpp>
#include <string>

#include "ordlab/bounds.hpp"
#include "ordlab/observables.hpp"
#include "ordlab/quantum.hpp"

namespace ordlab {

using json = nlohmann::json;

inline json to_json(const WaveVector& k) {
    return json{{"kx", k.v.x}, {"ky", k.v.y}, {"class", to_string(k.cls)},
                {"m1", k.m1},  {"m2", k.m2}};
}

inline json to_json(const BogoliubovResult& r) {
    return json{{"lhs", r.lhs},
                {"rhs", r.rhs},
                {"slack", r.slack},
                {"numerator", r.numerator},
                {"denominator", r.denominator}};
}

inline json to_json(const IdentityResidual& r) {
    return json{{"id", r.id}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"residual", r.residual}};
}

inline json to_json(const KineticAuditReport& a) {
    return json{{"basis",
                 {"k_dot_p_squared", "k2_p_cos2_p", "k4_sin2_quarter", "k4_const_quarter"}},
                {"reference_coeffs", a.reference_coeffs},
                {"fitted_coeffs", a.fitted_coeffs},
                {"reference_residual", a.reference_residual},
                {"fitted_residual", a.fitted_residual},
                {"reference_matches", a.reference_matches}};
}

inline json to_json(const ResidualReport& r) {
    json ids = json::array();
    for (const auto& idr : r.identities) ids.push_back(to_json(idr));
    return json{{"identities", ids},
                {"kinetic_audit", to_json(r.kinetic_audit)},
                {"band_mode_limit", r.band_mode_limit},
                {"k", {r.k.x, r.k.y}},
                {"K", {r.kk.x, r.kk.y}},
                {"beta", r.beta}};
}

inline json to_json(const BoundReport& r) {
    return json{{"id", r.id},       {"side", r.side}, {"left", r.left}, {"right", r.right},
                {"slack", r.slack}, {"k", r.k},       {"beta", r.beta}, {"pass", r.pass}};
}

inline json to_json(const ScalingReport& r) {
    return json{{"alpha", r.alpha},
                {"alpha_stderr", r.alpha_stderr},
                {"r_squared", r.r_squared},
                {"threshold", r.threshold},
                {"classification", r.classification},
                {"points", r.points}};
}

inline json to_json(const DivergenceResult& r) {
    return json{{"numeric", r.numeric},
                {"analytic", r.analytic},
                {"relative_error", r.relative_error}};
}

inline json to_json(const BogoliubovClassicalReport& r) {
    return json{{"k", to_json(r.k)},
                {"K", to_json(r.K)},
                {"lhs", r.lhs},
                {"lhs_stderr", r.lhs_stderr},
                {"rhs", r.rhs},
                {"rhs_stderr", r.rhs_stderr},
                {"slack", r.slack},
                {"slack_stderr", r.slack_stderr},
                {"kinetic_per_particle", r.kinetic_per_particle},
                {"pair_sum_mean", r.pair_sum_mean},
                {"samples", r.samples}};
}

inline json to_json(const CrystallinityReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"k", to_json(row.k)},
                            {"re_rho", row.rho.real()},
                            {"im_rho", row.rho.imag()},
                            {"abs_rho", std::abs(row.rho)},
                            {"stderr", row.stderr_}});
    return json{{"rows", rows}, {"threshold", r.threshold}, {"ordered", r.ordered}};
}

}  // namespace ordlab
