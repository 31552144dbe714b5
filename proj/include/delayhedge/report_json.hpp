// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "delayhedge/monte_carlo.hpp"
#include "delayhedge/verify.hpp"

namespace delayhedge {

inline void to_json(nlohmann::json& j, const UtilityReport& r) {
    j = nlohmann::json{{"empirical_mean", r.empirical_mean},
                       {"std_error", r.std_error},
                       {"analytic", r.analytic ? nlohmann::json(*r.analytic) : nlohmann::json()},
                       {"n_paths", r.n_paths},
                       {"seed", r.seed},
                       {"effective_sample_size", r.effective_sample_size}};
}

inline void to_json(nlohmann::json& j, const CheckResult& c) {
    j = nlohmann::json{{"suite", c.suite},   {"name", c.name},           {"passed", c.passed},
                       {"worst", c.worst},   {"tolerance", c.tolerance}, {"samples", c.samples}};
}

}  // namespace delayhedge
