#pragma once

// JSON/CSV emission for the report types. Header-only; needs nlohmann/json
// (vendored as json.hpp) on the include path.

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fracsemi/semipositone.hpp"
#include "fracsemi/variational.hpp"

namespace fracsemi {

using ordered_json = nlohmann::ordered_json;

inline ordered_json solve_report_json(const SolveReport& rep, const std::string& solution_csv_path,
                                      const ordered_json& params) {
    ordered_json j;
    j["solution_csv_path"] = solution_csv_path;
    j["residual_inf"] = rep.residual_inf;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    j["classification"] = classification_name(rep.classification);
    j["ordering_ok"] = rep.ordering_ok;
    j["min_value"] = rep.min_value;
    if (rep.decay_exponent) {
        j["decay_exponent"] = *rep.decay_exponent;
    } else {
        j["decay_exponent"] = nullptr;
    }
    j["params"] = params;
    if (rep.energy) j["energy"] = *rep.energy;
    j["tol"] = rep.tol;
    return j;
}

inline ordered_json check_report_json(const CheckReport& rep) {
    ordered_json j;
    j["uncut_residual_inf"] = rep.uncut_residual_inf;
    j["cutoff_residual_inf"] = rep.cutoff_residual_inf;
    j["min_value"] = rep.min_value;
    j["ordering_ok"] = rep.ordering_ok;
    if (rep.decay_exponent) {
        j["decay_exponent"] = *rep.decay_exponent;
    } else {
        j["decay_exponent"] = nullptr;
    }
    j["energy"] = rep.energy;
    j["positive"] = rep.positive;
    return j;
}

inline ordered_json threshold_report_json(const ThresholdReport& rep) {
    ordered_json j;
    j["rho"] = rep.rho;
    j["mu_lambda"] = rep.mu_lambda;
    j["mu0_critical"] = rep.mu0_critical;
    j["embed_1"] = rep.embed_1;
    j["embed_q1"] = rep.embed_q1;
    j["embed_r1"] = rep.embed_r1;
    j["embed_crit"] = rep.embed_crit;
    j["boundary_inf_bound"] = rep.boundary_inf_bound;
    return j;
}

// columns: x, u, u_under, residual (pointwise residual of the uncut equation)
inline void write_solution_csv(const std::string& path, const Grid& grid, const FieldFunction& u,
                               const FieldFunction& u_under, const FieldFunction& residual) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_solution_csv: cannot open " + path);
    out << "x,u,u_under,residual\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << sep;
    };
    for (int i = 1; i <= grid.n; ++i) {
        put(grid.node(i), ',');
        put(u[i - 1], ',');
        put(u_under[i - 1], ',');
        put(residual[i - 1], '\n');
    }
}

}  // namespace fracsemi
