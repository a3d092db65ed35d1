#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracsemi::cli {

enum class Command {
    validate_operator,
    eigen,
    barriers,
    solve_p0,
    lambda0,
    solve,
    thresholds,
    sweep,
};

std::optional<Command> parse_command(const std::string& name);
const char* command_name(Command c);

struct Ladder {
    double from = 0.0;
    double to = 0.0;
    int points = 0;
    bool geometric = false;

    std::vector<double> values() const;
};

// lambda/mu entries accept a plain number, a ladder, or a reference to a
// computed threshold ({"times_lambda_star": 2.0} / {"times_mu_lambda": 0.5}).
struct ParamSpec {
    enum class Kind { absent, number, times_lambda_star, times_mu_lambda, ladder };
    Kind kind = Kind::absent;
    double value = 0.0;
    Ladder ladder;
};

struct Tolerances {
    double solver = 1e-12;      // CG relative residual
    double monotone = 1e-8;     // monotone iteration step + residual
    double eigen_rtol = 1e-11;  // eigenpair residual / lambda1
    double gradient = 1e-8;     // minimizer gradient sup-norm
    double mp_gradient = 1e-6;  // mountain-pass gradient sup-norm
    double lambda0_rel = 0.05;  // bracket relative width
    double threshold_rel = 1e-3;
    double detector = 1e-9;
    double embedding = 1e-13;
};

struct RunConfig {
    double s = 0.0;
    double q = 0.0;
    bool has_q = false;
    double r = 0.0;
    bool has_r = false;
    double alpha1 = 0.0;  // defaulted to the midpoint of (1, 1/(1-q)) when absent
    double alpha2 = 0.0;  // defaulted to 1/(1-q) + 0.5 when absent
    double x_left = -1.0;
    double x_right = 1.0;
    int n = 0;
    ParamSpec lambda;
    ParamSpec mu;
    Tolerances tol;
    unsigned seed = 1234;
    double crit_exp = 0.0;  // 2/(1-2s), filled when s < 1/2
};

// Parses and validates against the constraints the given command needs.
// Throws fracsemi::ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& j, Command command);
RunConfig load_config(const std::string& path, Command command);

}  // namespace fracsemi::cli
