#include "fracsemi/cli/config.hpp"

#include <cmath>
#include <fstream>

#include "fracsemi/errors.hpp"

namespace fracsemi::cli {

std::optional<Command> parse_command(const std::string& name) {
    if (name == "validate-operator") return Command::validate_operator;
    if (name == "eigen") return Command::eigen;
    if (name == "barriers") return Command::barriers;
    if (name == "solve-p0") return Command::solve_p0;
    if (name == "lambda0") return Command::lambda0;
    if (name == "solve") return Command::solve;
    if (name == "thresholds") return Command::thresholds;
    if (name == "sweep") return Command::sweep;
    return std::nullopt;
}

const char* command_name(Command c) {
    switch (c) {
        case Command::validate_operator: return "validate-operator";
        case Command::eigen: return "eigen";
        case Command::barriers: return "barriers";
        case Command::solve_p0: return "solve-p0";
        case Command::lambda0: return "lambda0";
        case Command::solve: return "solve";
        case Command::thresholds: return "thresholds";
        case Command::sweep: return "sweep";
    }
    return "?";
}

std::vector<double> Ladder::values() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(points));
    if (points == 1) {
        out.push_back(from);
        return out;
    }
    for (int k = 0; k < points; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(points - 1);
        if (geometric) {
            out.push_back(from * std::pow(to / from, t));
        } else {
            out.push_back(from + t * (to - from));
        }
    }
    return out;
}

namespace {

using nlohmann::json;

double need_number(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number()) {
        throw ConfigError(std::string("config: missing or non-numeric field \"") + field + "\"");
    }
    return j[field].get<double>();
}

ParamSpec parse_param(const json& j, const char* field, bool ladder_ok) {
    ParamSpec p;
    if (!j.contains(field)) return p;
    const json& v = j[field];
    if (v.is_number()) {
        p.kind = ParamSpec::Kind::number;
        p.value = v.get<double>();
        return p;
    }
    if (v.is_object() && v.contains("times_lambda_star")) {
        p.kind = ParamSpec::Kind::times_lambda_star;
        p.value = v["times_lambda_star"].get<double>();
        return p;
    }
    if (v.is_object() && v.contains("times_mu_lambda")) {
        p.kind = ParamSpec::Kind::times_mu_lambda;
        p.value = v["times_mu_lambda"].get<double>();
        return p;
    }
    if (v.is_object() && v.contains("from")) {
        if (!ladder_ok) {
            throw ConfigError(std::string("config: field \"") + field +
                              "\" may only be a ladder for the sweep command");
        }
        p.kind = ParamSpec::Kind::ladder;
        p.ladder.from = v.at("from").get<double>();
        p.ladder.to = v.at("to").get<double>();
        p.ladder.points = v.at("points").get<int>();
        const std::string scale = v.value("scale", std::string("linear"));
        if (scale == "geometric") {
            p.ladder.geometric = true;
        } else if (scale != "linear") {
            throw ConfigError(std::string("config: field \"") + field +
                              "\": scale must be \"linear\" or \"geometric\"");
        }
        if (p.ladder.points < 1) {
            throw ConfigError(std::string("config: field \"") + field + "\": points must be >= 1");
        }
        if (p.ladder.geometric && !(p.ladder.from > 0.0 && p.ladder.to > 0.0)) {
            throw ConfigError(std::string("config: field \"") + field +
                              "\": geometric ladder needs positive endpoints");
        }
        return p;
    }
    throw ConfigError(std::string("config: field \"") + field + "\" has an unsupported shape");
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j, Command command) {
    RunConfig c;
    c.s = need_number(j, "s");

    const bool operator_only =
        command == Command::validate_operator || command == Command::eigen;
    if (operator_only) {
        if (!(c.s > 0.0 && c.s < 1.0)) {
            throw ConfigError("config: field \"s\" must lie in (0,1) for operator commands");
        }
    } else {
        if (!(c.s > 0.0 && c.s < 0.5)) {
            throw ConfigError("config: field \"s\" must lie in (0, 1/2) for semipositone and "
                              "variational commands (N=1 needs N > 2s)");
        }
        c.crit_exp = 2.0 / (1.0 - 2.0 * c.s);
    }

    if (j.contains("domain")) {
        if (!j["domain"].is_array() || j["domain"].size() != 2) {
            throw ConfigError("config: field \"domain\" must be [x_left, x_right]");
        }
        c.x_left = j["domain"][0].get<double>();
        c.x_right = j["domain"][1].get<double>();
    }
    if (!(c.x_left < c.x_right)) {
        throw ConfigError("config: field \"domain\" needs x_left < x_right");
    }
    c.n = static_cast<int>(need_number(j, "n"));
    if (c.n < 4) throw ConfigError("config: field \"n\" must be >= 4");

    if (j.contains("q")) {
        c.q = j["q"].get<double>();
        c.has_q = true;
        if (!(c.q > 0.0 && c.q < 1.0)) {
            throw ConfigError("config: field \"q\" must lie in (0,1)");
        }
    }
    if (j.contains("r")) {
        c.r = j["r"].get<double>();
        c.has_r = true;
        if (!operator_only) {
            const double rmax = c.crit_exp - 1.0;
            if (!(c.r > 1.0 && c.r <= rmax + 1e-12)) {
                throw ConfigError("config: field \"r\" must lie in (1, " + std::to_string(rmax) +
                                  "] at s=" + std::to_string(c.s) +
                                  (c.r > rmax ? " (supercritical)" : ""));
            }
        }
    }

    const bool needs_q = !operator_only;
    if (needs_q && !c.has_q) throw ConfigError("config: field \"q\" required for this command");

    const bool needs_r = command == Command::solve || command == Command::thresholds ||
                         command == Command::sweep;
    if (needs_r && !c.has_r) throw ConfigError("config: field \"r\" required for this command");

    if (c.has_q) {
        const double lo = 1.0, hi = 1.0 / (1.0 - c.q);
        c.alpha1 = j.contains("alpha1") ? j["alpha1"].get<double>() : 0.5 * (lo + hi);
        if (!(c.alpha1 > lo && c.alpha1 < hi)) {
            throw ConfigError("config: field \"alpha1\" must lie strictly inside (1, " +
                              std::to_string(hi) + ")");
        }
        c.alpha2 = j.contains("alpha2") ? j["alpha2"].get<double>() : hi + 0.5;
        if (!(c.alpha2 > hi)) {
            throw ConfigError("config: field \"alpha2\" must exceed 1/(1-q) = " +
                              std::to_string(hi));
        }
    }

    c.lambda = parse_param(j, "lambda", command == Command::sweep);
    c.mu = parse_param(j, "mu", command == Command::sweep);
    if (c.mu.kind == ParamSpec::Kind::times_lambda_star ||
        c.lambda.kind == ParamSpec::Kind::times_mu_lambda) {
        throw ConfigError("config: \"times_lambda_star\" only applies to lambda and "
                          "\"times_mu_lambda\" only to mu");
    }

    const bool needs_lambda = command == Command::barriers || command == Command::solve_p0 ||
                              command == Command::solve || command == Command::thresholds ||
                              command == Command::sweep;
    if (needs_lambda && c.lambda.kind == ParamSpec::Kind::absent) {
        throw ConfigError("config: field \"lambda\" required for this command");
    }
    if (command == Command::sweep) {
        if (c.lambda.kind != ParamSpec::Kind::ladder || c.mu.kind != ParamSpec::Kind::ladder) {
            throw ConfigError("config: sweep needs ladder-valued \"lambda\" and \"mu\"");
        }
    }

    if (j.contains("seed")) c.seed = j["seed"].get<unsigned>();

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        auto grab = [&](const char* k, double& slot) {
            if (t.contains(k)) {
                slot = t[k].get<double>();
                if (!(slot > 0.0)) {
                    throw ConfigError(std::string("config: tolerance \"") + k +
                                      "\" must be positive");
                }
            }
        };
        grab("solver", c.tol.solver);
        grab("monotone", c.tol.monotone);
        grab("eigen_rtol", c.tol.eigen_rtol);
        grab("gradient", c.tol.gradient);
        grab("mp_gradient", c.tol.mp_gradient);
        grab("lambda0_rel", c.tol.lambda0_rel);
        grab("threshold_rel", c.tol.threshold_rel);
        grab("detector", c.tol.detector);
        grab("embedding", c.tol.embedding);
    }
    return c;
}

RunConfig load_config(const std::string& path, Command command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config: JSON parse failure in " + path + ": " + e.what());
    }
    return parse_config(j, command);
}

}  // namespace fracsemi::cli
