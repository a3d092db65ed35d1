#include "fracsemi/cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "fracsemi/barriers.hpp"
#include "fracsemi/report_json.hpp"
#include "fracsemi/spectral.hpp"
#include "fracsemi/variational.hpp"

namespace fracsemi::cli {

namespace fs = std::filesystem;
using fracsemi::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void prepare_out_dir(const std::string& out_dir, bool force) {
    fs::create_directories(out_dir);
    const fs::path report = fs::path(out_dir) / "report.json";
    if (fs::exists(report) && !force) {
        throw ConfigError("output directory already holds a report.json; pass --force to "
                          "overwrite");
    }
}

void write_report(const std::string& out_dir, const ordered_json& j) {
    std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
    out << j.dump(2) << "\n";
}

ordered_json config_json(const RunConfig& c) {
    ordered_json j;
    j["s"] = c.s;
    if (c.has_q) j["q"] = c.q;
    if (c.has_r) j["r"] = c.r;
    if (c.has_q) {
        j["alpha1"] = c.alpha1;
        j["alpha2"] = c.alpha2;
    }
    j["domain"] = {c.x_left, c.x_right};
    j["n"] = c.n;
    j["seed"] = c.seed;
    return j;
}

struct Problem {
    Grid grid;
    DiscreteFracLap op;
    Eigenpair eig;
};

Problem setup(const RunConfig& c, bool need_eig) {
    Problem p;
    p.grid = make_grid(c.x_left, c.x_right, c.n);
    p.op = assemble(p.grid, c.s);
    if (need_eig) p.eig = principal_eigenpair(p.op, c.tol.eigen_rtol);
    return p;
}

// resolves lambda, running the threshold search only when the config asks for
// a multiple of lambda_star
double resolve_lambda(const RunConfig& c, const Problem& p, ordered_json& report) {
    switch (c.lambda.kind) {
        case ParamSpec::Kind::number:
            return c.lambda.value;
        case ParamSpec::Kind::times_lambda_star: {
            ThresholdSearch ts = subsolution_threshold(p.op, p.eig, c.q, c.alpha1,
                                                       c.tol.threshold_rel);
            report["lambda_star"] = ts.lambda_star;
            report["lambda_ordered"] = ts.lambda_ordered;
            return c.lambda.value * ts.lambda_star;
        }
        default:
            throw ConfigError("config: lambda must resolve to a single number for this command");
    }
}

FieldFunction pointwise_uncut_residual(const DiscreteFracLap& op, const FieldFunction& u,
                                       double lambda, double mu, double q, double r) {
    FieldFunction res = apply(op, u);
    for (int i = 0; i < u.size(); ++i) {
        const double uq = u[i] > 0.0 ? std::pow(u[i], q) : 0.0;
        const double ur = u[i] > 0.0 ? std::pow(u[i], r) : 0.0;
        res[i] = res[i] - lambda * (uq - 1.0) - mu * ur;
    }
    return res;
}

int run_validate_operator(const RunConfig& c, const std::string& out_dir) {
    Problem p = setup(c, false);
    ordered_json rep;
    rep["command"] = "validate-operator";
    rep["config"] = config_json(c);

    ordered_json res;
    res["c_ns"] = p.op.c_ns;
    // the printed operator constant in the source material differs from the
    // standard 1-D normalization by exactly the factor s; recorded, not adopted
    res["paper_prefactor_ratio"] = p.op.s;

    double min_w = p.op.weights.empty() ? 0.0 : p.op.weights[0];
    for (double w : p.op.weights) min_w = std::min(min_w, w);
    res["min_offdiag_weight"] = min_w;

    FieldFunction one = make_field(p.grid, 1.0);
    FieldFunction a1 = apply(p.op, one);
    res["min_row_dominance"] = min_value(a1);

    // fast vs direct on a deterministic pseudo-random field
    {
        std::mt19937 rng(c.seed);
        std::normal_distribution<double> gauss;
        FieldFunction u = make_field(p.grid);
        for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
        FieldFunction f1 = apply(p.op, u);
        FieldFunction f2 = apply_direct(p.op, u);
        double dev = 0.0, scale = 0.0;
        for (int i = 0; i < u.size(); ++i) {
            dev = std::max(dev, std::abs(f1[i] - f2[i]));
            scale = std::max(scale, std::abs(f2[i]));
        }
        res["fast_vs_direct_rel"] = dev / scale;
    }

    // Getoor identity: A applied to (1-x^2)^s (mapped onto the domain) is the
    // closed-form constant in the interior
    {
        const double cmid = 0.5 * (c.x_left + c.x_right);
        const double half = p.grid.half_width();
        FieldFunction u = make_field(p.grid);
        for (int i = 1; i <= c.n; ++i) {
            const double t = (p.grid.node(i) - cmid) / half;
            u[i - 1] = std::pow(std::max(1.0 - t * t, 0.0), c.s);
        }
        FieldFunction au = apply(p.op, u);
        const double exact = getoor_constant(c.s) * std::pow(half, -2.0 * c.s);
        double err = 0.0;
        for (int i = 1; i <= c.n; ++i) {
            if (std::abs(p.grid.node(i) - cmid) > 0.9 * half) continue;
            err = std::max(err, std::abs(au[i - 1] - exact) / exact);
        }
        res["getoor_interior_rel_err"] = err;
        res["getoor_constant"] = exact;
    }

    const bool pass = min_w > 0.0 && min_value(a1) > 0.0 &&
                      res["fast_vs_direct_rel"].get<double>() < 1e-12 &&
                      res["getoor_interior_rel_err"].get<double>() < 0.05;
    res["pass"] = pass;
    rep["results"] = res;
    rep["passed"] = pass;
    write_report(out_dir, rep);
    return pass ? 0 : 1;
}

int run_eigen(const RunConfig& c, const std::string& out_dir) {
    Problem p = setup(c, true);
    ordered_json rep;
    rep["command"] = "eigen";
    rep["config"] = config_json(c);

    ordered_json res;
    res["lambda1"] = p.eig.lambda1;
    res["residual_inf"] = p.eig.residual_inf;
    res["iterations"] = p.eig.iterations;
    double sym = 0.0;
    for (int i = 1; i <= c.n; ++i) {
        sym = std::max(sym, std::abs(p.eig.phi1[i - 1] - p.eig.phi1[c.n - i]));
    }
    res["midpoint_symmetry_dev"] = sym;
    const double e2 = embedding_constant(p.op, 2.0, c.tol.embedding, c.seed);
    res["embed_2"] = e2;
    res["rayleigh_identity_dev"] = std::abs(e2 * std::sqrt(p.eig.lambda1) - 1.0);

    const bool pass = p.eig.residual_inf <= c.tol.eigen_rtol * p.eig.lambda1 &&
                      res["rayleigh_identity_dev"].get<double>() < 1e-5;
    res["pass"] = pass;
    rep["results"] = res;
    rep["passed"] = pass;
    write_report(out_dir, rep);
    return pass ? 0 : 1;
}

int run_barriers(const RunConfig& c, const std::string& out_dir) {
    Problem p = setup(c, true);
    ordered_json rep;
    rep["command"] = "barriers";
    rep["config"] = config_json(c);
    ordered_json res;

    ThresholdSearch ts = subsolution_threshold(p.op, p.eig, c.q, c.alpha1, c.tol.threshold_rel);
    res["lambda_star"] = ts.lambda_star;
    res["margin_at_star"] = ts.margin_at_star;
    res["margin_below"] = ts.margin_below;
    res["lambda_ordered"] = ts.lambda_ordered;

    double lambda = ts.lambda_star;
    if (c.lambda.kind == ParamSpec::Kind::number) lambda = c.lambda.value;
    if (c.lambda.kind == ParamSpec::Kind::times_lambda_star) {
        lambda = c.lambda.value * ts.lambda_star;
    }
    res["lambda"] = lambda;
    const double mu = c.mu.kind == ParamSpec::Kind::number ? c.mu.value : 0.0;
    res["mu"] = mu;
    const double rr = c.has_r ? c.r : 2.0;

    HComputation hc = compute_h(p.op, p.eig);
    res["h_min"] = min_value(hc.h);
    res["h_routes_max_rel_diff"] = hc.max_rel_diff_interior;

    BarrierSet bs = make_barrier_set(p.op, p.eig, lambda, mu, c.q, rr, c.alpha1, c.alpha2,
                                     c.tol.solver);
    res["sub_margin"] = bs.sub_margin;
    res["super_margin"] = bs.super_margin;
    res["ordering_ok"] = bs.ordering_ok;

    write_barriers_csv((fs::path(out_dir) / "barriers.csv").string(), p.grid, p.eig.phi1, hc.h,
                       bs.u_under, bs.z_super, bs.psi_super);

    const bool pass = bs.sub_margin <= 0.0 && bs.ordering_ok && min_value(hc.h) > 0.0;
    res["pass"] = pass;
    rep["results"] = res;
    rep["passed"] = pass;
    write_report(out_dir, rep);
    return pass ? 0 : 1;
}

int run_solve_p0(const RunConfig& c, const std::string& out_dir) {
    Problem p = setup(c, true);
    ordered_json rep;
    rep["command"] = "solve-p0";
    rep["config"] = config_json(c);
    ordered_json res;

    const double lambda = resolve_lambda(c, p, res);
    const double mu = c.mu.kind == ParamSpec::Kind::number ? c.mu.value : 0.0;
    const double rr = c.has_r ? c.r : 2.0;
    if (mu > 0.0 && !c.has_r) {
        throw ConfigError("config: field \"r\" required when mu > 0");
    }
    res["lambda"] = lambda;
    res["mu"] = mu;

    FieldFunction u_under = subsolution(p.eig, lambda, c.alpha1, c.q);
    res["sub_margin"] = certify_subsolution(p.op, u_under, lambda, c.q);

    FieldFunction upper;
    if (mu > 0.0) {
        FieldFunction psi = torsion(p.op, c.tol.solver);
        auto [ub, margin] = supersolution_mu(p.op, lambda, mu, c.q, rr, c.alpha2, psi);
        res["super_margin"] = margin;
        if (margin < 0.0) {
            throw ConfigError("solve-p0: the psi supersolution does not certify at this (lambda, "
                              "mu); decrease mu or increase lambda");
        }
        upper = std::move(ub);
    } else {
        FieldFunction z1 = solve_sublinear(p.op, 1.0, c.q, c.tol.solver);
        upper = z1;
        const double zs = std::pow(lambda, 1.0 / (1.0 - c.q));
        for (int i = 0; i < upper.size(); ++i) upper[i] *= zs;
    }

    SolveReport sr = monotone_iterate(p.op, lambda, mu, c.q, rr, &u_under, &upper,
                                      Direction::ascend, c.tol.monotone);
    FieldFunction resid = pointwise_uncut_residual(p.op, sr.solution, lambda, mu, c.q, rr);
    const std::string csv = (fs::path(out_dir) / "solution_0.csv").string();
    write_solution_csv(csv, p.grid, sr.solution, u_under, resid);

    ordered_json params;
    params["lambda"] = lambda;
    params["mu"] = mu;
    params["q"] = c.q;
    params["r"] = rr;
    params["s"] = c.s;
    params["n"] = c.n;
    res["solve"] = solve_report_json(sr, "solution_0.csv", params);

    const bool pass = sr.converged && sr.ordering_ok && sr.min_value > 0.0;
    res["pass"] = pass;
    rep["results"] = res;
    rep["passed"] = pass;
    write_report(out_dir, rep);
    return pass ? 0 : 1;
}

int run_lambda0(const RunConfig& c, const std::string& out_dir) {
    Problem p = setup(c, false);
    ordered_json rep;
    rep["command"] = "lambda0";
    rep["config"] = config_json(c);
    ordered_json res;

    Lambda0Bracket br = estimate_lambda0(p.op, c.q, c.tol.lambda0_rel, c.tol.detector);
    res["lambda_lo"] = br.lambda_lo;
    res["lambda_hi"] = br.lambda_hi;
    res["detector_lo"] = br.detector_lo;
    res["detector_hi"] = br.detector_hi;
    res["relative_width"] = (br.lambda_hi - br.lambda_lo) / br.lambda_hi;
    ordered_json trace = ordered_json::array();
    for (const auto& [lam, det] : br.trace) {
        trace.push_back(ordered_json{{"lambda", lam}, {"detector", det}});
    }
    res["trace"] = trace;

    const bool pass = !br.detector_lo && br.detector_hi;
    res["pass"] = pass;
    rep["results"] = res;
    rep["passed"] = pass;
    write_report(out_dir, rep);
    return pass ? 0 : 1;
}

int run_thresholds(const RunConfig& c, const std::string& out_dir) {
    Problem p = setup(c, true);
    ordered_json rep;
    rep["command"] = "thresholds";
    rep["config"] = config_json(c);
    ordered_json res;

    const double lambda = resolve_lambda(c, p, res);
    res["lambda"] = lambda;
    FieldFunction u_under = subsolution(p.eig, lambda, c.alpha1, c.q);
    CutoffNonlinearity nl = make_cutoff(lambda, 0.0, c.q, c.r, c.s, std::move(u_under));
    ThresholdReport tr = choose_rho_mu(nl, p.op, c.seed);
    res["thresholds"] = threshold_report_json(tr);
    res["growth_c"] = nl.growth_c;
    res["growth_cprime"] = nl.growth_cprime;

    const bool pass = tr.mu_lambda > 0.0 && tr.rho > 0.0;
    res["pass"] = pass;
    rep["results"] = res;
    rep["passed"] = pass;
    write_report(out_dir, rep);
    return pass ? 0 : 1;
}

int run_solve(const RunConfig& c, const std::string& out_dir) {
    Problem p = setup(c, true);
    ordered_json rep;
    rep["command"] = "solve";
    rep["config"] = config_json(c);
    ordered_json res;

    const double lambda = resolve_lambda(c, p, res);
    res["lambda"] = lambda;

    FieldFunction u_under = subsolution(p.eig, lambda, c.alpha1, c.q);
    res["sub_margin"] = certify_subsolution(p.op, u_under, lambda, c.q);

    CutoffNonlinearity nl0 = make_cutoff(lambda, 0.0, c.q, c.r, c.s, u_under);
    ThresholdReport tr = choose_rho_mu(nl0, p.op, c.seed);
    res["thresholds"] = threshold_report_json(tr);

    const bool critical = nl0.critical();
    res["critical_case"] = critical;

    double mu = 0.0;
    switch (c.mu.kind) {
        case ParamSpec::Kind::number:
            mu = c.mu.value;
            break;
        case ParamSpec::Kind::times_mu_lambda:
            mu = c.mu.value *
                 (critical ? std::min(tr.mu_lambda, tr.mu0_critical) : tr.mu_lambda);
            break;
        case ParamSpec::Kind::absent:
            throw ConfigError("config: field \"mu\" required for solve");
        default:
            throw ConfigError("config: mu must resolve to a single number for solve");
    }
    res["mu"] = mu;
    if (critical && !(mu < std::min(tr.mu_lambda, tr.mu0_critical))) {
        throw ConfigError("solve: critical case needs mu < min(mu_lambda, mu0_critical) = " +
                          fmt17(std::min(tr.mu_lambda, tr.mu0_critical)));
    }
    if (!(mu < tr.mu_lambda)) {
        res["mu_warning"] = "mu is not below mu_lambda; the sphere barrier is uncertified";
    }

    CutoffNonlinearity nl = make_cutoff(lambda, mu, c.q, c.r, c.s, u_under);
    ordered_json params;
    params["lambda"] = lambda;
    params["mu"] = mu;
    params["q"] = c.q;
    params["r"] = c.r;
    params["s"] = c.s;
    params["n"] = c.n;
    params["rho"] = tr.rho;

    ordered_json solutions = ordered_json::array();
    bool pass = true;

    SolveReport min_rep = minimize_in_ball(nl, p.op, tr.rho, c.tol.gradient, c.seed);
    {
        FieldFunction resid =
            pointwise_uncut_residual(p.op, min_rep.solution, lambda, mu, c.q, c.r);
        write_solution_csv((fs::path(out_dir) / "solution_0.csv").string(), p.grid,
                           min_rep.solution, nl.u_under, resid);
        ordered_json sj = solve_report_json(min_rep, "solution_0.csv", params);
        sj["m0"] = min_rep.energy ? ordered_json(*min_rep.energy) : ordered_json(nullptr);
        sj["verify"] = check_report_json(verify_solution(nl, p.op, min_rep.solution));
        solutions.push_back(sj);
        pass = pass && min_rep.converged && *min_rep.energy <= 0.0 && min_rep.ordering_ok &&
               min_rep.min_value > 0.0;
    }

    if (!critical && mu > 0.0) {
        MountainPassResult mp =
            mountain_pass(nl, p.op, p.eig.phi1, min_rep.solution, tr.rho, c.tol.mp_gradient);
        FieldFunction resid =
            pointwise_uncut_residual(p.op, mp.report.solution, lambda, mu, c.q, c.r);
        write_solution_csv((fs::path(out_dir) / "solution_1.csv").string(), p.grid,
                           mp.report.solution, nl.u_under, resid);
        ordered_json sj = solve_report_json(mp.report, "solution_1.csv", params);
        sj["m_mu"] = mp.report.energy ? ordered_json(*mp.report.energy) : ordered_json(nullptr);
        sj["t0"] = mp.t0;
        sj["sweeps"] = mp.sweeps;
        sj["separation"] = mp.separation;
        sj["merged"] = mp.merged;
        sj["verify"] = check_report_json(verify_solution(nl, p.op, mp.report.solution));
        solutions.push_back(sj);
        pass = pass && mp.report.converged && *mp.report.energy > 0.0 && !mp.merged &&
               mp.report.ordering_ok;
    }

    res["solutions"] = solutions;
    res["solution_count"] = solutions.size();
    res["pass"] = pass;
    rep["results"] = res;
    rep["passed"] = pass;
    write_report(out_dir, rep);
    return pass ? 0 : 1;
}

struct SweepRow {
    double lambda = 0.0;
    double mu = 0.0;
    bool detector = false;
    int solution_count = 0;
    std::optional<double> m0, m_mu, min_value_, residual_min, residual_mp;
    std::string status = "ok";
};

int run_sweep(const RunConfig& c, const std::string& out_dir, int workers) {
    Problem p = setup(c, true);
    const std::vector<double> lambdas = c.lambda.ladder.values();
    const std::vector<double> mus = c.mu.ladder.values();

    // shared read-only caches, built before the pool starts
    FieldFunction z1 = solve_sublinear(p.op, 1.0, c.q, c.tol.solver);
    ThresholdReport embeds;  // embedding constants are lambda-independent
    {
        CutoffNonlinearity probe =
            make_cutoff(1.0, 0.0, c.q, c.r, c.s, subsolution(p.eig, 1.0, c.alpha1, c.q));
        embeds = choose_rho_mu(probe, p.op, c.seed);
    }

    std::vector<SweepRow> rows(lambdas.size() * mus.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const size_t k = next.fetch_add(1);
            if (k >= rows.size()) return;
            const double lambda = lambdas[k / mus.size()];
            const double mu = mus[k % mus.size()];
            SweepRow row;
            row.lambda = lambda;
            row.mu = mu;
            try {
                FieldFunction z = z1;
                const double zs = std::pow(lambda, 1.0 / (1.0 - c.q));
                for (int i = 0; i < z.size(); ++i) z[i] *= zs;
                SolveReport det = monotone_iterate(p.op, lambda, 0.0, c.q, c.r, nullptr, &z,
                                                   Direction::descend, c.tol.detector, 100000);
                row.detector = det.converged && det.min_value > 0.0;
                row.min_value_ = det.min_value;

                if (row.detector && mu == 0.0) {
                    row.solution_count = 1;
                    row.residual_min = det.residual_inf;
                } else if (row.detector && mu > 0.0) {
                    FieldFunction u_under = subsolution(p.eig, lambda, c.alpha1, c.q);
                    CutoffNonlinearity nl = make_cutoff(lambda, mu, c.q, c.r, c.s, u_under);
                    const ThresholdReport tr =
                        choose_rho_mu_with_embeddings(nl, p.grid.length(), embeds);
                    SolveReport m = minimize_in_ball(nl, p.op, tr.rho, c.tol.gradient, c.seed);
                    CheckReport chk = verify_solution(nl, p.op, m.solution);
                    row.m0 = m.energy ? *m.energy : 0.0;
                    row.residual_min = chk.uncut_residual_inf;
                    row.min_value_ = chk.min_value;
                    const bool min_ok = m.converged && chk.positive && chk.ordering_ok;
                    if (min_ok) row.solution_count += 1;
                    if (!nl.critical() && mu < tr.mu_lambda) {
                        try {
                            MountainPassResult mp = mountain_pass(nl, p.op, p.eig.phi1,
                                                                  m.solution, tr.rho,
                                                                  c.tol.mp_gradient);
                            row.m_mu = mp.report.energy ? *mp.report.energy : 0.0;
                            row.residual_mp = mp.report.residual_inf;
                            if (mp.report.converged && !mp.merged && mp.report.min_value > 0.0) {
                                row.solution_count += 1;
                            }
                        } catch (const MountainPassError& e) {
                            row.status = std::string("mp-failed: ") + e.what();
                        }
                    }
                }
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
            rows[k] = std::move(row);
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::ofstream csv(fs::path(out_dir) / "sweep.csv", std::ios::binary);
    csv << "lambda,mu,detector,solution_count,m0,m_mu,min_value,residual_min,residual_mp,status\n";
    auto put_opt = [&](const std::optional<double>& v) {
        if (v) csv << fmt17(*v);
    };
    for (const SweepRow& row : rows) {
        csv << fmt17(row.lambda) << ',' << fmt17(row.mu) << ','
            << (row.detector ? "true" : "false") << ',' << row.solution_count << ',';
        put_opt(row.m0);
        csv << ',';
        put_opt(row.m_mu);
        csv << ',';
        put_opt(row.min_value_);
        csv << ',';
        put_opt(row.residual_min);
        csv << ',';
        put_opt(row.residual_mp);
        csv << ',' << row.status << "\n";
    }
    csv.close();

    ordered_json rep;
    rep["command"] = "sweep";
    rep["config"] = config_json(c);
    ordered_json res;
    res["rows"] = rows.size();
    res["lambda_points"] = lambdas.size();
    res["mu_points"] = mus.size();
    res["sweep_csv"] = "sweep.csv";
    bool pass = true;
    for (const SweepRow& row : rows) pass = pass && row.status.rfind("error", 0) != 0;
    res["pass"] = pass;
    rep["results"] = res;
    rep["passed"] = pass;
    write_report(out_dir, rep);
    return pass ? 0 : 1;
}

}  // namespace

int run_command(const RunConfig& config, Command command, const std::string& out_dir, int workers,
                bool force) {
    prepare_out_dir(out_dir, force);
    switch (command) {
        case Command::validate_operator: return run_validate_operator(config, out_dir);
        case Command::eigen: return run_eigen(config, out_dir);
        case Command::barriers: return run_barriers(config, out_dir);
        case Command::solve_p0: return run_solve_p0(config, out_dir);
        case Command::lambda0: return run_lambda0(config, out_dir);
        case Command::thresholds: return run_thresholds(config, out_dir);
        case Command::solve: return run_solve(config, out_dir);
        case Command::sweep: return run_sweep(config, out_dir, workers);
    }
    throw ConfigError("unknown command");
}

}  // namespace fracsemi::cli
