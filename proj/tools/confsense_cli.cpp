// confsense command-line front end: simulation, estimation, the sensitivity
// analyses, the workflow recommender, and the end-to-end reproduction
// harness. Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "confsense/bias_formulas.hpp"
#include "confsense/copula_sens.hpp"
#include "confsense/csv.hpp"
#include "confsense/data_table.hpp"
#include "confsense/errors.hpp"
#include "confsense/estimators.hpp"
#include "confsense/math.hpp"
#include "confsense/mediation_sens.hpp"
#include "confsense/method_registry.hpp"
#include "confsense/ovb.hpp"
#include "confsense/rng.hpp"
#include "confsense/scm.hpp"
#include "confsense/scm_json.hpp"
#include "confsense/summary_sens.hpp"
#include "confsense/version.hpp"

namespace cs = confsense;

namespace {

std::string g_command_line;

std::string file_header(std::optional<std::uint64_t> seed, bool stochastic = false) {
    std::string line = std::string("confsense ") + cs::kVersion + " | " + g_command_line +
                       " | seed=" + (seed ? std::to_string(*seed) : "-");
    if (stochastic) line += std::string(" | rng=") + cs::rng::kAlgorithmId;
    return line;
}

void write_table(const std::string& path, const cs::DataTable& table,
                 std::optional<std::uint64_t> seed, bool stochastic = false) {
    cs::write_csv_file(path, table, {file_header(seed, stochastic)});
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
    std::string spec_path;
    std::size_t n = 200000;
    std::uint64_t seed = 20210601;
    std::string out_path;
};

int cmd_simulate(const SimulateOpts& o) {
    const auto spec = cs::scm::load_spec(o.spec_path);
    const auto data = cs::scm::simulate(spec, o.n, o.seed);
    write_table(o.out_path, data, o.seed, true);
    std::cout << "wrote " << data.n_rows() << " rows x " << data.n_cols() << " columns to "
              << o.out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// truth

struct TruthOpts {
    std::string spec_path;
    std::string estimand = "ace";
    std::string treatment, outcome, mediator, instrument;
    std::size_t n = 200000;
    std::uint64_t seed = 20210601;
    bool force_mc = false;
    std::string out_path;
};

cs::scm::EstimandKind parse_estimand_kind(const std::string& s) {
    if (s == "ace" || s == "ACE") return cs::scm::EstimandKind::ace;
    if (s == "nde" || s == "NDE") return cs::scm::EstimandKind::nde;
    if (s == "nie" || s == "NIE") return cs::scm::EstimandKind::nie;
    if (s == "total" || s == "TOTAL") return cs::scm::EstimandKind::total;
    if (s == "late" || s == "LATE") return cs::scm::EstimandKind::late;
    throw cs::ValidationError("unknown estimand '" + s + "' (use ace|nde|nie|total|late)");
}

int cmd_truth(const TruthOpts& o) {
    const auto spec = cs::scm::load_spec(o.spec_path);
    cs::scm::EstimandQuery q;
    q.kind = parse_estimand_kind(o.estimand);
    q.treatment = o.treatment;
    q.outcome = o.outcome;
    if (!o.mediator.empty()) q.mediator = o.mediator;
    if (!o.instrument.empty()) q.instrument = o.instrument;
    const auto r = cs::scm::true_estimand(spec, q, o.n, o.seed, o.force_mc);
    const char* method = r.method == cs::scm::TruthMethod::path_trace ? "path-trace" : "monte-carlo";
    std::cout << "estimand=" << cs::scm::to_string(q.kind) << " value=" << cs::format_double(r.value)
              << " mc_se=" << cs::format_double(r.mc_std_error) << " method=" << method << "\n";
    if (!o.out_path.empty()) {
        cs::DataTable t;
        t.add_column("value", {r.value});
        t.add_column("mc_std_error", {r.mc_std_error});
        t.add_column("path_trace", {r.method == cs::scm::TruthMethod::path_trace ? 1.0 : 0.0});
        write_table(o.out_path, t, o.seed, r.method == cs::scm::TruthMethod::monte_carlo);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOpts {
    std::string data_path;
    std::string method = "diff-means";
    std::string treatment, outcome, instrument, mediator;
    std::vector<std::string> regressors;
    std::vector<std::string> covariates;
    std::string out_path;
};

void print_ols(const cs::OlsFit& fit) {
    std::cout << "term,coef,se,t\n";
    for (std::size_t i = 0; i < fit.names.size(); ++i) {
        std::cout << fit.names[i] << "," << cs::format_double(fit.coef[i]) << ","
                  << cs::format_double(fit.se[i]) << "," << cs::format_double(fit.t[i]) << "\n";
    }
    std::cout << "residual_sd=" << cs::format_double(fit.residual_sd) << " df=" << fit.df
              << " r2=" << cs::format_double(fit.r_squared) << "\n";
}

int cmd_estimate(const EstimateOpts& o) {
    const auto data = cs::read_csv_file(o.data_path);
    if (o.method == "diff-means") {
        const auto [est, se] = cs::diff_in_means(data, o.treatment, o.outcome);
        std::cout << "diff_in_means=" << cs::format_double(est) << " se=" << cs::format_double(se)
                  << "\n";
        if (!o.out_path.empty()) {
            cs::DataTable t;
            t.add_column("estimate", {est});
            t.add_column("se", {se});
            write_table(o.out_path, t, std::nullopt);
        }
    } else if (o.method == "ols") {
        if (o.regressors.empty()) throw cs::ValidationError("ols needs --regressors");
        const auto fit = cs::ols(data, o.outcome, o.regressors);
        print_ols(fit);
        if (!o.out_path.empty()) {
            cs::DataTable t;
            std::vector<double> coefs(fit.coef.data(), fit.coef.data() + fit.coef.size());
            std::vector<double> ses(fit.se.data(), fit.se.data() + fit.se.size());
            std::vector<double> ts(fit.t.data(), fit.t.data() + fit.t.size());
            t.add_column("coef", coefs);
            t.add_column("se", ses);
            t.add_column("t", ts);
            write_table(o.out_path, t, std::nullopt);
        }
    } else if (o.method == "wald") {
        const double w = cs::wald_iv(data, o.instrument, o.treatment, o.outcome);
        std::cout << "wald_iv=" << cs::format_double(w) << "\n";
        if (!o.out_path.empty()) {
            cs::DataTable t;
            t.add_column("wald_iv", {w});
            write_table(o.out_path, t, std::nullopt);
        }
    } else if (o.method == "mediation") {
        const auto fit = cs::fit_mediation(data, o.treatment, o.mediator, o.outcome, o.covariates);
        std::cout << "beta_total=" << cs::format_double(fit.beta_total)
                  << " beta_treat_med=" << cs::format_double(fit.beta_treat_med)
                  << " beta_direct=" << cs::format_double(fit.beta_direct)
                  << " gamma_mediator=" << cs::format_double(fit.gamma_mediator) << "\n"
                  << "sigma_total=" << cs::format_double(fit.sigma_total)
                  << " sigma_mediator=" << cs::format_double(fit.sigma_mediator)
                  << " resid_corr=" << cs::format_double(fit.resid_corr) << " n=" << fit.n << "\n";
    } else {
        throw cs::ValidationError("unknown estimator '" + o.method +
                                  "' (use diff-means|ols|wald|mediation)");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sens subcommands

struct EvalueOpts {
    double rr = std::numeric_limits<double>::quiet_NaN();
    double smd = std::numeric_limits<double>::quiet_NaN();
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();
    std::string out_path;
};

int cmd_sens_evalue(const EvalueOpts& o) {
    double rr = o.rr;
    if (std::isnan(rr)) {
        if (std::isnan(o.smd)) throw cs::ValidationError("evalue needs --rr or --smd");
        rr = cs::summary::rr_from_smd(o.smd);
        std::cout << "rr_from_smd=" << cs::format_double(rr) << "\n";
    }
    const double e = cs::summary::evalue_point(rr);
    std::cout << "evalue=" << cs::format_double(e) << "\n";
    double eci = std::numeric_limits<double>::quiet_NaN();
    if (!std::isnan(o.lo) || !std::isnan(o.hi)) {
        cs::summary::RiskSummary s;
        s.rr = rr;
        if (!std::isnan(o.lo)) s.lo = o.lo;
        if (!std::isnan(o.hi)) s.hi = o.hi;
        const auto r = cs::summary::evalue_ci(s);
        eci = r.ci;
        std::cout << "evalue_ci=" << cs::format_double(r.ci) << "\n";
    }
    if (!o.out_path.empty()) {
        cs::DataTable t;
        t.add_column("rr", {rr});
        t.add_column("evalue", {e});
        if (!std::isnan(eci)) t.add_column("evalue_ci", {eci});
        write_table(o.out_path, t, std::nullopt);
    }
    return 0;
}

struct ManskiOpts {
    std::string data_path, treatment, outcome;
    std::vector<std::string> covariates;
    double p_treat = std::numeric_limits<double>::quiet_NaN();
    double p1 = std::numeric_limits<double>::quiet_NaN();
    double p0 = std::numeric_limits<double>::quiet_NaN();
    std::string out_path;
};

int cmd_sens_manski(const ManskiOpts& o) {
    cs::summary::AteBounds b;
    if (!o.data_path.empty()) {
        const auto data = cs::read_csv_file(o.data_path);
        b = o.covariates.empty()
                ? cs::summary::manski_from_data(data, o.treatment, o.outcome)
                : cs::summary::manski_stratified(data, o.treatment, o.outcome, o.covariates);
    } else {
        if (std::isnan(o.p_treat) || std::isnan(o.p1) || std::isnan(o.p0)) {
            throw cs::ValidationError("manski needs --data or all of --p-treat --p1 --p0");
        }
        b = cs::summary::manski_bounds(o.p_treat, o.p1, o.p0);
    }
    std::cout << "E[Y(1)] in [" << cs::format_double(b.y1_lo) << ", " << cs::format_double(b.y1_hi)
              << "]\n"
              << "E[Y(0)] in [" << cs::format_double(b.y0_lo) << ", " << cs::format_double(b.y0_hi)
              << "]\n"
              << "ATE in [" << cs::format_double(b.ate_lo) << ", " << cs::format_double(b.ate_hi)
              << "]\n";
    if (!o.out_path.empty()) {
        cs::DataTable t;
        t.add_column("y1_lo", {b.y1_lo});
        t.add_column("y1_hi", {b.y1_hi});
        t.add_column("y0_lo", {b.y0_lo});
        t.add_column("y0_hi", {b.y0_hi});
        t.add_column("ate_lo", {b.ate_lo});
        t.add_column("ate_hi", {b.ate_hi});
        write_table(o.out_path, t, std::nullopt);
    }
    return 0;
}

struct OvbOpts {
    std::string data_path, treatment, outcome;
    std::vector<std::string> covariates;
    std::size_t grid = 41;
    double r2max = 0.8;
    double q = 1.0;
    std::string out_path;
};

int cmd_sens_ovb(const OvbOpts& o) {
    const auto data = cs::read_csv_file(o.data_path);
    std::vector<std::string> regressors{o.treatment};
    regressors.insert(regressors.end(), o.covariates.begin(), o.covariates.end());
    const auto fit = cs::ols(data, o.outcome, regressors);
    const double rv = cs::ovb::robustness_value(fit, o.treatment, o.q);
    std::cout << "estimate=" << cs::format_double(fit.coefficient(o.treatment))
              << " se=" << cs::format_double(fit.std_error(o.treatment))
              << " t=" << cs::format_double(fit.t_stat(o.treatment)) << " df=" << fit.df << "\n"
              << "robustness_value(q=" << cs::format_double(o.q) << ")=" << cs::format_double(rv)
              << "\n";
    const auto grid = cs::ovb::contour_grid(fit, o.treatment, o.grid, o.r2max);
    if (!o.out_path.empty()) {
        // Long format; the worst-case row at r2_yu = 1 is appended with a flag.
        std::vector<double> aus, yus, est, ts, extreme;
        for (std::size_t ia = 0; ia < grid.r2_au_axis.size(); ++ia) {
            for (std::size_t iy = 0; iy < grid.r2_yu_axis.size(); ++iy) {
                aus.push_back(grid.r2_au_axis[ia]);
                yus.push_back(grid.r2_yu_axis[iy]);
                est.push_back(grid.estimate_at(ia, iy));
                ts.push_back(grid.t_at(ia, iy));
                extreme.push_back(0.0);
            }
        }
        for (std::size_t ia = 0; ia < grid.r2_au_axis.size(); ++ia) {
            aus.push_back(grid.r2_au_axis[ia]);
            yus.push_back(1.0);
            est.push_back(grid.extreme_estimates[ia]);
            ts.push_back(std::numeric_limits<double>::quiet_NaN());
            extreme.push_back(1.0);
        }
        // NaN t-stats are not representable in a DataTable; emit the grid by hand.
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) throw cs::ValidationError("cannot write file '" + o.out_path + "'");
        out << "# " << file_header(std::nullopt) << "\n";
        out << "r2_au,r2_yu,adjusted_estimate,adjusted_t,extreme_row\n";
        for (std::size_t i = 0; i < aus.size(); ++i) {
            out << cs::format_double(aus[i]) << ',' << cs::format_double(yus[i]) << ','
                << cs::format_double(est[i]) << ','
                << (std::isnan(ts[i]) ? std::string("") : cs::format_double(ts[i])) << ','
                << (extreme[i] != 0.0 ? '1' : '0') << "\n";
        }
        std::cout << "wrote contour grid to " << o.out_path << "\n";
    }
    return 0;
}

struct CopulaOpts {
    std::string data_path, treatment, outcome;
    std::string mode = "exact";
    double rho_max = 0.95;
    std::size_t points = 41;
    std::string out_path;
};

cs::copula::Mode parse_copula_mode(const std::string& s) {
    if (s == "exact") return cs::copula::Mode::exact;
    if (s == "naive") return cs::copula::Mode::naive;
    throw cs::ValidationError("unknown copula mode '" + s + "' (use exact|naive)");
}

// The identity row (rho = 0, naive contrast) leads; the sweep follows in
// ascending rho order.
void write_rho_curve(const std::string& path, const cs::copula::RhoCurve& curve,
                     std::optional<std::uint64_t> seed, bool stochastic = false) {
    std::vector<double> rhos, aces;
    for (const auto& pt : curve.points) {
        if (pt.rho == 0.0) {
            rhos.push_back(pt.rho);
            aces.push_back(pt.ace);
        }
    }
    for (const auto& pt : curve.points) {
        if (pt.rho != 0.0) {
            rhos.push_back(pt.rho);
            aces.push_back(pt.ace);
        }
    }
    cs::DataTable t;
    t.add_column("rho", rhos);
    t.add_column("ace", aces);
    write_table(path, t, seed, stochastic);
}

int cmd_sens_copula(const CopulaOpts& o) {
    const auto data = cs::read_csv_file(o.data_path);
    const auto summary = cs::copula::summarize_for_copula(data, o.treatment, o.outcome);
    const auto mode = parse_copula_mode(o.mode);
    const auto curve = cs::copula::rho_curve(summary, o.rho_max, o.points, mode);
    std::cout << "tau_unadj=" << cs::format_double(summary.tau_unadj)
              << " p_treated=" << cs::format_double(summary.p_treated)
              << " s_within=" << cs::format_double(summary.s_within) << " n=" << summary.n << "\n";
    if (curve.rho_null) {
        std::cout << "rho_nullifying=" << cs::format_double(*curve.rho_null) << "\n";
    } else {
        std::cout << "rho_nullifying: not nullifiable in range\n";
    }
    std::cout << "ace_bounds=[" << cs::format_double(curve.ace_min) << ", "
              << cs::format_double(curve.ace_max) << "] over rho in [-"
              << cs::format_double(o.rho_max) << ", " << cs::format_double(o.rho_max) << "]\n";
    if (!o.out_path.empty()) {
        write_rho_curve(o.out_path, curve, std::nullopt);
        std::cout << "wrote rho curve to " << o.out_path << "\n";
    }
    return 0;
}

struct MediationOpts {
    std::string data_path, treatment, mediator, outcome;
    std::vector<std::string> covariates;
    double rho_max = 0.9;
    std::size_t points = 19;
    std::string out_path;
};

int cmd_sens_mediation(const MediationOpts& o) {
    const auto data = cs::read_csv_file(o.data_path);
    const auto fit = cs::fit_mediation(data, o.treatment, o.mediator, o.outcome, o.covariates);
    const auto grid = cs::mediation::mediation_bounds(fit, o.rho_max, o.points);
    std::cout << "beta_total=" << cs::format_double(fit.beta_total)
              << " beta_treat_med=" << cs::format_double(fit.beta_treat_med)
              << " resid_corr=" << cs::format_double(fit.resid_corr) << "\n"
              << "NDE in [" << cs::format_double(grid.nde_min) << ", "
              << cs::format_double(grid.nde_max) << "]  NIE in ["
              << cs::format_double(grid.nie_min) << ", " << cs::format_double(grid.nie_max)
              << "] over rho in [-" << cs::format_double(o.rho_max) << ", "
              << cs::format_double(o.rho_max) << "]\n";
    if (!o.out_path.empty()) {
        std::vector<double> rhos, ndes, nies;
        for (const auto& row : grid.rows) {
            rhos.push_back(row.rho);
            ndes.push_back(row.nde);
            nies.push_back(row.nie);
        }
        cs::DataTable t;
        t.add_column("rho", rhos);
        t.add_column("nde", ndes);
        t.add_column("nie", nies);
        write_table(o.out_path, t, std::nullopt);
        std::cout << "wrote rho grid to " << o.out_path << "\n";
    }
    return 0;
}

struct BiasTableOpts {
    std::string joint_path;
    std::string out_path;
};

int cmd_sens_bias_table(const BiasTableOpts& o) {
    // Expected columns: x, u, a, p, ey. Labels are numeric codes.
    const auto raw = cs::read_csv_file(o.joint_path);
    const auto& xs = raw.column("x");
    const auto& us = raw.column("u");
    const auto& as = raw.column("a");
    const auto& ps = raw.column("p");
    const auto& eys = raw.column("ey");

    std::vector<double> x_levels, u_levels;
    auto level_index = [](std::vector<double>& levels, double v) {
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (levels[i] == v) return i;
        }
        levels.push_back(v);
        return levels.size() - 1;
    };
    std::vector<std::size_t> xi(raw.n_rows()), ui(raw.n_rows());
    for (std::size_t i = 0; i < raw.n_rows(); ++i) {
        xi[i] = level_index(x_levels, xs[i]);
        ui[i] = level_index(u_levels, us[i]);
    }
    std::vector<std::string> x_labels, u_labels;
    for (double v : x_levels) x_labels.push_back(cs::format_double(v));
    for (double v : u_levels) u_labels.push_back(cs::format_double(v));
    cs::bias::DiscreteJoint joint(x_labels, u_labels);
    for (std::size_t i = 0; i < raw.n_rows(); ++i) {
        if (as[i] != 0.0 && as[i] != 1.0) {
            throw cs::ValidationError("bias-table: treatment level must be 0 or 1");
        }
        const int a = as[i] == 1.0 ? 1 : 0;
        joint.p(xi[i], ui[i], a) += ps[i];
        joint.ey(xi[i], ui[i], a) = eys[i];
    }
    const double tau = cs::bias::tau_adjusted(joint);
    const double tau_s = cs::bias::tau_star(joint);
    std::cout << "tau_adjusted=" << cs::format_double(tau) << "\n"
              << "tau_star=" << cs::format_double(tau_s) << "\n"
              << "confounding_bias=" << cs::format_double(tau_s - tau) << "\n";
    if (!o.out_path.empty()) {
        cs::DataTable t;
        t.add_column("tau_adjusted", {tau});
        t.add_column("tau_star", {tau_s});
        t.add_column("confounding_bias", {tau_s - tau});
        write_table(o.out_path, t, std::nullopt);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// workflow

struct WorkflowOpts {
    std::string answers_path;
    std::string registry_path;
    std::string estimand, position, value_type = "continuous", functional = "no-preference";
    std::vector<std::string> metrics;
    bool needs_covadj = false, prior = false, assumption_free = false;
    int count = 1;
    std::string note;
    std::string out_path;
    bool any_flag_set = false;
};

int cmd_workflow(const WorkflowOpts& o) {
    namespace reg = cs::registry;
    reg::WorkflowAnswers answers;
    // Malformed questionnaires are usage errors (exit 1), unlike data errors.
    try {
        if (!o.answers_path.empty()) {
            std::ifstream in(o.answers_path);
            if (!in) {
                throw cs::ValidationError("cannot open answers file '" + o.answers_path + "'");
            }
            std::ostringstream ss;
            ss << in.rdbuf();
            answers = reg::answers_from_json(ss.str());
        } else {
            if (o.estimand.empty() || o.position.empty()) {
                throw cs::ValidationError(
                    "workflow needs --answers or at least --estimand and --position");
            }
            answers.estimand = o.estimand == "any"
                                   ? std::nullopt
                                   : std::optional(reg::estimand_from_string(o.estimand));
            answers.position = o.position == "any"
                                   ? std::nullopt
                                   : std::optional(reg::position_from_string(o.position));
            for (const auto& m : o.metrics) answers.metrics.push_back(reg::metric_from_string(m));
            answers.needs_covariate_adjustment = o.needs_covadj;
            answers.confounder_value_type = o.value_type;
            answers.distribution_prior_available = o.prior;
            answers.confounder_count = o.count;
            answers.want_assumption_free = o.assumption_free;
            answers.identification_note = o.note;
            if (o.functional != "no-preference") {
                answers.functional_preference = reg::functional_class_from_string(o.functional);
            }
            reg::validate_answers(answers);
        }
    } catch (const cs::ValidationError& e) {
        std::cerr << "invalid questionnaire: " << e.what() << "\n";
        return 1;
    }

    std::vector<reg::MethodRecord> records;
    if (!o.registry_path.empty()) {
        std::ifstream in(o.registry_path);
        if (!in) throw cs::ValidationError("cannot open registry file '" + o.registry_path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        records = reg::registry_from_json(ss.str());
    } else {
        records = reg::builtin_registry();
    }

    const auto rec = reg::recommend(answers, records);

    std::cout << "ranked methods (" << rec.ranked.size() << "):\n";
    std::size_t rank = 1;
    for (const auto& m : rec.ranked) {
        std::cout << "  " << rank++ << ". " << m.id << (m.implemented_here ? " [implemented]" : "")
                  << " - " << m.rationale << "\n";
        for (const auto& u : m.unmet) std::cout << "       unmet: " << u << "\n";
    }
    if (!rec.has_implemented) {
        std::cout << "note: " << reg::kGapMessage << "\n";
    }
    std::cout << "excluded (" << rec.excluded.size() << "):\n";
    for (const auto& e : rec.excluded) {
        std::cout << "  - " << e.id << ": " << e.reason << "\n";
    }

    if (!o.out_path.empty()) {
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) throw cs::ValidationError("cannot write file '" + o.out_path + "'");
        out << "# " << file_header(std::nullopt) << "\n";
        out << "rank,id,implemented,year,unmet_count,rationale\n";
        rank = 1;
        for (const auto& m : rec.ranked) {
            out << rank++ << ',' << m.id << ',' << (m.implemented_here ? 1 : 0) << ',' << m.year
                << ',' << m.unmet.size() << ",\"" << m.rationale << "\"\n";
        }
        std::cout << "wrote recommendation to " << o.out_path << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce-paper

struct ReproOpts {
    std::size_t n = 200000;
    std::uint64_t seed = 20210601;
    std::string out_dir;
};

struct ReproRow {
    std::string metric;
    std::string reported;   // value published in the source study, as printed there
    double computed = 0.0;
    double lo = 0.0, hi = 0.0;
    std::string citation;
    bool pass() const { return computed >= lo && computed <= hi; }
};

int cmd_reproduce(const ReproOpts& o) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<ReproRow> rows;
    auto add = [&rows](std::string metric, std::string reported, double computed, double lo,
                       double hi, std::string citation) {
        rows.push_back(
            {std::move(metric), std::move(reported), computed, lo, hi, std::move(citation)});
    };

    const auto spec = cs::scm::reference_dgp();
    const auto data = cs::scm::simulate(spec, o.n, o.seed);

    // Setting 1: ACE of A on Y under latent treatment-outcome confounding.
    const auto [naive, naive_se] = cs::diff_in_means(data, "A", "Y");
    add("unadjusted ACE (diff in means)", "2.3", naive, 2.0, 2.4,
        "reported with sensemakr");
    const auto fit_ya = cs::ols(data, "Y", {"A"});
    add("unadjusted ACE (OLS)", "2.1", fit_ya.coefficient("A"), 2.0, 2.4,
        "reported with rho-GNF");

    add("ground truth ACE(A->M), path trace", "-1.5",
        cs::scm::path_trace_effect(spec, "A", "M"), -1.5, -1.5, "structural ground truth");
    add("ground truth ACE(M->Y), path trace", "+2",
        cs::scm::path_trace_effect(spec, "M", "Y"), 2.0, 2.0, "structural ground truth");
    add("ground truth ACE(A->Y), path trace", "0",
        cs::scm::path_trace_effect(spec, "A", "Y"), 0.0, 0.0, "structural ground truth");

    // Copula rho analysis.
    const auto summary = cs::copula::summarize_for_copula(data, "A", "Y");
    const double tau0 = cs::copula::ace_given_rho(summary, 0.0);
    add("copula tau(0) minus naive contrast", "0 (identity)", tau0 - summary.tau_unadj, 0.0, 0.0,
        "reported with rho-GNF");
    const auto rho_null = cs::copula::rho_nullifying(summary);
    add("copula nullifying rho", "+0.47", rho_null ? *rho_null : kInf, 0.38, 0.55,
        "reported with rho-GNF");
    const auto [ace_lo, ace_hi] = cs::copula::ace_bounds(summary, 0.95);
    add("copula ACE lower bound, rho_max 0.95", "bounds cover 0", ace_lo, -kInf, 0.0,
        "reported with rho-GNF");
    add("copula ACE upper bound, rho_max 0.95", "bounds cover 0", ace_hi, 0.0, kInf,
        "reported with rho-GNF");
    // Linearity of the naive-mode curve: largest residual of a least-squares line.
    const auto curve_naive = cs::copula::rho_curve(summary, 0.95, 41, cs::copula::Mode::naive);
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(curve_naive.points.size());
        for (const auto& pt : curve_naive.points) {
            sx += pt.rho;
            sy += pt.ace;
            sxx += pt.rho * pt.rho;
            sxy += pt.rho * pt.ace;
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double icept = (sy - slope * sx) / m;
        double max_resid = 0.0;
        for (const auto& pt : curve_naive.points) {
            max_resid = std::max(max_resid, std::abs(pt.ace - (icept + slope * pt.rho)));
        }
        add("copula naive-mode curve linearity residual", "linear in rho", max_resid, 0.0, 1e-12,
            "reported with rho-GNF");
    }

    // OVB contour grid.
    const auto grid = cs::ovb::contour_grid(fit_ya, "A", 41, 0.8);
    double grid_min = kInf;
    for (double v : grid.estimates) grid_min = std::min(grid_min, v);
    add("OVB grid minimum adjusted estimate", "grid reaches the true ACE 0", grid_min, -kInf, 0.0,
        "reported with sensemakr");
    add("OVB robustness value", "strictly inside (0,1)",
        cs::ovb::robustness_value(fit_ya, "A", 1.0), 1e-9, 1.0 - 1e-9,
        "reported with sensemakr");

    // Setting 2: mediation under latent mediator-outcome confounding, with the
    // observed confounders adjusted.
    const auto med_fit = cs::fit_mediation(data, "A", "M", "Y", {"U_AY", "U_IY"});
    const auto med = cs::mediation::mediation_bounds(med_fit, 0.9, 19);
    add("mediation NDE lower bound", "-0.275", med.nde_min, -0.275 - 0.3, -0.275 + 0.3,
        "reported with medsens");
    add("mediation NDE upper bound", "4.186", med.nde_max, 4.186 - 0.3, 4.186 + 0.3,
        "reported with medsens");
    add("mediation NIE lower bound", "-4.161", med.nie_min, -4.161 - 0.3, -4.161 + 0.3,
        "reported with medsens");
    add("mediation NIE upper bound", "0.300", med.nie_max, 0.300 - 0.3, 0.300 + 0.3,
        "reported with medsens");
    add("true NDE +3 inside mediation bounds", "inside",
        (med.nde_min <= 3.0 && 3.0 <= med.nde_max) ? 1.0 : 0.0, 1.0, 1.0,
        "reported with medsens");
    add("true NIE -3 inside mediation bounds", "inside",
        (med.nie_min <= -3.0 && -3.0 <= med.nie_max) ? 1.0 : 0.0, 1.0, 1.0,
        "reported with medsens");
    const auto nde_truth =
        cs::scm::true_estimand(spec,
                               {cs::scm::EstimandKind::nde, "A", "Y", std::string("M"),
                                std::nullopt},
                               o.n, o.seed);
    add("ground truth NDE, path trace", "+3", nde_truth.value, 3.0, 3.0,
        "structural ground truth");
    const auto nie_truth =
        cs::scm::true_estimand(spec,
                               {cs::scm::EstimandKind::nie, "A", "Y", std::string("M"),
                                std::nullopt},
                               o.n, o.seed);
    add("ground truth NIE, path trace", "-3", nie_truth.value, -3.0, -3.0,
        "structural ground truth");
    double complement = 0.0;
    for (const auto& row : med.rows) {
        complement = std::max(complement, std::abs(row.nde + row.nie - med.total));
    }
    add("mediation NDE+NIE complement residual", "NDE + NIE = total", complement, 0.0, 1e-12,
        "reported with medsens");

    // Setting 3: instrument with an invalid exclusion restriction.
    const double wald = cs::wald_iv(data, "I", "A", "Y");
    // Closed-form magnitude of the Wald limit under the broken exclusion:
    // 1.5 phi(z06) (1/0.4 + 1/0.6) / (Phi(1 - z07) - 0.3).
    const double z06 = cs::normal_quantile(0.6), z07 = cs::normal_quantile(0.7);
    const double wald_limit = 1.5 * cs::normal_pdf(z06) * (1.0 / 0.4 + 1.0 / 0.6) /
                              (cs::normal_cdf(1.0 - z07) - 0.3);
    add("Wald estimate, broken exclusion", "biased (limit 6.31)", wald, wald_limit - 0.2,
        wald_limit + 0.2, "structural ground truth");
    auto spec_fixed = spec;
    for (auto& node : spec_fixed.nodes) {
        if (node.name == "Y") {
            for (auto& par : node.parents) {
                if (par.name == "U_IY") par.coef = 0.0;
            }
        }
    }
    const auto data_fixed = cs::scm::simulate(spec_fixed, o.n, o.seed);
    const double wald_fixed = cs::wald_iv(data_fixed, "I", "A", "Y");
    add("Wald estimate, exclusion restored", "0", wald_fixed, -0.1, 0.1,
        "structural ground truth");
    bool late_refused = false;
    try {
        cs::scm::EstimandQuery late_q;
        late_q.kind = cs::scm::EstimandKind::late;
        late_q.treatment = "A";
        late_q.outcome = "Y";
        late_q.instrument = "I";
        cs::scm::true_estimand(spec, late_q, o.n, o.seed);
    } catch (const cs::ValidationError&) {
        late_refused = true;
    }
    add("LATE ground truth refused under exclusion violation", "no contract",
        late_refused ? 1.0 : 0.0, 1.0, 1.0, "structural ground truth");

    namespace reg = cs::registry;
    reg::WorkflowAnswers late_answers;
    late_answers.estimand = reg::Estimand::late;
    late_answers.position = reg::Position::instrument_outcome;
    const auto late_rec = reg::recommend(late_answers, reg::builtin_registry());
    add("IV workflow finds no implemented method", "tooling gap",
        late_rec.has_implemented ? 0.0 : 1.0, 1.0, 1.0, "review conclusion");

    const auto t1 = clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();

    bool all_pass = true;
    std::printf("%-48s %-22s %14s %10s %10s  %s\n", "metric", "reported", "computed", "lo", "hi",
                "status");
    for (const auto& r : rows) {
        all_pass = all_pass && r.pass();
        std::printf("%-48s %-22s %14.6g %10.4g %10.4g  %s\n", r.metric.c_str(),
                    r.reported.c_str(), r.computed, r.lo, r.hi, r.pass() ? "pass" : "FAIL");
    }
    std::printf("overall: %s  (n=%zu seed=%llu runtime=%.2fs)\n", all_pass ? "pass" : "FAIL", o.n,
                static_cast<unsigned long long>(o.seed), secs);
    if (!late_rec.has_implemented) {
        std::printf("note: %s\n", reg::kGapMessage);
    }

    if (!o.out_dir.empty()) {
        std::ofstream out(o.out_dir + "/report.csv", std::ios::binary);
        if (!out) throw cs::ValidationError("cannot write into '" + o.out_dir + "'");
        out << "# " << file_header(o.seed, true) << "\n";
        out << "metric,reported,computed,lo,hi,pass,citation\n";
        for (const auto& r : rows) {
            out << '"' << r.metric << "\",\"" << r.reported << "\"," << cs::format_double(r.computed)
                << ',' << cs::format_double(r.lo) << ',' << cs::format_double(r.hi) << ','
                << (r.pass() ? 1 : 0) << ",\"" << r.citation << "\"\n";
        }

        const auto curve = cs::copula::rho_curve(summary, 0.95, 41, cs::copula::Mode::exact);
        write_rho_curve(o.out_dir + "/copula_curve.csv", curve, o.seed, true);

        std::vector<double> g_au, g_yu, g_est;
        for (std::size_t ia = 0; ia < grid.r2_au_axis.size(); ++ia) {
            for (std::size_t iy = 0; iy < grid.r2_yu_axis.size(); ++iy) {
                g_au.push_back(grid.r2_au_axis[ia]);
                g_yu.push_back(grid.r2_yu_axis[iy]);
                g_est.push_back(grid.estimate_at(ia, iy));
            }
        }
        cs::DataTable grid_t;
        grid_t.add_column("r2_au", g_au);
        grid_t.add_column("r2_yu", g_yu);
        grid_t.add_column("adjusted_estimate", g_est);
        write_table(o.out_dir + "/ovb_grid.csv", grid_t, o.seed, true);

        std::vector<double> m_rho, m_nde, m_nie;
        for (const auto& row : med.rows) {
            m_rho.push_back(row.rho);
            m_nde.push_back(row.nde);
            m_nie.push_back(row.nie);
        }
        cs::DataTable med_t;
        med_t.add_column("rho", m_rho);
        med_t.add_column("nde", m_nde);
        med_t.add_column("nie", m_nie);
        write_table(o.out_dir + "/mediation_grid.csv", med_t, o.seed, true);
        std::cout << "wrote report.csv, copula_curve.csv, ovb_grid.csv, mediation_grid.csv to "
                  << o.out_dir << "\n";
    }

    if (!all_pass) throw cs::NumericError("reproduction run failed one or more checks");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    for (int i = 0; i < argc; ++i) {
        if (i) g_command_line += ' ';
        g_command_line += argv[i];
    }

    CLI::App app{"confsense: sensitivity analysis for unmeasured confounding"};
    app.set_version_flag("--version", std::string("confsense ") + cs::kVersion);
    app.require_subcommand(1);

    SimulateOpts sim;
    auto* c_sim = app.add_subcommand("simulate", "sample a dataset from an SCM spec");
    c_sim->add_option("--spec", sim.spec_path, "SCM spec file (JSON)")->required();
    c_sim->add_option("--n", sim.n, "rows to sample");
    c_sim->add_option("--seed", sim.seed, "RNG seed");
    c_sim->add_option("--out", sim.out_path, "output CSV")->required();

    TruthOpts truth;
    auto* c_truth = app.add_subcommand("truth", "ground-truth estimand of an SCM");
    c_truth->add_option("--spec", truth.spec_path)->required();
    c_truth->add_option("--estimand", truth.estimand, "ace|nde|nie|total|late");
    c_truth->add_option("--treatment", truth.treatment)->required();
    c_truth->add_option("--outcome", truth.outcome)->required();
    c_truth->add_option("--mediator", truth.mediator);
    c_truth->add_option("--instrument", truth.instrument);
    c_truth->add_option("--n", truth.n, "Monte Carlo draws");
    c_truth->add_option("--seed", truth.seed);
    c_truth->add_flag("--force-mc", truth.force_mc, "skip path tracing");
    c_truth->add_option("--out", truth.out_path);

    EstimateOpts est;
    auto* c_est = app.add_subcommand("estimate", "observational estimators on a CSV dataset");
    c_est->add_option("--data", est.data_path)->required();
    c_est->add_option("--method", est.method, "diff-means|ols|wald|mediation");
    c_est->add_option("--treatment", est.treatment);
    c_est->add_option("--outcome", est.outcome);
    c_est->add_option("--instrument", est.instrument);
    c_est->add_option("--mediator", est.mediator);
    c_est->add_option("--regressors", est.regressors)->delimiter(',');
    c_est->add_option("--covariates", est.covariates)->delimiter(',');
    c_est->add_option("--out", est.out_path);

    auto* c_sens = app.add_subcommand("sens", "sensitivity analyses");
    c_sens->require_subcommand(1);

    EvalueOpts ev;
    auto* c_ev = c_sens->add_subcommand("evalue", "E-value for a risk ratio");
    c_ev->add_option("--rr", ev.rr, "risk ratio");
    c_ev->add_option("--smd", ev.smd, "standardized mean difference (converted to RR)");
    c_ev->add_option("--lo", ev.lo, "lower confidence limit");
    c_ev->add_option("--hi", ev.hi, "upper confidence limit");
    c_ev->add_option("--out", ev.out_path);

    ManskiOpts man;
    auto* c_man = c_sens->add_subcommand("manski", "assumption-free ATE bounds, binary outcome");
    c_man->add_option("--data", man.data_path);
    c_man->add_option("--treatment", man.treatment);
    c_man->add_option("--outcome", man.outcome);
    c_man->add_option("--covariates", man.covariates)->delimiter(',');
    c_man->add_option("--p-treat", man.p_treat);
    c_man->add_option("--p1", man.p1, "P(Y=1 | treated)");
    c_man->add_option("--p0", man.p0, "P(Y=1 | control)");
    c_man->add_option("--out", man.out_path);

    OvbOpts ovb;
    auto* c_ovb = c_sens->add_subcommand("ovb", "omitted-variable-bias contours on partial R2");
    c_ovb->add_option("--data", ovb.data_path)->required();
    c_ovb->add_option("--treatment", ovb.treatment)->required();
    c_ovb->add_option("--outcome", ovb.outcome)->required();
    c_ovb->add_option("--covariates", ovb.covariates)->delimiter(',');
    c_ovb->add_option("--grid", ovb.grid, "points per axis");
    c_ovb->add_option("--r2max", ovb.r2max);
    c_ovb->add_option("--q", ovb.q, "robustness-value reduction fraction");
    c_ovb->add_option("--out", ovb.out_path);

    CopulaOpts cop;
    auto* c_cop = c_sens->add_subcommand("copula", "Gaussian-copula rho curve for the ACE");
    c_cop->add_option("--data", cop.data_path)->required();
    c_cop->add_option("--treatment", cop.treatment)->required();
    c_cop->add_option("--outcome", cop.outcome)->required();
    c_cop->add_option("--mode", cop.mode, "exact|naive");
    c_cop->add_option("--rho-max", cop.rho_max);
    c_cop->add_option("--points", cop.points);
    c_cop->add_option("--out", cop.out_path);

    MediationOpts medo;
    auto* c_med = c_sens->add_subcommand("mediation", "error-correlation bounds for NDE/NIE");
    c_med->add_option("--data", medo.data_path)->required();
    c_med->add_option("--treatment", medo.treatment)->required();
    c_med->add_option("--mediator", medo.mediator)->required();
    c_med->add_option("--outcome", medo.outcome)->required();
    c_med->add_option("--covariates", medo.covariates)->delimiter(',');
    c_med->add_option("--rho-max", medo.rho_max);
    c_med->add_option("--points", medo.points);
    c_med->add_option("--out", medo.out_path);

    BiasTableOpts bt;
    auto* c_bt = c_sens->add_subcommand("bias-table", "discrete confounding-bias decomposition");
    c_bt->add_option("--joint", bt.joint_path, "CSV with columns x,u,a,p,ey")->required();
    c_bt->add_option("--out", bt.out_path);

    WorkflowOpts wf;
    auto* c_wf = app.add_subcommand("workflow", "six-step method recommender");
    c_wf->add_option("--answers", wf.answers_path, "answers file (JSON)");
    c_wf->add_option("--registry", wf.registry_path, "registry file (JSON); default built-in");
    c_wf->add_option("--estimand", wf.estimand);
    c_wf->add_option("--position", wf.position);
    c_wf->add_option("--metrics", wf.metrics)->delimiter(',');
    c_wf->add_flag("--needs-covariate-adjustment", wf.needs_covadj);
    c_wf->add_option("--confounder-value-type", wf.value_type);
    c_wf->add_flag("--distribution-prior", wf.prior);
    c_wf->add_option("--confounder-count", wf.count);
    c_wf->add_flag("--want-assumption-free", wf.assumption_free);
    c_wf->add_option("--functional-class", wf.functional);
    c_wf->add_option("--note", wf.note, "identification note (step 2)");
    c_wf->add_option("--out", wf.out_path);

    ReproOpts rep;
    auto* c_rep = app.add_subcommand("reproduce-paper",
                                     "re-run the published simulation study end to end");
    c_rep->add_option("--n", rep.n);
    c_rep->add_option("--seed", rep.seed);
    c_rep->add_option("--out-dir", rep.out_dir, "directory for report and plot-data CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*c_sim) return cmd_simulate(sim);
        if (*c_truth) return cmd_truth(truth);
        if (*c_est) return cmd_estimate(est);
        if (*c_sens) {
            if (*c_ev) return cmd_sens_evalue(ev);
            if (*c_man) return cmd_sens_manski(man);
            if (*c_ovb) return cmd_sens_ovb(ovb);
            if (*c_cop) return cmd_sens_copula(cop);
            if (*c_med) return cmd_sens_mediation(medo);
            if (*c_bt) return cmd_sens_bias_table(bt);
        }
        if (*c_wf) return cmd_workflow(wf);
        if (*c_rep) return cmd_reproduce(rep);
    } catch (const cs::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cs::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
