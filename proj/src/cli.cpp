#include "ppp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ppp/bounds.hpp"
#include "ppp/coupling.hpp"
#include "ppp/distributions.hpp"
#include "ppp/estimators.hpp"
#include "ppp/io.hpp"
#include "ppp/models.hpp"

namespace ppp::cli {

namespace {

// Flat objects print as a header line plus one row; nested values are skipped.
void emit(const Json& j, const std::string& format, std::ostream& out) {
    if (format == "json") {
        out << j.dump(2) << '\n';
        return;
    }
    std::string head;
    std::string row;
    for (const auto& [key, value] : j.items()) {
        if (value.is_structured()) continue;
        if (!head.empty()) {
            head += ',';
            row += ',';
        }
        head += key;
        if (value.is_number_float()) {
            row += format_double(value.get<double>());
        } else if (value.is_string()) {
            row += value.get<std::string>();
        } else if (!value.is_null()) {
            row += value.dump();
        }
    }
    out << head << '\n' << row << '\n';
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
};

void emit_table(const Table& t, const std::string& format, std::ostream& out) {
    if (format == "json") {
        Json j = {{"columns", t.columns}, {"rows", Json::array()}};
        for (const auto& r : t.rows) j["rows"].push_back(r);
        out << j.dump(2) << '\n';
        return;
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << ',';
            if (r[i].is_number_float()) {
                out << format_double(r[i].get<double>());
            } else if (!r[i].is_null()) {
                out << r[i].dump();
            }
        }
        out << '\n';
    }
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// ------------------------------------------------------------ commands

struct Common {
    std::string format = "json";
};

Json cmd_calibrate(double p) {
    return {{"p", p}, {"conservative_p", conservative_single(p)}};
}

Json cmd_fisher(const std::string& path) {
    const auto values = read_values_csv(path);
    if (values.empty()) throw std::domain_error("'" + path + "' holds no p-values");
    return to_json(fisher_bounds(fisher_score(values)));
}

Json cmd_minp(double x, std::size_t m) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("minimum p-value must lie in [0, 1]");
    if (m == 0) throw std::domain_error("m must be >= 1");
    const double q = minp_nominal(x, m);
    Json j = {{"min", x},
              {"m", m},
              {"conservative_p", minp_bound(x, m)},
              {"nominal_q", q}};
    if (q < 1.0) {
        const auto lim = minp_limit_check(q, m);
        j["limit_2q_minus_q2"] = lim.limit;
        j["bound_in_q"] = optional_json(lim.bound_in_q);
        j["bound_in_q_reason"] = lim.bound_in_q ? Json(nullptr) : Json("formula degenerate");
    } else {
        j["limit_2q_minus_q2"] = 1.0;
        j["bound_in_q"] = nullptr;
        j["bound_in_q_reason"] = "nominal q equals 1";
    }
    return j;
}

struct SimulateArgs {
    std::string model;
    double alpha = 0.1;
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    std::size_t m = 0;
    std::string estimator = "p_hat";
    double rho = 0.0;
    std::string out;
    std::string pmfs;
    std::string posterior = "fixed";
    int lasso_k = 1;
    bool literal = false;
};

std::vector<std::vector<double>> worked_port_pmfs() {
    return {{0.7, 0.2, 0.1}, {0.1, 0.2, 0.7}};
}

Json sub_uniform_json(const EmpiricalSample& s) {
    const auto emp = from_samples(s);
    const auto uni = IntegratedDF::uniform();
    const double tol = default_dominance_tolerance(emp, uni);
    const auto dom = dominates_cx(emp, uni, tol);
    return {{"holds", dom.holds},
            {"max_violation", dom.max_violation},
            {"mean_gap", dom.mean_gap},
            {"tolerance", tol}};
}

struct Simulation {
    Json summary;
    std::vector<double> values;
};

Simulation cmd_simulate(const SimulateArgs& a) {
    if (a.n == 0) throw std::domain_error("--n must be >= 1");
    if (a.estimator != "p_hat" && a.estimator != "r_hat") {
        throw std::domain_error("--estimator must be p_hat or r_hat");
    }
    if (!(a.rho >= 0.0 && a.rho < 1.0)) throw std::domain_error("--rho must lie in [0, 1)");
    const RngStream rng(a.seed, 0);

    std::unique_ptr<GenerativeModel> model;
    std::optional<double> worst_case_alpha; // P has law P_{2a} for this a
    if (a.model == "lasso") {
        model = lasso_model(a.alpha, LassoSurvival{a.lasso_k});
        worst_case_alpha = a.alpha;
    } else if (a.model == "simplex") {
        auto s = a.literal ? simplex_model_literal(a.alpha) : simplex_model(a.alpha);
        worst_case_alpha = s->atom();
        model = std::move(s);
    } else if (a.model == "port") {
        if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw std::domain_error("--alpha must lie in (0, 1)");
        PortPosterior post;
        if (a.posterior == "bayes") {
            post.kind = PortPosterior::Kind::Bayes;
        } else if (a.posterior != "fixed") {
            throw std::domain_error("--posterior must be fixed or bayes");
        }
        model = port_model(a.pmfs.empty() ? worked_port_pmfs() : read_pmf_csv(a.pmfs), post);
    } else if (a.model == "ruschendorf") {
        if (a.m > 0) throw std::domain_error("the ruschendorf construction has no estimator");
        worst_case_alpha = a.alpha;
    } else {
        throw std::domain_error("--model must be lasso, simplex, port or ruschendorf");
    }

    Simulation sim;
    if (!model) {
        RngStream r = rng;
        sim.values = ruschendorf_values(a.alpha, r, a.n);
    } else if (a.m == 0) {
        sim.values = frequency_run(*model, a.n, rng).values;
    } else {
        const auto sampler = a.rho > 0.0 ? PosteriorSampler::markov(a.rho) : PosteriorSampler::iid();
        const auto kind = a.estimator == "p_hat" ? EstimatorKind::PHat : EstimatorKind::RHat;
        const auto s = marginal_estimator_run(*model, a.m, sampler, kind, a.n, rng);
        sim.values.assign(s.values().begin(), s.values().end());
    }
    const EmpiricalSample sample(sim.values);
    const auto summary = summarize(sample);

    Json j;
    j["model"] = model ? model->id() : "ruschendorf(alpha=" + format_double(a.alpha) + ")";
    j["seed"] = a.seed;
    j["n"] = a.n;
    j["estimator"] = a.m == 0 ? "exact" : a.estimator;
    j["M"] = a.m;
    j["sampler"] = a.m == 0 ? "none" : (a.rho > 0.0 ? "markov" : "iid");
    j["rho"] = a.rho;
    j["alpha"] = a.alpha;
    j["p_le_alpha"] = tail_probability(sample, a.alpha);
    j["mean"] = summary.mean;
    j["variance"] = summary.variance;
    if (worst_case_alpha && a.m == 0) {
        const auto fit = mixed_fit(sample, p2alpha(*worst_case_alpha));
        j["ks_vs_p2alpha"] = {{"alpha", *worst_case_alpha},
                              {"continuous_ks", fit.continuous_ks},
                              {"atom_expected", fit.atoms.at(0).expected},
                              {"atom_observed", fit.atoms.at(0).observed}};
        j["ks_vs_p2alpha_reason"] = nullptr;
    } else {
        j["ks_vs_p2alpha"] = nullptr;
        j["ks_vs_p2alpha_reason"] = a.m == 0 ? "model has no worst-case reference law"
                                             : "reference law applies to the exact p-value only";
    }
    j["sub_uniform"] = sub_uniform_json(sample);
    j["summary"] = to_json(summary);
    if (!a.out.empty()) write_values_csv(a.out, sim.values);
    sim.summary = std::move(j);
    return sim;
}

struct ConstructArgs {
    std::string target;
    std::size_t n = 100000;
    std::uint64_t seed = 0;
    std::string g = "logistic";
    std::string model_out;
};

Simulation cmd_construct(const ConstructArgs& a) {
    if (a.n == 0) throw std::domain_error("--n must be >= 1");
    const SubUniformDist target = dist_from_json(read_json_file(a.target));
    const auto model = synthesize_ppp(target, named_cdf(a.g), RngStream(a.seed, 0));

    RngStream rng(a.seed, 1);
    std::vector<double> p(a.n);
    std::vector<double> s(a.n);
    for (std::size_t i = 0; i < a.n; ++i) {
        const double theta = model.sample_theta(rng);
        const auto d = model.sample_data(theta, rng);
        p[i] = model.exact_ppp(d);
        s[i] = d.value;
    }
    const EmpiricalSample ps(p);
    const EmpiricalSample ss(s);
    const auto fit = mixed_fit(ps, target);
    Json atoms = Json::array();
    for (const auto& af : fit.atoms) {
        atoms.push_back({{"location", af.location}, {"expected", af.expected}, {"observed", af.observed}});
    }
    const auto& r = model.report();
    Json j;
    j["target"] = to_json(target);
    j["method"] = r.method;
    j["seed"] = a.seed;
    j["n"] = a.n;
    j["ks"] = ks_statistic(ps, [&](double x) { return target.cdf(x); });
    j["continuous_ks"] = fit.continuous_ks;
    j["atoms"] = atoms;
    j["s_marginal_ks"] = ks_statistic(ss, [](double x) { return std::clamp(x, 0.0, 1.0); });
    j["discretization_ks"] = r.discretization_ks;
    j["martingale_residual"] = r.martingale_residual;
    j["model"] = to_json(model);
    if (!a.model_out.empty()) {
        std::ofstream f(a.model_out);
        if (!f) throw IoError("cannot write '" + a.model_out + "'");
        f << j["model"].dump(2) << '\n';
    }
    return {std::move(j), std::move(p)};
}

Table curves_idf(double alpha) {
    const auto u = IntegratedDF::uniform();
    const auto b = IntegratedDF::analytic(AnalyticFamily::Beta22);
    const auto p = idf_of(p2alpha(alpha));
    Table t{{"x", "uniform", "beta22", "p2alpha"}, {}};
    constexpr int kGrid = 512;
    for (int i = 0; i < kGrid; ++i) {
        const double x = static_cast<double>(i) / (kGrid - 1);
        t.rows.push_back({x, u.evaluate(x), b.evaluate(x), p.evaluate(x)});
    }
    return t;
}

Table curves_fisher(std::size_t m, std::size_t points) {
    if (m == 0) throw std::domain_error("--m must be >= 1");
    if (points < 2) throw std::domain_error("--points must be >= 2");
    Table t{{"alpha", "score", "nominal", "shifted_chi2", "cantelli", "mgf"}, {}};
    const double lo = std::log10(1e-5);
    const double hi = std::log10(0.1);
    for (std::size_t i = 0; i < points; ++i) {
        const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double alpha = i + 1 == points ? 0.1 : std::pow(10.0, e);
        const double x = fisher_critical(alpha, m);
        const auto r = fisher_bounds(x, m);
        t.rows.push_back({alpha, x, r.nominal_p, r.bound_shifted_chi2,
                          optional_json(r.bound_cantelli.value), optional_json(r.bound_mgf.value)});
    }
    return t;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Posterior predictive p-value calibration toolkit", "ppp"};
    app.require_subcommand(1);
    std::string format = "json";
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    };

    double p = 0.0;
    auto* calibrate = app.add_subcommand("calibrate", "Conservative version of one p-value: min(1, 2p)");
    calibrate->add_option("--p", p, "p-value")->required();
    add_format(calibrate);

    std::string pvals;
    auto* fisher = app.add_subcommand("fisher", "Fisher combination with conservative bounds");
    fisher->add_option("--pvals", pvals, "File with one p-value per line")->required();
    add_format(fisher);

    double min_x = 0.0;
    std::size_t min_m = 0;
    auto* minp = app.add_subcommand("minp", "Conservative tail of the minimum of m p-values");
    auto* minp_file = minp->add_option("--pvals", pvals, "File with one p-value per line");
    auto* minp_min = minp->add_option("--min", min_x, "Smallest p-value");
    auto* minp_count = minp->add_option("--m", min_m, "Number of p-values");
    minp_file->excludes(minp_min)->excludes(minp_count);
    minp_min->needs(minp_count);
    minp_count->needs(minp_min);
    add_format(minp);

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Frequency run of a built-in model");
    simulate->add_option("--model", sa.model, "lasso | simplex | port | ruschendorf")->required();
    simulate->add_option("--alpha", sa.alpha, "Model level");
    simulate->add_option("--n", sa.n, "Replicates");
    simulate->add_option("--seed", sa.seed, "Random seed");
    simulate->add_option("--M", sa.m, "Posterior draws per estimate (0: exact p-value)");
    simulate->add_option("--estimator", sa.estimator, "p_hat | r_hat");
    simulate->add_option("--rho", sa.rho, "Lag-1 autocorrelation of the posterior chain (0: iid)");
    simulate->add_option("--out", sa.out, "Write the p-values here, one per line");
    simulate->add_option("--pmfs", sa.pmfs, "Port model pmfs, one row per application");
    simulate->add_option("--posterior", sa.posterior, "Port model posterior: fixed | bayes");
    simulate->add_option("--lasso-k", sa.lasso_k, "Lasso survival exponent k in (1 - t)^k");
    simulate->add_flag("--literal", sa.literal, "Simplex model with overlap half-width alpha");
    add_format(simulate);

    ConstructArgs ca;
    auto* construct = app.add_subcommand("construct", "Synthesize a model with a prescribed p-value law");
    construct->add_option("--target", ca.target, "Target law as JSON")->required();
    construct->add_option("--n", ca.n, "Replicates for the check");
    construct->add_option("--seed", ca.seed, "Random seed");
    construct->add_option("--g", ca.g, "Parameter CDF (logistic)");
    construct->add_option("--model-out", ca.model_out, "Write the serialized model here");
    add_format(construct);

    std::string figure;
    std::size_t curve_m = 20;
    std::size_t curve_points = 101;
    double curve_alpha = 0.1;
    std::string curve_format = "csv";
    auto* curves = app.add_subcommand("curves", "Curve data for the IDF and Fisher-bound figures");
    curves->add_option("--figure", figure, "idf | fisher")->required();
    curves->add_option("--m", curve_m, "Number of combined p-values (fisher)");
    curves->add_option("--points", curve_points, "Points on the alpha grid (fisher)");
    curves->add_option("--alpha", curve_alpha, "Level of the worst-case law (idf)");
    curves->add_option("--format", curve_format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitDomain;
    }

    try {
        if (*calibrate) {
            emit(cmd_calibrate(p), format, out);
        } else if (*fisher) {
            emit(cmd_fisher(pvals), format, out);
        } else if (*minp) {
            if (minp_file->count() > 0) {
                const auto values = read_values_csv(pvals);
                if (values.empty()) throw std::domain_error("'" + pvals + "' holds no p-values");
                for (double v : values) {
                    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("p-values must lie in [0, 1]");
                }
                emit(cmd_minp(*std::min_element(values.begin(), values.end()), values.size()), format, out);
            } else if (minp_min->count() > 0) {
                emit(cmd_minp(min_x, min_m), format, out);
            } else {
                throw std::domain_error("minp needs --pvals, or --min with --m");
            }
        } else if (*simulate) {
            const auto sim = cmd_simulate(sa);
            if (format == "csv") {
                write_values_csv(out, sim.values);
            } else {
                out << sim.summary.dump(2) << '\n';
            }
        } else if (*construct) {
            const auto sim = cmd_construct(ca);
            if (format == "csv") {
                write_values_csv(out, sim.values);
            } else {
                out << sim.summary.dump(2) << '\n';
            }
        } else if (*curves) {
            if (figure == "idf") {
                if (!(curve_alpha > 0.0 && curve_alpha <= 0.5)) {
                    throw std::domain_error("--alpha must lie in (0, 1/2]");
                }
                emit_table(curves_idf(curve_alpha), curve_format, out);
            } else if (figure == "fisher") {
                emit_table(curves_fisher(curve_m, curve_points), curve_format, out);
            } else {
                throw std::domain_error("--figure must be idf or fisher");
            }
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConvexOrderError& e) {
        err << "error: " << e.what() << '\n'
            << "witness: x=" << format_double(e.witness())
            << " violation=" << format_double(e.violation()) << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitOk;
}

} // namespace ppp::cli
