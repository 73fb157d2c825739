// mixbound command-line front end.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mixbound/chaining.hpp"
#include "mixbound/coupling.hpp"
#include "mixbound/grid.hpp"
#include "mixbound/io.hpp"
#include "mixbound/norms.hpp"
#include "mixbound/processes.hpp"
#include "mixbound/profile.hpp"
#include "mixbound/quantile.hpp"
#include "mixbound/rates.hpp"
#include "mixbound/report.hpp"
#include "mixbound/verify.hpp"

using namespace mixbound;

namespace {

const std::vector<std::string> kSubcommands{"schedule", "rates", "norms", "gamma", "simulate", "couple", "strongapprox", "verify"};

struct Common {
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string format;
    std::string output;
    std::string config;

    std::uint64_t resolved_seed() const {
        if (seed) return *seed;
        if (const char* env = std::getenv("MIXBOUND_SEED"); env && *env) {
            try {
                std::size_t used = 0;
                const auto v = std::stoull(env, &used);
                if (used == std::string(env).size()) return v;
            } catch (const std::exception&) {
            }
            throw std::invalid_argument(std::string("MIXBOUND_SEED: not an unsigned integer: '") + env + "'");
        }
        return default_seed;
    }
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
    c.format = default_format;
    sub->add_option("--config", c.config, "JSON config file; keys mirror the flags, flags win");
    sub->add_option("--seed", c.seed, "master seed (default: $MIXBOUND_SEED or " + std::to_string(default_seed) + ")");
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", c.output, "output path (default: stdout)");
}

void emit(const Common& c, const std::string& text) {
    if (c.output.empty() || c.output == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write output '" + c.output + "'");
    out << text;
}

void emit_json(const Common& c, const Json& j) { emit(c, to_stable_json(j) + "\n"); }

void require_lattice(std::int64_t n, const std::string& field) {
    if (!is_lattice_member(n))
        throw std::invalid_argument(field + "=" + std::to_string(n) + " is not a lattice member; nearest lattice member is " +
                                    std::to_string(nearest_lattice_member(n)));
}

std::int64_t require_divisor(std::int64_t n, std::int64_t q) {
    if (q < 1 || n % q != 0)
        throw std::invalid_argument("q=" + std::to_string(q) + " does not divide n=" + std::to_string(n) +
                                    "; nearest divisor is " + std::to_string(nearest_divisor(n, static_cast<double>(q))));
    return q;
}

Json estimate_json(const MixingEstimate& e) {
    return {{"estimate", e.value}, {"std_error", e.std_error}, {"method", e.method}, {"normalizer", e.normalizer}};
}

// ---- config ingestion: config keys become flags placed before the user's own
// flags, and every option takes its last value, so flags override the file.

std::string config_scalar(const Json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
        return format_number(d);
    }
    throw std::invalid_argument("config field '" + key + "': expected a string or number");
}

std::vector<std::string> expand_argv(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
    Json cfg;
    try {
        cfg = Json::parse(in);
    } catch (const std::exception& e) {
        throw std::invalid_argument("config '" + config_path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw std::invalid_argument("config '" + config_path + "' must hold a JSON object");

    std::size_t sub_at = args.size();
    for (std::size_t i = 0; i < args.size(); ++i)
        if (std::find(kSubcommands.begin(), kSubcommands.end(), args[i]) != kSubcommands.end()) {
            sub_at = i;
            break;
        }
    std::string sub;
    if (sub_at < args.size()) {
        sub = args[sub_at];
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(sub_at));
    } else if (cfg.contains("subcommand")) {
        sub = cfg.at("subcommand").get<std::string>();
    } else {
        throw std::invalid_argument("no subcommand on the command line or in config field 'subcommand'");
    }
    if (cfg.contains("subcommand") && cfg.at("subcommand").get<std::string>() != sub)
        throw std::invalid_argument("config field 'subcommand' is '" + cfg.at("subcommand").get<std::string>() +
                                    "' but the command line asks for '" + sub + "'");

    std::vector<std::string> out{sub};
    for (const auto& [key, v] : cfg.items()) {
        if (key == "subcommand" || key == "config") continue;
        const std::string flag = "--" + key;
        if (v.is_boolean()) {
            if (v.get<bool>()) out.push_back(flag);
        } else if (v.is_array()) {
            std::string joined;
            for (const auto& e : v) joined += (joined.empty() ? "" : ",") + config_scalar(e, key);
            out.push_back(flag);
            out.push_back(joined);
        } else {
            out.push_back(flag);
            out.push_back(config_scalar(v, key));
        }
    }
    out.insert(out.end(), args.begin(), args.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixbound: block schedules, dependence-adapted norms, chaining complexity and coupling experiments"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // schedule
    Common c_sched;
    std::int64_t s_n = 0;
    std::string s_profile;
    auto* sched = app.add_subcommand("schedule", "block schedule q_{n,k} for lattice n");
    sched->add_option("--n", s_n, "sample size (lattice member)")->required();
    sched->add_option("--profile", s_profile, "mixing profile: iid | mdep:m= | poly:m= | expo:l= | table:<csv>")->required();
    add_common(sched, c_sched, "json");

    // rates
    Common c_rates;
    std::string r_profile;
    double r_r = 4.0;
    std::int64_t r_nmin = 1000, r_nmax = 10000000;
    auto* rates = app.add_subcommand("rates", "rate factor frak_n over lattice n in a range");
    rates->add_option("--profile", r_profile, "mixing profile")->required();
    rates->add_option("--r", r_r, "moment order r > 2");
    rates->add_option("--n-min", r_nmin, "smallest n");
    rates->add_option("--n-max", r_nmax, "largest n");
    add_common(rates, c_rates, "csv");

    // norms
    Common c_norms;
    std::string nm_profile, nm_curve;
    std::int64_t nm_q = 1;
    double nm_r = 4.0;
    auto* norms = app.add_subcommand("norms", "mu_q breakpoints, ||f||_q and B_r(q)");
    norms->add_option("--profile", nm_profile, "mixing profile")->required();
    norms->add_option("--q", nm_q, "block length")->check(CLI::NonNegativeNumber);
    norms->add_option("--r", nm_r, "moment order for B_r");
    norms->add_option("--curve", nm_curve, "CSV of samples of f(X), or halfnormal:s=<scale>")->required();
    add_common(norms, c_norms, "json");

    // gamma
    Common c_gamma;
    std::string g_file, g_norms = "constant:l2", g_method = "auto";
    auto* gam = app.add_subcommand("gamma", "chaining complexity of a finite class");
    gam->add_option("--class-file", g_file, "class file (.json or CSV)")->required();
    gam->add_option("--norms", g_norms, "constant:l2 | constant:linf | constant:lr:r= | schedule:n=..,profile=..");
    gam->add_option("--method", g_method, "exact, greedy or auto")->check(CLI::IsMember({"auto", "exact", "greedy"}));
    add_common(gam, c_gamma, "json");

    // simulate
    Common c_sim;
    std::string sm_process, sm_class = "lipschitz5";
    std::int64_t sm_n = 1536;
    int sm_reps = 200;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo of sup |G_n f - G_n g| over a class");
    sim->add_option("--process", sm_process, "iid | ma:m= | ar1:rho= | renewal:m=")->required();
    sim->add_option("--class", sm_class, "identity | pm_identity | lipschitz4 | lipschitz5 | constant | fn:<f>,...");
    sim->add_option("--n", sm_n, "sample size")->check(CLI::PositiveNumber);
    sim->add_option("--reps", sm_reps, "replications")->check(CLI::Range(30, 100000000));
    add_common(sim, c_sim, "csv");

    // couple
    Common c_couple;
    std::string cp_process, cp_class = "lipschitz5";
    std::int64_t cp_n = 1536, cp_q = 32;
    int cp_reps = 200, cp_outer = 400, cp_inner = 400;
    bool cp_no_tau = false;
    auto* couple = app.add_subcommand("couple", "replica coupling gap against sqrt(n) tau(q)");
    couple->add_option("--process", cp_process, "process spec")->required();
    couple->add_option("--class", cp_class, "class spec");
    couple->add_option("--n", cp_n, "sample size (lattice member)");
    couple->add_option("--q", cp_q, "block length (divides n)");
    couple->add_option("--reps", cp_reps, "replications")->check(CLI::Range(2, 100000000));
    couple->add_option("--tau-outer", cp_outer, "outer draws of the tau estimator")->check(CLI::PositiveNumber);
    couple->add_option("--tau-inner", cp_inner, "inner draws of the tau estimator")->check(CLI::Range(2, 100000000));
    couple->add_flag("--no-tau", cp_no_tau, "skip the tau estimate");
    add_common(couple, c_couple, "json");

    // strongapprox
    Common c_sa;
    std::string sa_process, sa_class = "lipschitz4", sa_gamma = "inf";
    std::string sa_grid_text = "384,1536,6144";
    std::int64_t sa_q = 0;
    int sa_reps = 300, sa_calib = 200000;
    auto* sa = app.add_subcommand("strongapprox", "Gaussian block coupling against the assembled bound");
    sa->add_option("--process", sa_process, "process spec")->required();
    sa->add_option("--class", sa_class, "class spec");
    sa->add_option("--n-grid", sa_grid_text, "comma-separated lattice n");
    sa->add_option("--q", sa_q, "block length for every n (default: divisor nearest sqrt(n))");
    sa->add_option("--gamma", sa_gamma, "moment order gamma > 2 or inf");
    sa->add_option("--reps", sa_reps, "replications per n")->check(CLI::Range(2, 100000000));
    sa->add_option("--calibration-blocks", sa_calib, "blocks for the marginal calibration")->check(CLI::PositiveNumber);
    add_common(sa, c_sa, "json");

    // verify
    Common c_ver;
    std::string v_suite = "all";
    auto* ver = app.add_subcommand("verify", "run acceptance checks; nonzero exit on any failure");
    ver->add_option("--suite", v_suite, "grid | norms | rates | chaining | coupling | all");
    add_common(ver, c_ver, "json");

    std::vector<std::string> args;
    try {
        args = expand_argv(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sched) {
            const auto& c = c_sched;
            require_lattice(s_n, "n");
            const auto prof = parse_profile(s_profile);
            const auto s = block_schedule(s_n, prof);
            if (c.format == "csv") {
                CsvTable t({"k", "q"});
                for (std::size_t k = 0; k < s.q_seq.size(); ++k) t.add_row({csv_cell(static_cast<std::int64_t>(k)), csv_cell(s.q_seq[k])});
                emit(c, t.str());
            } else {
                emit_json(c, {{"n", s.n}, {"profile", prof.to_string()}, {"divisors", s.divisors}, {"q_seq", s.q_seq}});
            }
        } else if (*rates) {
            const auto& c = c_rates;
            if (r_nmin > r_nmax) throw std::invalid_argument("n-min exceeds n-max");
            const auto prof = parse_profile(r_profile);
            std::vector<RateReport> rows;
            for (auto n : lattice_members(default_basis_size, r_nmax))
                if (n >= r_nmin) rows.push_back(rate_report(n, r_r, prof));
            if (rows.empty())
                throw std::invalid_argument("no lattice member in [n-min, n-max]; nearest lattice member is " +
                                            std::to_string(nearest_lattice_member(r_nmin)));
            if (c.format == "csv") {
                CsvTable t({"n", "q_n0", "frak_n", "effective_n", "regime", "lower_env", "upper_env"});
                for (const auto& w : rows)
                    t.add_row({csv_cell(w.n), csv_cell(w.q_n0), csv_cell(w.frak_n), csv_cell(w.effective_n), to_string(w.regime),
                               csv_cell(w.lower_env), csv_cell(w.upper_env)});
                emit(c, t.str());
            } else {
                Json arr = Json::array();
                for (const auto& w : rows)
                    arr.push_back({{"n", w.n}, {"q_n0", w.q_n0}, {"b_r_q_n0", w.b_r_q_n0}, {"frak_n", w.frak_n},
                                   {"effective_n", w.effective_n}, {"regime", to_string(w.regime)}, {"lower_env", w.lower_env},
                                   {"upper_env", w.upper_env}, {"strong_rate", w.strong_rate}});
                emit_json(c, {{"profile", prof.to_string()}, {"r", r_r}, {"rows", arr}});
            }
        } else if (*norms) {
            const auto& c = c_norms;
            const auto prof = parse_profile(nm_profile);
            Json j{{"profile", prof.to_string()}, {"q", nm_q}, {"r", nm_r}, {"mu_breakpoints", mu_breakpoints(nm_q, prof)},
                   {"b_r", b_r(nm_q, nm_r, prof)}};
            if (nm_curve.rfind("halfnormal:", 0) == 0) {
                const HalfNormalCurve curve(detail::parse_named_value(std::string_view(nm_curve).substr(11), "s"));
                j["q_norm"] = q_norm(curve, nm_q, prof);
                j["l2_norm"] = curve.l2_norm();
            } else {
                const auto sample = detail::read_csv_values(nm_curve);
                if (sample.empty()) throw std::invalid_argument("curve: no samples in '" + nm_curve + "'");
                const auto curve = QuantileCurve::from_sample(sample);
                j["q_norm"] = q_norm(curve, nm_q, prof);
                j["l2_norm"] = curve.l2_norm();
                j["samples"] = sample.size();
            }
            emit_json(c, j);
        } else if (*gam) {
            const auto& c = c_gamma;
            const auto cls = load_class_file(g_file);
            const auto fam = parse_norm_family(g_norms, cls.weights());
            const bool exact = g_method == "exact" || (g_method == "auto" && cls.size() <= gamma_exact_max_size);
            const auto res = exact ? gamma_exact(cls, fam) : gamma_greedy(cls, fam);
            emit_json(c, {{"gamma", res.value}, {"method", exact ? "exact" : "greedy"}, {"norms", fam.label()},
                          {"class_size", cls.size()}, {"witness_partitions", res.witness.levels}});
        } else if (*sim) {
            const auto& c = c_sim;
            const auto seed = c.resolved_seed();
            const auto model = parse_process(sm_process);
            const auto cls = builtin_class(sm_class);
            const auto means = class_means(model, cls);
            struct Row { double sup_pair, sup_abs; };
            const auto rows = parallel_map<Row>(static_cast<std::size_t>(sm_reps), c.workers, [&](std::size_t i) {
                const auto g = empirical_process(simulate(model, sm_n, derive_seed(seed, i)).values, cls, means);
                double a = 0.0;
                for (double v : g) a = std::max(a, std::abs(v));
                return Row{sup_pair(g), a};
            });
            std::vector<double> sp, sa_;
            for (const auto& r : rows) {
                sp.push_back(r.sup_pair);
                sa_.push_back(r.sup_abs);
            }
            const auto e = jackknife_mean(sp), ea = jackknife_mean(sa_);
            Json summary{{"process", model.id()}, {"class", cls.name}, {"n", sm_n}, {"reps", sm_reps}, {"seed", seed},
                         {"mean_sup_value", e.estimate}, {"std_error", e.std_error},
                         {"mean_sup_abs", ea.estimate}, {"sup_abs_std_error", ea.std_error}};
            if (c.format == "csv") {
                CsvTable t({"rep", "sup_value", "sup_abs"});
                for (std::size_t i = 0; i < rows.size(); ++i)
                    t.add_row({csv_cell(static_cast<std::int64_t>(i)), csv_cell(rows[i].sup_pair), csv_cell(rows[i].sup_abs)});
                emit(c, t.str());
                std::cerr << to_stable_json(summary) << "\n";
            } else {
                summary["sup_values"] = sp;
                emit_json(c, summary);
            }
        } else if (*couple) {
            const auto& c = c_couple;
            const auto seed = c.resolved_seed();
            require_lattice(cp_n, "n");
            require_divisor(cp_n, cp_q);
            const auto model = parse_process(cp_process);
            const auto cls = builtin_class(cp_class);
            const bool with_tau = !cp_no_tau && model.markov();
            const auto r = coupling_experiment(model, cls, cp_n, cp_q, cp_reps, seed, c.workers, with_tau,
                                               TauSettings{cp_outer, cp_inner});
            Json j{{"process", model.id()}, {"class", cls.name}, {"n", cp_n}, {"q", cp_q}, {"reps", cp_reps}, {"seed", seed},
                   {"mean_gap", r.mean_gap}, {"std_error", r.std_error}, {"median_gap", r.median_gap}, {"max_gap", r.max_gap}};
            if (with_tau) {
                j["tau"] = estimate_json(r.tau);
                j["root_n_tau"] = r.root_n_tau;
                j["gap_over_root_n_tau"] = r.ratio;
            } else {
                j["tau"] = nullptr;
            }
            emit_json(c, j);
        } else if (*sa) {
            const auto& c = c_sa;
            const auto seed = c.resolved_seed();
            const auto model = parse_process(sa_process);
            const auto cls = builtin_class(sa_class);
            StrongApproxSettings st;
            st.reps = sa_reps;
            st.calibration_blocks = sa_calib;
            st.gamma_order = sa_gamma == "inf" ? std::numeric_limits<double>::infinity() : std::stod(sa_gamma);
            if (!(st.gamma_order > 2.0)) throw std::invalid_argument("gamma must exceed 2");
            std::vector<StrongApproxPoint> pts;
            Json arr = Json::array();
            std::vector<std::int64_t> grid;
            {
                std::istringstream is(sa_grid_text);
                std::string tok;
                while (std::getline(is, tok, ',')) {
                    std::size_t used = 0;
                    std::int64_t v = 0;
                    try {
                        v = std::stoll(tok, &used);
                    } catch (const std::exception&) {
                        used = 0;
                    }
                    if (used == 0 || used != tok.size()) throw std::invalid_argument("n-grid: bad entry '" + tok + "'");
                    grid.push_back(v);
                }
            }
            if (grid.empty()) throw std::invalid_argument("n-grid: empty");
            for (auto n : grid) {
                require_lattice(n, "n-grid entry");
                const auto q = sa_q > 0 ? require_divisor(n, sa_q) : nearest_divisor(n, std::sqrt(static_cast<double>(n)));
                pts.push_back(strong_approx_experiment(model, cls, n, q, seed, st, c.workers));
                const auto& p = pts.back();
                arr.push_back({{"n", n}, {"q", q}, {"mean_gap", p.mean_gap}, {"std_error", p.std_error},
                               {"moment_term", p.moment_term}, {"tau_term", p.tau_term}, {"tau", estimate_json(p.tau)},
                               {"rhs_constant_one", p.rhs}, {"implied_constant", p.implied_constant}, {"sigma2", p.sigma2},
                               {"z_variance", p.z_variance}, {"z_block_variance", p.z_block_variance}});
            }
            emit_json(c, {{"process", model.id()}, {"class", cls.name}, {"gamma", st.gamma_order}, {"reps", sa_reps},
                          {"seed", seed}, {"points", arr}, {"non_increasing_95", non_increasing_95(pts)}});
        } else if (*ver) {
            const auto& c = c_ver;
            VerifyOptions o;
            o.seed = c.resolved_seed();
            o.workers = c.workers;
            o.log = &std::cerr;
            const auto rep = verify_suite(v_suite, o);
            if (c.format == "csv") {
                CsvTable t({"id", "suite", "status", "title"});
                for (const auto& r : rep.results)
                    t.add_row({csv_cell(r.id), r.suite, r.pass ? "pass" : "fail", r.title});
                emit(c, t.str());
            } else {
                emit_json(c, rep.to_json());
            }
            return rep.pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
