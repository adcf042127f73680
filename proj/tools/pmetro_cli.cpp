// pmetro_cli.cpp — command-line front end: simulate, optimize, rescale, validate

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "pmetro/comb.hpp"
#include "pmetro/harness.hpp"
#include "pmetro/jc_analytic.hpp"

namespace {

using namespace pmetro;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
}

CMat initial_state(const std::string& name) {
    if (name == "excited") return ops::basis_op(2, 0, 0);
    if (name == "ground") return ops::basis_op(2, 1, 1);
    if (name == "plus") return CMat::Constant(2, 2, cplx(0.5, 0.0));
    throw DomainError("unknown initial state '" + name + "' (excited|ground|plus)");
}

struct ValidateLine {
    std::string what;
    bool pass;
    double value;
};

int run_validate(const harness::Scenario& sc, double tol) {
    std::vector<ValidateLine> lines;
    for (double dt : sc.dts) {
        embedding::SpectralDensity bath = sc.bath;
        bath.gamma0 = harness::coupling_for(sc, dt);
        const auto lv = embedding::build_liouvillian(embedding::PseudomodeModel::lorentzian(bath, sc.omega));
        const auto corr = embedding::channel_from_liouvillian(lv, dt);
        const auto fresh = embedding::fresh_channel(lv, dt);
        for (const auto& [name, ch] : {std::pair{"correlated", corr}, std::pair{"fresh", fresh}}) {
            const auto rep = check_channel(ch);
            const double worst = std::max({-rep.min_eigenvalue, rep.tp_defect, rep.dtp_defect,
                                           rep.dchoi_hermitian_defect});
            lines.push_back({std::string(name) + " channel dt=" + std::to_string(dt), rep.ok(tol), worst});
        }
    }
    std::mt19937_64 rng(sc.iss.seed);
    for (Index d : sc.d_anc) {
        for (int n : sc.n_steps) {
            const auto s = comb::random_strategy(n, 2, d, rng);
            const auto rep = comb::validate_comb(s, tol);
            lines.push_back({"random strategy N=" + std::to_string(n) + " d_anc=" + std::to_string(d),
                             rep.ok(), std::max(rep.max_psd_violation(), rep.max_tp_violation())});
        }
    }
    bool all = true;
    for (const auto& l : lines) {
        std::printf("%s  %-40s  worst=%.3e\n", l.pass ? "PASS" : "FAIL", l.what.c_str(), l.value);
        all = all && l.pass;
    }
    return all ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pmetro: non-Markovian quantum metrology with adaptive control strategies"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "reduced dynamics and decay-rate scan");
    embedding::SpectralDensity sim_bath{2.457, 2.5, 0.0};
    double sim_omega = 0.0;
    double t_max = 5.0;
    int points = 51;
    std::string init = "excited";
    std::string sim_out;
    sim->add_option("--gamma0", sim_bath.gamma0, "coupling strength")->capture_default_str();
    sim->add_option("--lambda", sim_bath.lambda, "spectral width")->capture_default_str();
    sim->add_option("--omega0", sim_bath.omega0, "bath centre frequency")->capture_default_str();
    sim->add_option("--omega", sim_omega, "system frequency")->capture_default_str();
    sim->add_option("--tmax", t_max, "final time")->capture_default_str();
    sim->add_option("--points", points, "number of time points")->capture_default_str();
    sim->add_option("--init", init, "initial state: excited|ground|plus")->capture_default_str();
    sim->add_option("--out", sim_out, "output file (default stdout)");

    // optimize
    auto* opt = app.add_subcommand("optimize", "ISS optimization over a scenario");
    std::string scenario_file;
    std::string preset_name;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "csv";
    std::vector<Index> danc;
    int restarts = 0;
    int workers = 0;
    auto add_scenario_opts = [&](CLI::App* sub) {
        auto* f = sub->add_option("--scenario", scenario_file, "scenario file (JSON)");
        auto* p = sub->add_option("--preset", preset_name, "named preset")
                      ->check(CLI::IsMember(harness::preset_names()));
        f->excludes(p);
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--danc", danc, "ancilla dimensions");
        sub->add_option("--restarts", restarts, "ISS restarts per point");
    };
    add_scenario_opts(opt);
    opt->add_option("--out", out_path, "output file (default stdout)");
    opt->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    opt->add_option("--workers", workers, "worker threads");

    // rescale
    auto* rs = app.add_subcommand("rescale", "fixed-noise coupling rescaling and constant-rate reference");
    double t_from = 0.5;
    double t_to = 0.25;
    double rs_lambda = 2.5;
    double rs_gamma0 = 2.457;
    rs->add_option("--from", t_from, "reference step length")->capture_default_str();
    rs->add_option("--to", t_to, "new step length")->capture_default_str();
    rs->add_option("--lambda", rs_lambda, "spectral width")->capture_default_str();
    rs->add_option("--gamma0", rs_gamma0, "coupling at the reference step")->capture_default_str();

    // validate
    auto* val = app.add_subcommand("validate", "channel and comb invariant checks");
    double val_tol = 1e-9;
    add_scenario_opts(val);
    val->add_option("--tol", val_tol, "tolerance")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    auto load = [&]() {
        harness::Scenario sc = !scenario_file.empty() ? harness::load_scenario(scenario_file)
                               : !preset_name.empty() ? harness::preset(preset_name)
                                                      : harness::Scenario{};
        if (seed != 0) sc.iss.seed = seed;
        if (!danc.empty()) sc.d_anc = danc;
        if (restarts > 0) sc.iss.restarts = restarts;
        if (workers > 0) sc.workers = workers;
        sc.validate();
        return sc;
    };

    try {
        if (*sim) {
            const auto samples = harness::simulate_dynamics(sim_bath, sim_omega, initial_state(init), t_max, points);
            write_text(harness::dynamics_to_csv(samples), sim_out);
            return 0;
        }
        if (*opt) {
            const auto sc = load();
            const auto rr = harness::run_scenario(sc);
            harness::emit(rr, harness::format_from_string(format), out_path);
            if (!rr.all_ok()) {
                for (const auto& r : rr.rows) {
                    if (!r.error.empty()) std::cerr << "N=" << r.n << ": " << r.error << '\n';
                }
                return kExitSolver;
            }
            return 0;
        }
        if (*rs) {
            const double g = jc::rescale_gamma0(t_from, t_to, rs_lambda, rs_gamma0);
            const double gc = jc::gamma_c(t_from, rs_gamma0, rs_lambda);
            std::printf("gamma0_rescaled=%.12g\ngamma_c=%.12g\n", g, gc);
            return 0;
        }
        if (*val) return run_validate(load(), val_tol);
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
