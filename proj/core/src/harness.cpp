// harness.cpp — scenario grammar, presets, worker pool and emitters

#include "pmetro/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pmetro/jc_analytic.hpp"

#ifndef PMETRO_VERSION
#define PMETRO_VERSION "0.0.0"
#endif

namespace pmetro::harness {

using nlohmann::json;

const char* version() { return PMETRO_VERSION; }

std::string to_string(Model m) {
    switch (m) {
        case Model::correlated: return "correlated";
        case Model::fresh: return "fresh";
        case Model::repeated_no_control: return "repeated-no-control";
    }
    return "unknown";
}

Model model_from_string(const std::string& s) {
    if (s == "correlated") return Model::correlated;
    if (s == "fresh") return Model::fresh;
    if (s == "repeated-no-control") return Model::repeated_no_control;
    throw DomainError("unknown model '" + s + "'");
}

Format format_from_string(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw DomainError("unknown format '" + s + "'");
}

void Scenario::validate() const {
    if (models.empty()) throw DomainError("scenario: models must be nonempty");
    bath.validate();
    if (dts.empty()) throw DomainError("scenario: dt list must be nonempty");
    for (double dt : dts) {
        if (!(dt > 0.0)) throw DomainError("scenario: dt must be > 0");
    }
    if (rescale && !(ref_dt > 0.0)) throw DomainError("scenario: ref_dt must be > 0");
    if (n_steps.empty()) throw DomainError("scenario: n_steps must be nonempty");
    for (std::size_t i = 0; i < n_steps.size(); ++i) {
        if (n_steps[i] < 1) throw DomainError("scenario: n_steps entries must be >= 1");
        if (i > 0 && n_steps[i] <= n_steps[i - 1]) {
            throw DomainError("scenario: n_steps must be strictly ascending");
        }
    }
    if (d_anc.empty()) throw DomainError("scenario: d_anc must be nonempty");
    for (Index d : d_anc) {
        if (d < 1) throw DomainError("scenario: d_anc entries must be >= 1");
    }
    if (max_time < 0.0) throw DomainError("scenario: max_time must be >= 0");
    if (workers < 1) throw DomainError("scenario: workers must be >= 1");
    iss.validate();
}

namespace {

std::vector<int> range(int from, int to) {
    std::vector<int> v;
    for (int n = from; n <= to; ++n) v.push_back(n);
    return v;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2b", "fig2c", "fig3"}; }

Scenario preset(const std::string& name) {
    Scenario sc;
    sc.name = name;
    sc.models = {Model::correlated, Model::fresh, Model::repeated_no_control};
    sc.bath = {2.457, 2.5, 0.0};
    sc.dts = {0.5};
    sc.n_steps = range(1, 12);
    sc.d_anc = {2};
    if (name == "fig2b") {
        sc.bath.lambda = 100.0;
    } else if (name == "fig2c") {
        sc.d_anc = {1, 2};
    } else if (name == "fig3") {
        sc.models = {Model::correlated, Model::fresh};
        sc.dts = {2.0, 1.0, 0.5, 0.25};
        sc.rescale = true;
        sc.ref_dt = 0.5;
        sc.n_steps = range(1, 16);
        sc.max_time = 4.0;
    } else {
        throw DomainError("unknown preset '" + name + "'");
    }
    return sc;
}

// ---------------------------------------------------------------------------
// Scenario grammar
// ---------------------------------------------------------------------------

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw DomainError(std::string(where) + ": unknown key '" + k + "'");
    }
}

template <class T>
std::vector<T> scalar_or_list(const json& j) {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
}

std::vector<int> parse_steps(const json& j) {
    if (j.is_object()) {
        reject_unknown(j, {"from", "to"}, "n_steps");
        return range(j.value("from", 1), j.at("to").get<int>());
    }
    return scalar_or_list<int>(j);
}

json iss_to_json(const iss::IssConfig& c) {
    return {{"max_sweeps", c.max_sweeps},   {"tol", c.tol},
            {"restarts", c.restarts},       {"seed", c.seed},
            {"tooth_tol", c.tooth_tol},     {"backward_sweeps", c.backward_sweeps},
            {"sld_eps", c.sld_eps},         {"threads", c.threads}};
}

iss::IssConfig iss_from_json(const json& j, iss::IssConfig c) {
    reject_unknown(j, {"max_sweeps", "tol", "restarts", "seed", "tooth_tol", "backward_sweeps",
                       "sld_eps", "threads", "d_anc"},
                   "iss");
    c.max_sweeps = j.value("max_sweeps", c.max_sweeps);
    c.tol = j.value("tol", c.tol);
    c.restarts = j.value("restarts", c.restarts);
    c.seed = j.value("seed", c.seed);
    c.tooth_tol = j.value("tooth_tol", c.tooth_tol);
    c.backward_sweeps = j.value("backward_sweeps", c.backward_sweeps);
    c.sld_eps = j.value("sld_eps", c.sld_eps);
    c.threads = j.value("threads", c.threads);
    c.d_anc = j.value("d_anc", c.d_anc);
    return c;
}

json scenario_json(const Scenario& sc) {
    json models = json::array();
    for (auto m : sc.models) models.push_back(to_string(m));
    return {{"name", sc.name},
            {"models", models},
            {"bath", {{"gamma0", sc.bath.gamma0}, {"lambda", sc.bath.lambda}, {"omega0", sc.bath.omega0}}},
            {"omega", sc.omega},
            {"dt", sc.dts},
            {"rescale", {{"enabled", sc.rescale}, {"ref_dt", sc.ref_dt}}},
            {"n_steps", sc.n_steps},
            {"max_time", sc.max_time},
            {"d_anc", sc.d_anc},
            {"iss", iss_to_json(sc.iss)},
            {"workers", sc.workers}};
}

Scenario scenario_of(const json& j) {
    if (!j.is_object()) throw DomainError("scenario: top level must be an object");
    reject_unknown(j, {"name", "preset", "models", "bath", "omega", "dt", "rescale", "n_steps",
                       "max_time", "d_anc", "iss", "workers"},
                   "scenario");
    Scenario sc = j.contains("preset") ? preset(j.at("preset").get<std::string>()) : Scenario{};
    sc.name = j.value("name", sc.name);
    if (j.contains("models")) {
        sc.models.clear();
        for (const auto& m : scalar_or_list<std::string>(j.at("models"))) {
            sc.models.push_back(model_from_string(m));
        }
    }
    if (j.contains("bath")) {
        const auto& b = j.at("bath");
        reject_unknown(b, {"gamma0", "lambda", "omega0"}, "bath");
        sc.bath.gamma0 = b.value("gamma0", sc.bath.gamma0);
        sc.bath.lambda = b.value("lambda", sc.bath.lambda);
        sc.bath.omega0 = b.value("omega0", sc.bath.omega0);
    }
    sc.omega = j.value("omega", sc.omega);
    if (j.contains("dt")) sc.dts = scalar_or_list<double>(j.at("dt"));
    if (j.contains("rescale")) {
        const auto& r = j.at("rescale");
        if (r.is_boolean()) {
            sc.rescale = r.get<bool>();
        } else {
            reject_unknown(r, {"enabled", "ref_dt"}, "rescale");
            sc.rescale = r.value("enabled", true);
            sc.ref_dt = r.value("ref_dt", sc.ref_dt);
        }
    }
    if (j.contains("n_steps")) sc.n_steps = parse_steps(j.at("n_steps"));
    sc.max_time = j.value("max_time", sc.max_time);
    if (j.contains("d_anc")) sc.d_anc = scalar_or_list<Index>(j.at("d_anc"));
    if (j.contains("iss")) sc.iss = iss_from_json(j.at("iss"), sc.iss);
    sc.workers = j.value("workers", sc.workers);
    sc.validate();
    return sc;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("scenario: ") + e.what());
    }
    try {
        return scenario_of(j);
    } catch (const json::exception& e) {
        throw DomainError(std::string("scenario: ") + e.what());
    }
}

std::string scenario_to_json(const Scenario& sc) { return scenario_json(sc).dump(2); }

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

bool RunRecord::all_ok() const {
    for (const auto& r : rows) {
        if (!r.error.empty()) return false;
    }
    return true;
}

double coupling_for(const Scenario& sc, double dt) {
    if (!sc.rescale || dt == sc.ref_dt) return sc.bath.gamma0;
    return jc::rescale_gamma0(sc.ref_dt, dt, sc.bath.lambda, sc.bath.gamma0);
}

namespace {

struct Task {
    Model model;
    Index d_anc;
    double dt;
    std::vector<int> ns;  // one entry except for repeated-no-control
};

struct Channels {
    double gamma0;
    comb::ChannelComb correlated;
    comb::ChannelComb fresh;
};

Row failed_row(const Task& t, double g0, int n, const std::string& msg) {
    Row r{t.model, t.d_anc, t.dt, g0, n, {}, msg};
    r.result.value = std::numeric_limits<double>::quiet_NaN();
    return r;
}

std::vector<Row> run_task(const Task& t, const Channels& ch, const iss::IssConfig& base) {
    iss::IssConfig cfg = base;
    cfg.d_anc = t.d_anc;
    std::vector<Row> rows;
    if (t.model == Model::repeated_no_control) {
        try {
            const auto single = iss::iss_run(ch.fresh.with_steps(1), cfg);
            for (int n : t.ns) {
                rows.push_back({t.model, t.d_anc, t.dt, ch.gamma0, n, iss::repeated_from(single, n), {}});
            }
        } catch (const std::exception& e) {
            for (int n : t.ns) rows.push_back(failed_row(t, ch.gamma0, n, e.what()));
        }
        return rows;
    }
    const auto& cc = t.model == Model::correlated ? ch.correlated : ch.fresh;
    for (int n : t.ns) {
        try {
            rows.push_back({t.model, t.d_anc, t.dt, ch.gamma0, n, iss::iss_run(cc.with_steps(n), cfg), {}});
        } catch (const std::exception& e) {
            rows.push_back(failed_row(t, ch.gamma0, n, e.what()));
        }
    }
    return rows;
}

}  // namespace

RunRecord run_scenario(const Scenario& sc) {
    sc.validate();
    const auto start = std::chrono::steady_clock::now();

    std::map<double, Channels> channels;
    for (double dt : sc.dts) {
        embedding::SpectralDensity bath = sc.bath;
        bath.gamma0 = coupling_for(sc, dt);
        const auto lv = embedding::build_liouvillian(embedding::PseudomodeModel::lorentzian(bath, sc.omega));
        channels.emplace(dt, Channels{bath.gamma0, comb::ChannelComb::correlated(lv, dt, 1),
                                      comb::ChannelComb::fresh(lv, dt, 1)});
    }

    std::vector<Task> tasks;
    for (Model m : sc.models)
        for (Index da : sc.d_anc)
            for (double dt : sc.dts) {
                std::vector<int> ns;
                for (int n : sc.n_steps) {
                    if (sc.max_time > 0.0 && n * dt > sc.max_time * (1.0 + 1e-12)) continue;
                    ns.push_back(n);
                }
                if (ns.empty()) continue;
                if (m == Model::repeated_no_control) {
                    tasks.push_back({m, da, dt, ns});
                } else {
                    for (int n : ns) tasks.push_back({m, da, dt, {n}});
                }
            }

    std::vector<std::vector<Row>> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            results[i] = run_task(tasks[i], channels.at(tasks[i].dt), sc.iss);
        }
    };
    const auto nthreads = static_cast<std::size_t>(std::max(1, sc.workers));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(nthreads, tasks.size()); ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    RunRecord rr;
    rr.scenario = sc;
    for (auto& rs : results)
        for (auto& r : rs) rr.rows.push_back(std::move(r));
    rr.version = version();
    rr.seed = sc.iss.seed;
    if (sc.rescale) rr.gamma_c = jc::gamma_c(sc.ref_dt, sc.bath.gamma0, sc.bath.lambda);
    rr.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rr;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json double_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_double(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json matrix_json(const CMat& m) {
    json re = json::array();
    json im = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json rr = json::array();
        json ri = json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ri.push_back(m(r, c).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return {{"re", re}, {"im", im}};
}

CMat matrix_of(const json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const auto rows = static_cast<Index>(re.size());
    const Index cols = rows == 0 ? 0 : static_cast<Index>(re.at(0).size());
    CMat m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) {
            const auto ur = static_cast<std::size_t>(r);
            const auto uc = static_cast<std::size_t>(c);
            m(r, c) = cplx(re.at(ur).at(uc).get<double>(), im.at(ur).at(uc).get<double>());
        }
    return m;
}

json result_json(const iss::QfiResult& q) {
    json teeth = json::array();
    for (const auto& t : q.strategy.teeth) {
        teeth.push_back({{"sys_in", t.sys_in},
                         {"anc_in", t.anc_in},
                         {"sys_out", t.sys_out},
                         {"anc_out", t.anc_out},
                         {"choi", matrix_json(t.choi)}});
    }
    json hist = json::array();
    for (double h : q.sweep_history) hist.push_back(double_or_null(h));
    json rest = json::array();
    for (double v : q.restart_values) rest.push_back(double_or_null(v));
    return {{"value", double_or_null(q.value)}, {"converged", q.converged},
            {"sweep_history", hist},            {"restart_values", rest},
            {"best_restart", q.best_restart},   {"strategy", teeth}};
}

iss::QfiResult result_of(const json& j) {
    iss::QfiResult q;
    q.value = get_double(j.at("value"));
    q.converged = j.at("converged").get<bool>();
    for (const auto& h : j.at("sweep_history")) q.sweep_history.push_back(get_double(h));
    for (const auto& v : j.at("restart_values")) q.restart_values.push_back(get_double(v));
    q.best_restart = j.at("best_restart").get<int>();
    for (const auto& t : j.at("strategy")) {
        q.strategy.teeth.push_back({matrix_of(t.at("choi")), t.at("sys_in").get<Index>(),
                                    t.at("anc_in").get<Index>(), t.at("sys_out").get<Index>(),
                                    t.at("anc_out").get<Index>(), comb::ToothRole::control});
    }
    return q;
}

}  // namespace

std::string to_csv(const RunRecord& rr) {
    std::ostringstream os;
    os << "# pmetro " << (rr.version.empty() ? version() : rr.version)
       << "; scenario=" << rr.scenario.name << "; units: omega_tilde=1, t and qfi dimensionless\n";
    os << "model,N,t,qfi,converged,sweeps,seed,dt,d_anc,gamma0\n";
    for (const auto& r : rr.rows) {
        os << to_string(r.model) << ',' << r.n << ',' << num(r.time()) << ',' << num(r.result.value)
           << ',' << (r.result.converged ? 1 : 0) << ',' << r.result.sweeps() << ',' << rr.seed << ','
           << num(r.dt) << ',' << r.d_anc << ',' << num(r.gamma0) << '\n';
    }
    return os.str();
}

std::string to_json(const RunRecord& rr) {
    json rows = json::array();
    for (const auto& r : rr.rows) {
        rows.push_back({{"model", to_string(r.model)},
                        {"d_anc", r.d_anc},
                        {"dt", r.dt},
                        {"gamma0", r.gamma0},
                        {"N", r.n},
                        {"t", r.time()},
                        {"error", r.error},
                        {"result", result_json(r.result)}});
    }
    json j = {{"version", rr.version},
              {"seed", rr.seed},
              {"wall_seconds", rr.wall_seconds},
              {"units", "omega_tilde=1; t, rates and qfi dimensionless"},
              {"gamma_c", rr.gamma_c ? json(*rr.gamma_c) : json(nullptr)},
              {"scenario", scenario_json(rr.scenario)},
              {"rows", rows}};
    return j.dump(2) + "\n";
}

RunRecord record_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RunRecord rr;
        rr.version = j.at("version").get<std::string>();
        rr.seed = j.at("seed").get<std::uint64_t>();
        rr.wall_seconds = j.at("wall_seconds").get<double>();
        if (!j.at("gamma_c").is_null()) rr.gamma_c = j.at("gamma_c").get<double>();
        rr.scenario = scenario_of(j.at("scenario"));
        for (const auto& r : j.at("rows")) {
            rr.rows.push_back({model_from_string(r.at("model").get<std::string>()),
                               r.at("d_anc").get<Index>(), r.at("dt").get<double>(),
                               r.at("gamma0").get<double>(), r.at("N").get<int>(),
                               result_of(r.at("result")), r.at("error").get<std::string>()});
        }
        return rr;
    } catch (const json::exception& e) {
        throw DomainError(std::string("run record: ") + e.what());
    }
}

void emit(const RunRecord& rr, Format fmt, const std::string& path) {
    const std::string text = fmt == Format::csv ? to_csv(rr) : to_json(rr);
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Dynamics
// ---------------------------------------------------------------------------

std::vector<DynamicsSample> simulate_dynamics(const embedding::SpectralDensity& bath, double omega,
                                              const CMat& rho0, double t_max, int points) {
    if (points < 2) throw DomainError("simulate_dynamics: need at least 2 points");
    if (!(t_max > 0.0)) throw DomainError("simulate_dynamics: t_max must be > 0");
    const auto lv = embedding::build_liouvillian(embedding::PseudomodeModel::lorentzian(bath, omega));
    const jc::JcParams p{bath.gamma0, bath.lambda, bath.omega0, omega};
    std::vector<DynamicsSample> out;
    for (int i = 0; i < points; ++i) {
        const double t = t_max * i / (points - 1);
        double rate = std::numeric_limits<double>::quiet_NaN();
        if (omega == bath.omega0) {
            try {
                rate = jc::gamma_t(p, t);
            } catch (const PoleError&) {
            }
        }
        out.push_back({t, embedding::reduced_state(lv, rho0, t), jc::analytic_state(p, rho0, t), rate});
    }
    return out;
}

std::string dynamics_to_csv(const std::vector<DynamicsSample>& samples) {
    std::ostringstream os;
    os << "# pmetro " << version() << "; units: omega_tilde=1; basis index 0 = excited\n";
    os << "t,p_exc_numeric,p_exc_analytic,coh_re_numeric,coh_im_numeric,coh_re_analytic,"
          "coh_im_analytic,trace_distance,gamma_t\n";
    for (const auto& s : samples) {
        os << num(s.t) << ',' << num(s.numeric(0, 0).real()) << ',' << num(s.analytic(0, 0).real())
           << ',' << num(s.numeric(0, 1).real()) << ',' << num(s.numeric(0, 1).imag()) << ','
           << num(s.analytic(0, 1).real()) << ',' << num(s.analytic(0, 1).imag()) << ','
           << num(trace_distance(s.numeric, s.analytic)) << ',' << num(s.rate) << '\n';
    }
    return os.str();
}

}  // namespace pmetro::harness
