#include "qdx/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qdx/bounds.hpp"
#include "qdx/dynamics.hpp"
#include "qdx/parallel.hpp"
#include "qdx/tracemap.hpp"

namespace qdx {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::vector<std::string> columns)
        : path_(path.string()), columns_(std::move(columns)), out_(path) {
        if (!out_) throw ConfigError("cannot open output file " + path_.string());
        for (std::size_t i = 0; i < columns_.size(); ++i)
            out_ << (i ? "," : "") << columns_[i];
        out_ << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size())
            throw SchemaError("row width mismatch in " + path_.string());
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
        ++rows_;
    }
    std::int64_t rows() const { return rows_; }

private:
    fs::path path_;
    std::vector<std::string> columns_;
    std::ofstream out_;
    std::int64_t rows_ = 0;
};

struct ManifestEntry {
    std::string path;
    std::string schema;
    std::int64_t rows;
};

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number())
        throw ConfigError("missing or non-numeric field \"" + field + "\"");
    return j[field].get<double>();
}

std::vector<double> number_list(const json& j, const std::string& field, bool required) {
    if (!j.contains(field)) {
        if (required) throw ConfigError("missing field \"" + field + "\"");
        return {};
    }
    if (!j[field].is_array() || j[field].empty())
        throw ConfigError("field \"" + field + "\" must be a nonempty array");
    std::vector<double> v;
    for (const auto& e : j[field]) {
        if (!e.is_number()) throw ConfigError("field \"" + field + "\" must hold numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

PotentialSpec parse_potential(const json& j) {
    if (!j.contains("potential") || !j["potential"].is_object())
        throw ConfigError("missing object field \"potential\"");
    const json& p = j["potential"];
    std::string kind = p.value("kind", "");
    if (kind == "free") return PotentialSpec::free_potential();
    if (kind == "fibonacci") {
        double lambda = require_number(p, "lambda");
        double theta = p.value("theta", 0.0);
        if (!(lambda > 0.0)) throw ConfigError("potential.lambda must be > 0");
        if (!(theta >= 0.0 && theta < 1.0)) throw ConfigError("potential.theta must lie in [0,1)");
        return PotentialSpec::fibonacci(lambda, theta);
    }
    if (kind == "custom") {
        auto table = number_list(p, "table", true);
        std::int64_t first = p.value("first_site", 0);
        return PotentialSpec::custom(table, first);
    }
    throw ConfigError("potential.kind must be one of free|fibonacci|custom");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    std::string task = j.value("task", "");
    static const std::map<std::string, TaskKind> kTasks = {
        {"evolve", TaskKind::Evolve},       {"tracemap", TaskKind::Tracemap},
        {"bounds", TaskKind::Bounds},       {"dimension", TaskKind::Dimension},
        {"exponents", TaskKind::Exponents}, {"sandwich", TaskKind::Sandwich}};
    auto it = kTasks.find(task);
    if (it == kTasks.end())
        throw ConfigError("task must be one of evolve|tracemap|bounds|dimension|exponents|sandwich");
    c.task = it->second;
    c.potential = parse_potential(j);
    c.output_dir = j.value("output_dir", std::string("out"));
    if (c.output_dir.empty()) throw ConfigError("output_dir must be nonempty");
    c.workers = j.value("workers", 0);

    double lambda = c.potential.lambda;
    switch (c.task) {
        case TaskKind::Evolve: {
            c.time_grid = number_list(j, "time_grid", true);
            for (double t : c.time_grid)
                if (t < 0.0) throw ConfigError("time_grid entries must be >= 0");
            c.evolve_tol = j.value("tol", 1e-8);
            if (!(c.evolve_tol > 0.0 && c.evolve_tol <= 1e-6))
                throw ConfigError("tol must lie in (0, 1e-6]");
            break;
        }
        case TaskKind::Tracemap: {
            c.k = static_cast<int>(require_number(j, "k"));
            c.delta = j.value("delta", 0.0);
            if (c.k < 1) throw ConfigError("k must be >= 1");
            if (c.delta < 0.0) throw ConfigError("delta must be >= 0");
            if (c.potential.kind != PotentialKind::Fibonacci)
                throw ConfigError("tracemap task needs a fibonacci potential");
            if (!(lambda > lambda_zero(c.delta)))
                throw ConfigError("lambda must exceed lambda_0(delta) = " +
                                  std::to_string(lambda_zero(c.delta)));
            break;
        }
        case TaskKind::Dimension: {
            c.k = static_cast<int>(require_number(j, "k"));
            c.delta = j.value("delta", 0.0);
            c.lambdas = number_list(j, "lambdas", true);
            if (c.k < 3) throw ConfigError("k must be >= 3");
            for (double l : c.lambdas)
                if (!(l > lambda_zero(c.delta)))
                    throw ConfigError("every lambdas entry must exceed lambda_0(delta)");
            break;
        }
        case TaskKind::Bounds: {
            c.t_grid = number_list(j, "t_grid", true);
            for (double t : c.t_grid)
                if (!(t > 0.0)) throw ConfigError("t_grid entries must be > 0");
            c.n_exponents = number_list(j, "n_exponents", false);
            if (c.n_exponents.empty()) c.n_exponents = {0.5, 0.7, 0.9};
            for (double a : c.n_exponents)
                if (!(a > 0.0 && a <= 1.2)) throw ConfigError("n_exponents must lie in (0, 1.2]");
            c.quad_tol = j.value("quad_tol", 1e-4);
            if (!(c.quad_tol > 0.0 && c.quad_tol < 1.0))
                throw ConfigError("quad_tol must lie in (0, 1)");
            break;
        }
        case TaskKind::Exponents: {
            c.t_max = j.value("t_max", 1000.0);
            if (!(c.t_max >= 100.0)) throw ConfigError("t_max must be >= 100 (two decades)");
            c.p_list = number_list(j, "p_list", false);
            if (c.p_list.empty()) c.p_list = {1.0, 2.0};
            for (double p : c.p_list)
                if (!(p > 0.0)) throw ConfigError("p_list entries must be > 0");
            c.alpha_grid = number_list(j, "alpha_grid", false);
            for (double a : c.alpha_grid)
                if (a < 0.0 || a > 1.2) throw ConfigError("alpha_grid must lie in [0, 1.2]");
            c.samples_per_decade = j.value("samples_per_decade", 16);
            if (c.samples_per_decade < 4) throw ConfigError("samples_per_decade must be >= 4");
            break;
        }
        case TaskKind::Sandwich: {
            if (c.potential.kind != PotentialKind::Fibonacci)
                throw ConfigError("sandwich task needs a fibonacci potential");
            if (!(lambda >= 8.0)) throw ConfigError("sandwich upper bound needs lambda >= 8");
            c.alpha_grid = number_list(j, "alpha_grid", false);
            for (double a : c.alpha_grid)
                if (a < 0.0 || a > 1.2) throw ConfigError("alpha_grid must lie in [0, 1.2]");
            c.big_t_grid = number_list(j, "T_grid", false);
            for (double t : c.big_t_grid)
                if (!(t > 0.0)) throw ConfigError("T_grid entries must be > 0");
            c.quad_tol = j.value("quad_tol", 1e-3);
            if (!(c.quad_tol > 0.0 && c.quad_tol < 1.0))
                throw ConfigError("quad_tol must lie in (0, 1)");
            break;
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

ordered_json ExperimentConfig::resolved() const {
    ordered_json j;
    static const char* kNames[] = {"evolve", "tracemap", "bounds", "dimension", "exponents",
                                   "sandwich"};
    j["task"] = kNames[static_cast<int>(task)];
    ordered_json p;
    switch (potential.kind) {
        case PotentialKind::Free: p["kind"] = "free"; break;
        case PotentialKind::Fibonacci:
            p["kind"] = "fibonacci";
            p["lambda"] = potential.lambda;
            p["theta"] = potential.theta;
            break;
        case PotentialKind::CustomTable:
            p["kind"] = "custom";
            p["table"] = potential.table;
            p["first_site"] = potential.table_first;
            break;
    }
    j["potential"] = p;
    j["output_dir"] = output_dir;
    j["workers"] = workers;
    switch (task) {
        case TaskKind::Evolve:
            j["time_grid"] = time_grid;
            j["tol"] = evolve_tol;
            break;
        case TaskKind::Tracemap:
            j["k"] = k;
            j["delta"] = delta;
            break;
        case TaskKind::Dimension:
            j["k"] = k;
            j["delta"] = delta;
            j["lambdas"] = lambdas;
            break;
        case TaskKind::Bounds:
            j["t_grid"] = t_grid;
            j["n_exponents"] = n_exponents;
            j["quad_tol"] = quad_tol;
            break;
        case TaskKind::Exponents:
            j["t_max"] = t_max;
            j["p_list"] = p_list;
            j["alpha_grid"] = alpha_grid;
            j["samples_per_decade"] = samples_per_decade;
            break;
        case TaskKind::Sandwich:
            j["alpha_grid"] = alpha_grid;
            j["T_grid"] = big_t_grid;
            j["quad_tol"] = quad_tol;
            break;
    }
    return j;
}

// ---------------------------------------------------------------------------
// task runners
// ---------------------------------------------------------------------------

namespace {

void run_evolve(const ExperimentConfig& c, const fs::path& dir,
                std::vector<ManifestEntry>& entries) {
    std::vector<WavePacket> packets(c.time_grid.size());
    EvolveOptions opt;
    opt.tol = c.evolve_tol;
    parallel_for(c.time_grid.size(), c.workers,
                 [&](std::size_t i) { packets[i] = evolve(c.potential, c.time_grid[i], opt); });
    for (std::size_t i = 0; i < packets.size(); ++i) {
        std::ostringstream name;
        name << "wavepacket_" << i << ".csv";
        CsvWriter w(dir / name.str(), {"n", "re", "im", "prob"});
        const auto& win = packets[i].window;
        for (std::int64_t n = win.left; n <= win.right; ++n) {
            auto a = win.value(n);
            w.row({std::to_string(n), fmt(a.real()), fmt(a.imag()), fmt(std::norm(a))});
        }
        entries.push_back({name.str(), "wavepacket", w.rows()});
    }
    CsvWriter s(dir / "summary.csv", {"t", "norm_defect", "truncation_bound", "window_radius"});
    for (std::size_t i = 0; i < packets.size(); ++i)
        s.row({fmt(c.time_grid[i]), fmt(packets[i].norm_defect), fmt(packets[i].truncation_bound),
               std::to_string(packets[i].window.right)});
    entries.push_back({"summary.csv", "evolve_summary", s.rows()});
}

void run_tracemap(const ExperimentConfig& c, const fs::path& dir,
                  std::vector<ManifestEntry>& entries) {
    BandSet bs = real_bands(c.k, c.delta, c.potential.lambda);
    CsvWriter w(dir / "bands.csv", {"k", "j", "root", "m", "left", "right", "width"});
    for (std::size_t jdx = 0; jdx < bs.bands.size(); ++jdx) {
        const Band& b = bs.bands[jdx];
        w.row({std::to_string(bs.k), std::to_string(jdx + 1), fmt(b.root), std::to_string(b.m),
               fmt(b.left), fmt(b.right), fmt(b.width)});
    }
    entries.push_back({"bands.csv", "bands", w.rows()});

    if (c.k >= 2) {
        auto hist = c_histogram(c.k, c.potential.lambda);
        CsvWriter h(dir / "histogram.csv", {"k", "m", "count"});
        for (const auto& [m, count] : hist)
            h.row({std::to_string(c.k), std::to_string(m), std::to_string(count)});
        entries.push_back({"histogram.csv", "histogram", h.rows()});
    }
}

void run_dimension(const ExperimentConfig& c, const fs::path& dir,
                   std::vector<ManifestEntry>& entries) {
    std::vector<BoxDimension> dims(c.lambdas.size());
    parallel_for(c.lambdas.size(), c.workers,
                 [&](std::size_t i) { dims[i] = box_dimension(c.lambdas[i], c.k, c.delta); });
    CsvWriter w(dir / "dimension.csv",
                {"lambda", "k", "delta", "estimate", "r_squared", "scales", "eps_max", "eps_min"});
    for (std::size_t i = 0; i < dims.size(); ++i)
        w.row({fmt(c.lambdas[i]), std::to_string(c.k), fmt(c.delta), fmt(dims[i].estimate),
               fmt(dims[i].r_squared), std::to_string(dims[i].scales_used), fmt(dims[i].eps_max),
               fmt(dims[i].eps_min)});
    entries.push_back({"dimension.csv", "dimension", w.rows()});
}

void run_bounds(const ExperimentConfig& c, const fs::path& dir,
                std::vector<ManifestEntry>& entries) {
    struct Row {
        double t, alpha;
        std::int64_t n;
        double p_r, rhs, rhs_err;
    };
    std::vector<double> ts = c.t_grid;
    std::sort(ts.begin(), ts.end());
    std::vector<Row> rows;
    for (double t : ts)
        for (double a : c.n_exponents)
            rows.push_back({t, a, std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                                                std::ceil(std::pow(t, a)))),
                            0.0, 0.0, 0.0});

    // one evolution per t serves every N
    std::map<double, std::vector<double>> p_by_t;
    std::vector<double> unique_ts = ts;
    std::vector<std::vector<double>> p_val(unique_ts.size());
    parallel_for(unique_ts.size(), c.workers, [&](std::size_t i) {
        WavePacket w = evolve(c.potential, unique_ts[i]);
        std::vector<double> ps;
        for (double a : c.n_exponents) {
            std::int64_t n = std::max<std::int64_t>(
                1, static_cast<std::int64_t>(std::ceil(std::pow(unique_ts[i], a))));
            ps.push_back(outside_probability(w, n, ProbabilitySide::Right));
        }
        p_val[i] = std::move(ps);
    });
    for (std::size_t i = 0; i < unique_ts.size(); ++i) p_by_t[unique_ts[i]] = p_val[i];

    parallel_for(rows.size(), c.workers, [&](std::size_t i) {
        Row& r = rows[i];
        RhsResult rhs = theorem1_rhs(r.n, r.t, c.potential, Side::Right, c.quad_tol);
        r.rhs = rhs.value;
        r.rhs_err = rhs.quadrature_error;
    });
    for (auto& r : rows) {
        const auto& ps = p_by_t[r.t];
        for (std::size_t a = 0; a < c.n_exponents.size(); ++a)
            if (c.n_exponents[a] == r.alpha) r.p_r = ps[a];
    }

    CsvWriter w(dir / "bounds.csv", {"t", "alpha", "N", "P_r", "theorem1_rhs", "rhs_error"});
    for (const auto& r : rows)
        w.row({fmt(r.t), fmt(r.alpha), std::to_string(r.n), fmt(r.p_r), fmt(r.rhs),
               fmt(r.rhs_err)});
    entries.push_back({"bounds.csv", "bounds_grid", w.rows()});

    std::vector<EnvelopePoint> pts;
    for (const auto& r : rows)
        pts.push_back({static_cast<double>(r.n), r.t, r.p_r, r.rhs});
    EnvelopeFit fit = fit_envelope(pts);
    ordered_json rep;
    rep["C_hat"] = fit.big_c;
    rep["c_hat"] = fit.small_c;
    rep["violations"] = fit.violations;
    rep["max_ratio"] = fit.max_ratio;
    std::ofstream out(dir / "envelope.json");
    out << rep.dump(2) << "\n";
    entries.push_back({"envelope.json", "envelope_fit", 1});
}

void run_exponents(const ExperimentConfig& c, const fs::path& dir,
                   std::vector<ManifestEntry>& entries) {
    // log-spaced checkpoints from 1 to t_max
    std::vector<double> checkpoints;
    double decades = std::log10(c.t_max);
    int total = static_cast<int>(std::ceil(decades * c.samples_per_decade));
    for (int i = 0; i <= total; ++i) checkpoints.push_back(std::pow(10.0, decades * i / total));

    std::vector<double> alphas = c.alpha_grid;
    if (alphas.empty()) alphas = {0.2, 0.4, 0.6, 0.8, 0.9, 0.95, 1.0, 1.1, 1.2};

    Evolver ev(c.potential, c.t_max);
    std::vector<std::string> cols = {"t"};
    for (double p : c.p_list) cols.push_back("moment_p" + fmt(p));
    for (double a : alphas) cols.push_back("P_alpha" + fmt(a));
    cols.push_back("norm_defect");
    CsvWriter w(dir / "series.csv", cols);

    std::vector<std::vector<std::pair<double, double>>> moments(c.p_list.size());
    ProbabilityGrid grid;
    grid.alphas = alphas;
    grid.values.assign(alphas.size(), {});
    for (double t : checkpoints) {
        ev.step_to(t);
        std::vector<std::string> cells = {fmt(t)};
        for (std::size_t pi = 0; pi < c.p_list.size(); ++pi) {
            double m = ev.moment(c.p_list[pi]);
            moments[pi].emplace_back(t, m);
            cells.push_back(fmt(m));
        }
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            std::int64_t n =
                std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(std::pow(t, alphas[ai]))) - 1);
            double p = ev.outside_probability_both(n);
            grid.values[ai].push_back(p);
            cells.push_back(fmt(p));
        }
        grid.times.push_back(t);
        cells.push_back(fmt(std::fabs(ev.norm_squared() - 1.0)));
        w.row(cells);
    }
    entries.push_back({"series.csv", "time_series", w.rows()});

    ordered_json rep;
    for (std::size_t pi = 0; pi < c.p_list.size(); ++pi) {
        TransportExponents te = transport_exponents(moments[pi], c.p_list[pi]);
        ordered_json je;
        je["p"] = te.p;
        je["beta_minus"] = te.beta_minus;
        je["beta_plus"] = te.beta_plus;
        je["window_t_low"] = te.window_t_low;
        je["window_t_high"] = te.window_t_high;
        rep["beta"].push_back(je);
    }
    SpreadingProfile prof = spreading_profile(grid);
    CsvWriter pw(dir / "profile.csv", {"alpha", "s_minus", "s_plus"});
    for (std::size_t ai = 0; ai < alphas.size(); ++ai)
        pw.row({fmt(alphas[ai]), fmt(prof.s_minus[ai]), fmt(prof.s_plus[ai])});
    entries.push_back({"profile.csv", "spreading_profile", pw.rows()});
    rep["alpha_l_minus"] = prof.alpha_l_minus;
    rep["alpha_l_plus"] = prof.alpha_l_plus;
    rep["alpha_u_minus"] = prof.alpha_u_minus;
    rep["alpha_u_plus"] = prof.alpha_u_plus;
    rep["threshold_zero"] = prof.threshold_zero;
    rep["threshold_inf"] = prof.threshold_inf;
    rep["window_t_low"] = prof.window_t_low;
    rep["window_t_high"] = prof.window_t_high;
    std::ofstream out(dir / "exponents.json");
    out << rep.dump(2) << "\n";
    entries.push_back({"exponents.json", "exponents_report", 1});
}

void run_sandwich(const ExperimentConfig& c, const fs::path& dir,
                  std::vector<ManifestEntry>& entries) {
    SandwichConfig sc;
    sc.alpha_grid = c.alpha_grid;
    sc.t_grid = c.big_t_grid;
    sc.quad_tol = c.quad_tol;
    sc.workers = c.workers;
    SandwichReport rep = sandwich_report(c.potential.lambda, sc);

    CsvWriter w(dir / "profile.csv", {"alpha", "s_minus", "s_plus"});
    for (const auto& r : rep.rows) w.row({fmt(r.alpha), fmt(r.s_minus), fmt(r.s_plus)});
    entries.push_back({"profile.csv", "spreading_profile", w.rows()});

    ordered_json j;
    j["lambda"] = rep.constants.lambda;
    j["S_l"] = rep.constants.s_lower;
    j["S_u"] = rep.constants.s_upper;
    j["alpha_lower"] = rep.constants.alpha_lower;
    j["alpha_upper"] = rep.constants.alpha_upper;
    j["s_exponent"] = rep.constants.s_exponent;
    for (const auto& [p, b] : rep.constants.beta_lower_zero_phase) {
        ordered_json e;
        e["p"] = p;
        e["bound"] = b;
        e["non_canonical_constant"] = false;  // theta = 0 closed form, no free C
        j["beta_lower_zero_phase"].push_back(e);
    }
    j["T_grid"] = rep.t_grid;
    j["alpha_u_minus_avg"] = rep.averaged_profile.alpha_u_minus;
    j["alpha_u_plus_avg"] = rep.averaged_profile.alpha_u_plus;
    j["alpha_l_minus_avg"] = rep.averaged_profile.alpha_l_minus;
    j["alpha_l_plus_avg"] = rep.averaged_profile.alpha_l_plus;
    j["slack_lower"] = rep.slack_lower;
    j["slack_upper"] = rep.slack_upper;
    j["lower_ok"] = rep.lower_ok;
    j["upper_ok"] = rep.upper_ok;
    j["two_log_phi"] = kTwoLogPhi;
    for (const auto& [l, prod] : rep.product_sweep) {
        ordered_json e;
        e["lambda"] = l;
        e["alpha_upper_times_log_lambda"] = prod;
        j["product_sweep"].push_back(e);
    }
    std::ofstream out(dir / "sandwich.json");
    out << j.dump(2) << "\n";
    entries.push_back({"sandwich.json", "sandwich_report", 1});
}

}  // namespace

std::vector<std::string> run(const ExperimentConfig& config) {
    fs::path dir(config.output_dir);
    fs::create_directories(dir);
    std::vector<ManifestEntry> entries;
    switch (config.task) {
        case TaskKind::Evolve: run_evolve(config, dir, entries); break;
        case TaskKind::Tracemap: run_tracemap(config, dir, entries); break;
        case TaskKind::Dimension: run_dimension(config, dir, entries); break;
        case TaskKind::Bounds: run_bounds(config, dir, entries); break;
        case TaskKind::Exponents: run_exponents(config, dir, entries); break;
        case TaskKind::Sandwich: run_sandwich(config, dir, entries); break;
    }

    ordered_json manifest;
    manifest["schema_version"] = "qdx-1";
    manifest["created"] = iso_now();
    manifest["config"] = config.resolved();
    for (const auto& e : entries) {
        ordered_json f;
        f["path"] = e.path;
        f["schema"] = e.schema;
        f["rows"] = e.rows;
        manifest["files"].push_back(f);
    }
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";

    std::vector<std::string> written;
    for (const auto& e : entries) written.push_back((dir / e.path).string());
    written.push_back((dir / "manifest.json").string());
    return written;
}

// ---------------------------------------------------------------------------
// plot data
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot read " + path.string());
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            *header = cells;
            first = false;
        } else {
            rows.push_back(cells);
        }
    }
    return rows;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const fs::path& path) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw SchemaError("column \"" + name + "\" missing from " + path.string());
    return static_cast<std::size_t>(it - header.begin());
}

std::string write_xy(const fs::path& path, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<std::pair<double, double>>& pts) {
    std::ofstream out(path);
    out << "# " << xlabel << " " << ylabel << "\n";
    for (const auto& [x, y] : pts) out << fmt(x) << " " << fmt(y) << "\n";
    return path.string();
}

}  // namespace

std::vector<std::string> emit_plotdata(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw SchemaError("cannot read manifest " + manifest_path);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!manifest.contains("files"))
        throw SchemaError("manifest lacks a \"files\" list");
    fs::path dir = fs::path(manifest_path).parent_path();
    std::vector<std::string> written;

    for (const auto& f : manifest["files"]) {
        std::string schema = f.value("schema", "");
        fs::path path = dir / f.value("path", "");
        std::vector<std::string> header;
        if (schema == "bands") {
            auto rows = read_csv(path, &header);
            std::size_t mi = column_index(header, "m", path);
            std::size_t wi = column_index(header, "width", path);
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : rows)
                pts.emplace_back(std::stod(r[mi]), std::log(std::stod(r[wi])));
            written.push_back(
                write_xy(dir / "plot_m_logwidth.dat", "m", "log_width", pts));
        } else if (schema == "spreading_profile") {
            auto rows = read_csv(path, &header);
            std::size_t ai = column_index(header, "alpha", path);
            std::size_t smi = column_index(header, "s_minus", path);
            std::size_t spi = column_index(header, "s_plus", path);
            std::vector<std::pair<double, double>> pm, pp;
            for (const auto& r : rows) {
                pm.emplace_back(std::stod(r[ai]), std::stod(r[smi]));
                pp.emplace_back(std::stod(r[ai]), std::stod(r[spi]));
            }
            written.push_back(write_xy(dir / "plot_alpha_sminus.dat", "alpha", "S_minus", pm));
            written.push_back(write_xy(dir / "plot_alpha_splus.dat", "alpha", "S_plus", pp));
        } else if (schema == "time_series") {
            auto rows = read_csv(path, &header);
            std::size_t ti = column_index(header, "t", path);
            // first probability column, if any
            std::size_t pi = header.size();
            for (std::size_t i = 0; i < header.size(); ++i)
                if (header[i].rfind("P_alpha", 0) == 0) {
                    pi = i;
                    break;
                }
            std::vector<std::pair<double, double>> pts;
            if (pi < header.size())
                for (const auto& r : rows) {
                    double t = std::stod(r[ti]);
                    double p = std::stod(r[pi]);
                    if (t > 0.0) pts.emplace_back(std::log(t), std::log(std::max(p, 1e-320)));
                }
            written.push_back(write_xy(dir / "plot_logt_logP.dat", "log_t", "log_P", pts));
        } else if (schema == "dimension") {
            auto rows = read_csv(path, &header);
            std::size_t li = column_index(header, "lambda", path);
            std::size_t ei = column_index(header, "estimate", path);
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : rows) {
                double l = std::stod(r[li]);
                pts.emplace_back(std::log(l), std::stod(r[ei]) * std::log(l));
            }
            written.push_back(
                write_xy(dir / "plot_loglambda_dimlog.dat", "log_lambda", "dim_times_log_lambda", pts));
        }
    }
    return written;
}

}  // namespace qdx
