#include "fraclab/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fraclab/comparison.hpp"
#include "fraclab/diagnostics.hpp"
#include "fraclab/energy.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/kernel.hpp"
#include "fraclab/manifold.hpp"
#include "fraclab/minimize.hpp"
#include "fraclab/presets.hpp"
#include "fraclab/snapshot.hpp"

namespace fraclab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    os << text;
    if (!os) throw Error("failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

Grid grid_from(const RunConfig& cfg) {
    GridOptions go;
    go.max_cells = cfg.max_cells;
    return build_grid(cfg.params(), cfg.box, cfg.h, cfg.collar_width, go);
}

ManifoldSpec manifold_from(const RunConfig& cfg) {
    return cfg.manifold_kind == "euclidean" ? ManifoldSpec::euclidean(cfg.N) : ManifoldSpec::sphere(cfg.N);
}

json manifest(const RunConfig& cfg, const std::string& command) {
    const auto prm = cfg.params();
    const ManifoldSpec m = manifold_from(cfg);
    json j;
    j["format_version"] = kFormatVersion;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["config"] = cfg.raw;
    j["config_hash"] = config_hash(cfg.raw);
    j["seed"] = cfg.seed;
    j["regime"] = prm.regime_tag();
    j["hypotheses_hold"] = m.satisfies_hypotheses(prm.p());
    return j;
}

struct ProbeOutput {
    json report;
    std::string csv;
};

std::vector<BallSpec> parse_balls(const json& arr, int n) {
    std::vector<BallSpec> out;
    for (const auto& b : arr) {
        BallSpec ball;
        const auto c = b.at("center").get<std::vector<double>>();
        for (int d = 0; d < n; ++d) ball.center[d] = c.at(d);
        ball.radius = b.at("radius").get<double>();
        out.push_back(ball);
    }
    return out;
}

Point parse_point(const json& j, int n) {
    Point p{0.0, 0.0, 0.0};
    const auto c = j.get<std::vector<double>>();
    for (int d = 0; d < n; ++d) p[d] = c.at(d);
    return p;
}

class ProbeRunner {
public:
    ProbeRunner(const RunConfig& cfg, const FieldMap& field, const KernelTable& kernel)
        : cfg_(cfg), field_(field), kernel_(kernel), manifold_(manifold_from(cfg)) {}

    ProbeOutput run(const ProbeSpec& probe, std::size_t index) {
        const json& s = probe.settings;
        const int n = cfg_.n;
        const auto& prm = kernel_.params();
        ProbeOutput out;
        if (probe.kind == "energy") {
            const auto balls = s.contains("balls") ? parse_balls(s.at("balls"), n) : std::vector<BallSpec>{};
            const EnergyReport r = energy_report(field_, kernel_, balls);
            out.report = to_json(r, kernel_);
            std::ostringstream os;
            os << "x0,x1,x2,radius,localized,normalized,under_resolved\n";
            for (std::size_t k = 0; k < r.localized.size(); ++k) {
                const auto& b = r.localized[k].ball;
                os << format_number(b.center[0]) << ',' << format_number(b.center[1]) << ','
                   << format_number(b.center[2]) << ',' << format_number(b.radius) << ','
                   << format_number(r.localized[k].value) << ',' << format_number(r.normalized[k].value) << ','
                   << (r.localized[k].under_resolved ? 1 : 0) << '\n';
            }
            out.csv = os.str();
        } else if (probe.kind == "caccioppoli") {
            const auto rho = s.at("rho").get<std::vector<double>>();
            const auto r = caccioppoli_sweep(field_, kernel_, rows(), parse_point(s.at("x0"), n), rho);
            out.report = to_json(r);
            out.csv = to_csv(r);
        } else if (probe.kind == "decay") {
            const double R = s.at("R").get<double>();
            const double theta = s.value("theta", 0.25);
            const double eps1 = s.contains("eps1") ? s.at("eps1").get<double>() : default_eps1(field_, kernel_, rows(), R);
            const auto r = decay_probe(field_, kernel_, rows(), parse_point(s.at("x0"), n), R, theta, eps1);
            out.report = to_json(r);
            out.report["eps1_source"] = s.contains("eps1") ? "config" : "default";
            out.csv = to_csv(r);
        } else if (probe.kind == "blowup") {
            const BallSpec ball{parse_point(s.at("center"), n), s.at("radius").get<double>()};
            const auto r = blowup_normalize(field_, kernel_, ball);
            out.report = to_json(r);
            out.csv = "eps,energy,mean_norm\n" + format_number(r.eps) + "," + format_number(r.energy) + "," +
                      format_number(r.mean_norm) + "\n";
        } else if (probe.kind == "singular") {
            const auto scales = s.at("scales").get<std::vector<double>>();
            const double rmax = *std::max_element(scales.begin(), scales.end());
            const double eps1 =
                s.contains("eps1") ? s.at("eps1").get<double>() : default_eps1(field_, kernel_, rows(), rmax);
            const auto r = singular_detect(field_, kernel_, rows(), eps1, scales);
            out.report = to_json(r, field_.grid());
            out.report["eps1_source"] = s.contains("eps1") ? "config" : "default";
            out.csv = to_csv(r, field_.grid());
        } else if (probe.kind == "holder") {
            std::vector<Point> centers;
            for (const auto& c : s.at("centers")) centers.push_back(parse_point(c, n));
            HolderOptions ho;
            ho.residual_threshold = s.value("residual_threshold", ho.residual_threshold);
            const auto r = holder_fit(field_, centers, s.value("p", prm.p()), s.at("radii").get<std::vector<double>>(), ho);
            out.report = to_json(r);
            out.csv = to_csv(r);
        } else if (probe.kind == "gehring") {
            const auto balls = parse_balls(s.at("balls"), n);
            const auto pbar = s.value("pbar", std::vector<double>{});
            const auto r = gehring_probe(field_, kernel_, rows(), balls, s.at("q").get<double>(), pbar,
                                         s.value("kappa", 2.0));
            out.report = to_json(r, s.value("include_gamma", false));
            out.csv = to_csv(r);
        } else if (probe.kind == "holefill") {
            const auto radii = s.at("radii").get<std::vector<double>>();
            const Point x0 = parse_point(s.at("x0"), n);
            std::vector<double> values;
            for (double r : radii) values.push_back(localized_energy_report(field_, kernel_, rows(), {x0, r}).value);
            HolefillOptions ho;
            ho.alpha = s.value("alpha", prm.sp());
            ho.beta = s.value("beta", prm.p());
            ho.residual_tol = s.value("residual_tol", ho.residual_tol);
            const auto r = holefill_convergence_check(radii, values, ho);
            out.report = to_json(r);
            out.report["radii"] = radii;
            out.report["values"] = values;
            out.csv = to_csv(r);
        } else if (probe.kind == "comparison") {
            const double R = s.at("radius").get<double>();
            const Point c = parse_point(s.at("center"), n);
            ComparisonOptions co;
            co.inner_radius = s.value("inner_radius", 0.0);
            co.shift_samples = s.value("shift_samples", co.shift_samples);
            co.shift_radius = s.value("shift_radius", co.shift_radius);
            co.retry_cap = s.value("retry_cap", co.retry_cap);
            Rng rng(cfg_.seed + 0x9e3779b97f4a7c15ULL * (index + 1));
            const auto r = comparison_map(field_, kernel_, manifold_, {c, R}, {c, s.value("mean_radius", R)}, co, rng);
            out.report = to_json(r);
            out.csv = "energy_w,energy_v,c_meas\n" + format_number(r.energy_w) + "," + format_number(r.energy_v) +
                      "," + format_number(r.c_meas) + "\n";
        } else if (probe.kind == "minimality") {
            const auto r = minimality_spot_check(field_, kernel_, manifold_, s.value("trials", 100),
                                                 s.value("amplitude", 1e-2), s.value("tolerance", 1e-8), cfg_.seed);
            out.report = to_json(r);
            out.csv = "trials,energy,max_decrease,passed\n" + std::to_string(r.trials) + "," + format_number(r.energy) +
                      "," + format_number(r.max_decrease) + "," + (r.passed ? "1" : "0") + "\n";
        } else if (probe.kind == "tangential") {
            const auto r = tangential_residual_report(field_, kernel_, manifold_);
            out.report = {{"max", r.max}};
            std::ostringstream os;
            os << "cell,residual\n";
            for (std::size_t i : field_.free_cells()) os << i << ',' << format_number(r.per_cell[i]) << '\n';
            out.csv = os.str();
        } else {
            throw ValidationError("unknown probe '" + probe.kind + "'");
        }
        out.report["probe"] = probe.kind;
        out.report["settings"] = s;
        out.report["regime"] = prm.regime_tag();
        return out;
    }

private:
    const std::vector<double>& rows() {
        if (rows_.empty()) rows_ = row_energies(field_, kernel_);
        return rows_;
    }

    const RunConfig& cfg_;
    const FieldMap& field_;
    const KernelTable& kernel_;
    ManifoldSpec manifold_;
    std::vector<double> rows_;
};

std::string snapshot_mismatch(const RunConfig& cfg, const Grid& grid, const FieldMap& field) {
    std::vector<std::string> issues;
    const Grid& sg = field.grid();
    if (sg.dim() != grid.dim()) issues.push_back("n: snapshot " + std::to_string(sg.dim()) + ", config " + std::to_string(grid.dim()));
    if (field.components() != cfg.N) {
        issues.push_back("N: snapshot " + std::to_string(field.components()) + ", config " + std::to_string(cfg.N));
    }
    if (std::abs(sg.h() - grid.h()) > 1e-12 * grid.h()) {
        issues.push_back("h: snapshot " + format_number(sg.h()) + ", config " + format_number(grid.h()));
    }
    if (sg.extents() != grid.extents()) issues.push_back("lattice extents differ");
    if (sg.collar_layers() != grid.collar_layers()) issues.push_back("collar layers differ");
    if (issues.empty() && !sg.same_lattice(grid)) issues.push_back("box position differs");
    std::string msg;
    for (const auto& s : issues) msg += (msg.empty() ? "" : "; ") + s;
    return msg;
}

int report_error(std::ostream& err, const std::exception& e, int code) {
    err << "error: " << e.what() << "\n";
    return code;
}

template <class F>
int guarded(std::ostream& err, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        return report_error(err, e, exit_invalid);
    } catch (const OutputExists& e) {
        return report_error(err, e, exit_exists);
    } catch (const std::exception& e) {
        return report_error(err, e, exit_failure);
    }
}

RunConfig load_with_overrides(const std::string& path, const CommandOptions& o) {
    RunConfig cfg = load_config(path);
    if (o.seed) {
        cfg.raw["seed"] = *o.seed;
        cfg = parse_config(cfg.raw);
    }
    return cfg;
}

fs::path output_for(const RunConfig& cfg, const CommandOptions& o) {
    if (o.out_dir) return *o.out_dir;
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    throw ValidationError("no output directory: pass --out or set output_dir in the config");
}

}  // namespace

void prepare_output(const fs::path& dir, bool force) {
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) throw OutputExists("output path '" + dir.string() + "' is not a directory");
        if (!fs::is_empty(dir) && !force) {
            throw OutputExists("output directory '" + dir.string() + "' is not empty (use --force to overwrite)");
        }
    } else {
        fs::create_directories(dir);
    }
}

FieldMap run_solve(const RunConfig& cfg, const fs::path& out, bool force) {
    prepare_output(out, force);
    const auto prm = cfg.params();
    const Grid grid = grid_from(cfg);
    const KernelTable kernel(grid, prm, cfg.kernel);
    const ManifoldSpec m = manifold_from(cfg);
    const FieldMap initial = make_preset(grid, m, cfg.boundary);
    const MinimizerResult res = minimize(initial, kernel, m, cfg.minimize);

    write_snapshot((out / "field.bin").string(), res.field);
    json result = to_json(res, cfg.minimize);
    result["energy_report"] = to_json(energy_report(res.field, kernel), kernel);
    result["cells"] = grid.size();
    result["interior_cells"] = grid.interior_count();
    result["regime"] = prm.regime_tag();
    result["hypotheses_hold"] = m.satisfies_hypotheses(prm.p());
    result["snapshot_hash"] = fnv1a_hex(encode_snapshot(res.field));
    write_json(out / "result.json", result);
    std::ostringstream hist;
    hist << "iteration,energy\n";
    for (std::size_t k = 0; k < res.energy_history.size(); ++k) {
        hist << k << ',' << format_number(res.energy_history[k]) << '\n';
    }
    write_text(out / "energy_history.csv", hist.str());
    json man = manifest(cfg, "solve");
    man["artifacts"] = {"field.bin", "result.json", "energy_history.csv"};
    write_json(out / "manifest.json", man);
    return res.field;
}

void run_diagnose(const RunConfig& cfg, const FieldMap& field, const fs::path& out, bool force,
                  const std::string& snapshot_hash) {
    const Grid grid = grid_from(cfg);
    const std::string mismatch = snapshot_mismatch(cfg, grid, field);
    if (!mismatch.empty()) throw ValidationError("snapshot does not match the configured grid: " + mismatch);
    prepare_output(out, force);
    const KernelTable kernel(field.grid(), cfg.params(), cfg.kernel);
    ProbeRunner runner(cfg, field, kernel);
    json man = manifest(cfg, "diagnose");
    man["snapshot_hash"] = snapshot_hash.empty() ? fnv1a_hex(encode_snapshot(field)) : snapshot_hash;
    man["artifacts"] = json::array();
    for (std::size_t k = 0; k < cfg.probes.size(); ++k) {
        const auto& probe = cfg.probes[k];
        char stem[64];
        std::snprintf(stem, sizeof(stem), "%02zu_%s", k, probe.kind.c_str());
        const ProbeOutput po = runner.run(probe, k);
        write_json(out / (std::string(stem) + ".json"), po.report);
        write_text(out / (std::string(stem) + ".csv"), po.csv);
        man["artifacts"].push_back(std::string(stem) + ".json");
        man["artifacts"].push_back(std::string(stem) + ".csv");
    }
    write_json(out / "manifest.json", man);
}

int cmd_solve(const std::string& config_path, const CommandOptions& options, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_with_overrides(config_path, options);
        const fs::path out = output_for(cfg, options);
        run_solve(cfg, out, options.force);
        log << "solve: wrote " << out.string() << "\n";
        return static_cast<int>(exit_ok);
    });
}

int cmd_diagnose(const std::string& config_path, const std::string& snapshot_path, const CommandOptions& options,
                 std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_with_overrides(config_path, options);
        const fs::path out = output_for(cfg, options);
        FieldMap field = [&] {
            try {
                return read_snapshot(snapshot_path);
            } catch (const ValidationError&) {
                throw;
            } catch (const Error& e) {
                throw ValidationError(std::string("cannot read snapshot: ") + e.what());
            }
        }();
        std::ifstream is(snapshot_path, std::ios::binary);
        std::ostringstream bytes;
        bytes << is.rdbuf();
        run_diagnose(cfg, field, out, options.force, fnv1a_hex(bytes.str()));
        log << "diagnose: wrote " << out.string() << "\n";
        return static_cast<int>(exit_ok);
    });
}

int cmd_sweep(const std::string& config_path, const CommandOptions& options, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig base = load_with_overrides(config_path, options);
        const fs::path out = output_for(base, options);
        prepare_output(out, options.force);

        auto axis = [](const std::vector<double>& xs) {
            return xs.empty() ? std::vector<std::optional<double>>{std::nullopt}
                              : std::vector<std::optional<double>>(xs.begin(), xs.end());
        };
        const auto S = axis(base.sweep.s), P = axis(base.sweep.p), H = axis(base.sweep.h),
                   T = axis(base.sweep.theta), E = axis(base.sweep.eps1);
        auto cell = [](const std::optional<double>& x) { return x ? format_number(*x) : std::string(); };

        std::ostringstream table;
        table << "point,s,p,h,theta,eps1,status,energy,converged,iterations,projected_grad_norm,error\n";
        std::size_t point = 0, failures = 0;
        for (const auto& s : S)
            for (const auto& p : P)
                for (const auto& h : H)
                    for (const auto& t : T)
                        for (const auto& e : E) {
                            char name[32];
                            std::snprintf(name, sizeof(name), "point_%04zu", point);
                            const fs::path dir = out / name;
                            json doc = base.raw;
                            doc.erase("sweep");
                            if (s) doc["params"]["s"] = *s;
                            if (p) doc["params"]["p"] = *p;
                            if (h) doc["grid"]["h"] = *h;
                            if (doc.contains("diagnostics") && doc["diagnostics"].is_array()) {
                                for (auto& probe : doc["diagnostics"]) {
                                    const std::string kind = probe.value("probe", "");
                                    if (t && kind == "decay") probe["theta"] = *t;
                                    if (e && (kind == "decay" || kind == "singular")) probe["eps1"] = *e;
                                }
                            }
                            std::string status = "ok", error, energy, converged, iterations, gnorm;
                            try {
                                const RunConfig cfg = parse_config(doc);
                                const FieldMap field = run_solve(cfg, dir / "solve", options.force);
                                run_diagnose(cfg, field, dir / "diagnose", options.force);
                                std::ifstream is(dir / "solve" / "result.json");
                                const json res = json::parse(is);
                                energy = format_number(res.at("energy").get<double>());
                                converged = res.at("converged").get<bool>() ? "1" : "0";
                                iterations = std::to_string(res.at("iterations").get<int>());
                                gnorm = format_number(res.at("projected_grad_norm").get<double>());
                            } catch (const std::exception& ex) {
                                status = "failed";
                                error = ex.what();
                                for (char& c : error) {
                                    if (c == ',' || c == '\n' || c == '"') c = ' ';
                                }
                                ++failures;
                            }
                            table << point << ',' << cell(s) << ',' << cell(p) << ',' << cell(h) << ',' << cell(t)
                                  << ',' << cell(e) << ',' << status << ',' << energy << ',' << converged << ','
                                  << iterations << ',' << gnorm << ',' << error << '\n';
                            log << "sweep: " << name << " " << status << "\n";
                            ++point;
                        }
        write_text(out / "sweep.csv", table.str());
        json man = manifest(base, "sweep");
        man["points"] = point;
        man["failures"] = failures;
        write_json(out / "manifest.json", man);
        log << "sweep: " << point << " points, " << failures << " failed\n";
        return static_cast<int>(failures == 0 ? exit_ok : exit_failure);
    });
}

}  // namespace fraclab
