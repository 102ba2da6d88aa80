#include "fraclab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fraclab/diagnostics.hpp"
#include "fraclab/errors.hpp"

namespace fraclab {

using nlohmann::json;

const std::vector<std::string>& known_probes() {
    static const std::vector<std::string> kinds{"energy",  "caccioppoli", "decay",      "blowup",
                                                "singular", "holder",     "gehring",    "holefill",
                                                "comparison", "minimality", "tangential"};
    return kinds;
}

namespace {

// Typed field access that records problems instead of throwing.
class Section {
public:
    Section(const json& j, std::string path, Violations& v) : j_(j), path_(std::move(path)), v_(v) {
        if (!j_.is_object()) v_.add(path_ + " must be an object");
    }

    bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

    double number(const char* key, std::optional<double> fallback = std::nullopt) const {
        if (!has(key)) {
            if (!fallback) v_.add(where(key) + " is required");
            return fallback.value_or(0.0);
        }
        const json& x = j_.at(key);
        if (!x.is_number()) {
            v_.add(where(key) + " must be a number");
            return fallback.value_or(0.0);
        }
        return x.get<double>();
    }

    long long integer(const char* key, std::optional<long long> fallback = std::nullopt) const {
        if (!has(key)) {
            if (!fallback) v_.add(where(key) + " is required");
            return fallback.value_or(0);
        }
        const json& x = j_.at(key);
        if (!x.is_number_integer()) {
            v_.add(where(key) + " must be an integer");
            return fallback.value_or(0);
        }
        return x.get<long long>();
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_boolean()) {
            v_.add(where(key) + " must be a boolean");
            return fallback;
        }
        return j_.at(key).get<bool>();
    }

    std::string string(const char* key, std::optional<std::string> fallback = std::nullopt) const {
        if (!has(key)) {
            if (!fallback) v_.add(where(key) + " is required");
            return fallback.value_or("");
        }
        if (!j_.at(key).is_string()) {
            v_.add(where(key) + " must be a string");
            return fallback.value_or("");
        }
        return j_.at(key).get<std::string>();
    }

    std::vector<double> numbers(const char* key, bool required = true) const {
        std::vector<double> out;
        if (!has(key)) {
            if (required) v_.add(where(key) + " is required");
            return out;
        }
        const json& x = j_.at(key);
        if (!x.is_array()) {
            v_.add(where(key) + " must be an array of numbers");
            return out;
        }
        for (const auto& e : x) {
            if (!e.is_number()) {
                v_.add(where(key) + " must be an array of numbers");
                return {};
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    /// A point with exactly n coordinates.
    Point point(const char* key, int n, std::optional<Point> fallback = std::nullopt) const {
        if (!has(key) && fallback) return *fallback;
        const auto xs = numbers(key);
        Point p{0.0, 0.0, 0.0};
        if (!has(key)) return p;
        if (static_cast<int>(xs.size()) != n) {
            v_.add(where(key) + " must have " + std::to_string(n) + " coordinates");
            return p;
        }
        for (int d = 0; d < n; ++d) p[d] = xs[d];
        return p;
    }

    const json& raw(const char* key) const { return j_.at(key); }
    std::string where(const char* key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    Violations& v_;
};

void check_probe(const ProbeSpec& probe, const std::string& path, const RunConfig& cfg, Violations& v) {
    const Section s(probe.settings, path, v);
    const int n = cfg.n;
    const double h = cfg.h;
    const std::string& k = probe.kind;
    if (k == "energy") {
        if (s.has("balls")) {
            if (!s.raw("balls").is_array()) v.add(path + ".balls must be an array");
            else {
                for (std::size_t b = 0; b < s.raw("balls").size(); ++b) {
                    const Section bs(s.raw("balls")[b], path + ".balls[" + std::to_string(b) + "]", v);
                    bs.point("center", n);
                    v.check(bs.number("radius") > 0.0, bs.where("radius") + " must be > 0");
                }
            }
        }
    } else if (k == "caccioppoli") {
        const Point x0 = s.point("x0", n);
        const auto rho = s.numbers("rho");
        v.check(!rho.empty() || !s.has("rho"), path + ".rho must be nonempty");
        for (double r : rho) {
            v.check(r > 0.0, path + ".rho entries must be > 0");
            v.check(cfg.box.contains_ball(x0, 6.0 * r),
                    path + ": B_{6 rho}(x0) must lie inside the interior box (rho = " + format_number(r) + ")");
        }
    } else if (k == "decay") {
        s.point("x0", n);
        const double R = s.number("R");
        const double theta = s.number("theta", 0.25);
        v.check(R > 0.0, path + ".R must be > 0");
        v.check(theta > 0.0 && theta < 0.5,
                path + ".theta must lie in (0, 1/2) (decay hypothesis), got " + format_number(theta));
        if (s.has("eps1")) v.check(s.number("eps1") > 0.0, path + ".eps1 must be > 0");
        v.check(theta * R >= 2.0 * h, path + ": theta R must be >= 2h (resolution guard)");
    } else if (k == "blowup") {
        s.point("center", n);
        v.check(s.number("radius") > 0.0, path + ".radius must be > 0");
    } else if (k == "singular") {
        const auto scales = s.numbers("scales");
        v.check(!scales.empty() || !s.has("scales"), path + ".scales must be nonempty");
        for (double r : scales) v.check(r >= 2.0 * h, path + ".scales entries must be >= 2h");
        if (s.has("eps1")) v.check(s.number("eps1") > 0.0, path + ".eps1 must be > 0");
    } else if (k == "holder") {
        if (!s.has("centers") || !s.raw("centers").is_array() || s.raw("centers").empty()) {
            v.add(path + ".centers must be a nonempty array of points");
        }
        const auto radii = s.numbers("radii");
        v.check(radii.size() >= 3 || !s.has("radii"), path + ".radii needs at least 3 entries");
        if (s.has("p")) v.check(s.number("p") > 1.0, path + ".p must be > 1");
        if (s.has("residual_threshold")) v.check(s.number("residual_threshold") > 0.0, path + ".residual_threshold must be > 0");
    } else if (k == "gehring") {
        if (!s.has("balls") || !s.raw("balls").is_array()) v.add(path + ".balls must be an array");
        const double q = s.number("q");
        v.check(q > 1.0 && q < cfg.p, path + ".q must satisfy 1 < q < p");
        for (double pb : s.numbers("pbar")) v.check(pb > cfg.p, path + ".pbar entries must exceed p");
        if (s.has("kappa")) v.check(s.number("kappa") >= 1.0, path + ".kappa must be >= 1");
    } else if (k == "holefill") {
        s.point("x0", n);
        const auto radii = s.numbers("radii");
        v.check(radii.size() >= 4 || !s.has("radii"), path + ".radii needs at least 4 entries");
        for (std::size_t i = 0; i + 1 < radii.size(); ++i) v.check(radii[i] < radii[i + 1], path + ".radii must increase");
    } else if (k == "comparison") {
        s.point("center", n);
        const double R = s.number("radius");
        v.check(R > 0.0, path + ".radius must be > 0");
        if (s.has("inner_radius")) {
            const double r = s.number("inner_radius");
            v.check(r > 0.0 && r < R, path + ".inner_radius must lie in (0, radius)");
        }
        if (s.has("shift_samples")) v.check(s.integer("shift_samples") >= 1, path + ".shift_samples must be >= 1");
        if (cfg.manifold_kind == "euclidean") v.add(path + ": comparison maps need a sphere target");
    } else if (k == "minimality") {
        if (s.has("trials")) v.check(s.integer("trials") >= 1, path + ".trials must be >= 1");
        if (s.has("amplitude")) v.check(s.number("amplitude") > 0.0, path + ".amplitude must be > 0");
    } else if (k == "tangential") {
        // no parameters
    } else {
        v.add(path + ".probe '" + k + "' is not a known probe");
    }
    if (k != "holder" && k != "energy" && k != "minimality" && k != "blowup" && cfg.p < 2.0) {
        v.add(path + ": probe '" + k + "' requires p >= 2");
    }
}

}  // namespace

RunConfig parse_config(const json& doc) {
    Violations v;
    RunConfig cfg;
    cfg.raw = doc;
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    const Section top(doc, "config", v);

    const long long version = top.integer("format_version");
    v.check(version == kFormatVersion, "config.format_version must be " + std::to_string(kFormatVersion));

    // params
    if (top.has("params")) {
        const Section s(doc.at("params"), "params", v);
        cfg.s = s.number("s");
        cfg.p = s.number("p");
        cfg.n = static_cast<int>(s.integer("n"));
        cfg.N = static_cast<int>(s.integer("N"));
        try {
            (void)cfg.params();
        } catch (const ValidationError& e) {
            for (const auto& m : e.violations()) v.add("params: " + m);
        }
    } else {
        v.add("config.params is required");
    }
    const bool dims_ok = cfg.n >= 1 && cfg.n <= 3;

    // grid
    if (top.has("grid")) {
        const Section s(doc.at("grid"), "grid", v);
        const auto lo = s.numbers("box_lo");
        const auto hi = s.numbers("box_hi");
        cfg.h = s.number("h");
        v.check(cfg.h > 0.0, "grid.h must be > 0");
        if (dims_ok) {
            cfg.box.dim = cfg.n;
            if (static_cast<int>(lo.size()) != cfg.n || static_cast<int>(hi.size()) != cfg.n) {
                v.add("grid.box_lo and grid.box_hi must have n = " + std::to_string(cfg.n) + " entries");
            } else {
                for (int d = 0; d < cfg.n; ++d) {
                    cfg.box.lo[d] = lo[d];
                    cfg.box.hi[d] = hi[d];
                    v.check(hi[d] > lo[d], "grid box must be nonempty along axis " + std::to_string(d));
                }
            }
        }
        cfg.collar_width = s.number("collar_width", default_collar_width(cfg.box));
        v.check(cfg.collar_width >= cfg.h, "grid.collar_width must be >= h");
        const long long cap = s.integer("max_cells", 60000);
        v.check(cap > 0, "grid.max_cells must be > 0");
        cfg.max_cells = static_cast<std::size_t>(std::max(cap, 1LL));
        if (v.empty() && cfg.h > 0.0) {
            std::size_t total = 1;
            const auto layers = static_cast<std::size_t>(std::floor(cfg.collar_width / cfg.h + 1e-9));
            for (int d = 0; d < cfg.n; ++d) {
                const double cells = (cfg.box.hi[d] - cfg.box.lo[d]) / cfg.h;
                const double rounded = std::round(cells);
                if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded) || rounded < 1.0) {
                    v.add("grid box length along axis " + std::to_string(d) + " is not an integer multiple of h");
                }
                total *= static_cast<std::size_t>(rounded) + 2 * layers;
            }
            v.check(total <= cfg.max_cells, "grid has " + std::to_string(total) + " cells, above max_cells = " +
                                                 std::to_string(cfg.max_cells));
        }
    } else {
        v.add("config.grid is required");
    }

    // manifold
    if (top.has("manifold")) {
        const Section s(doc.at("manifold"), "manifold", v);
        cfg.manifold_kind = s.string("kind", "sphere");
        v.check(cfg.manifold_kind == "sphere" || cfg.manifold_kind == "euclidean",
                "manifold.kind must be 'sphere' or 'euclidean' (custom targets are API-only)");
        const long long default_lambda = cfg.manifold_kind == "sphere" ? cfg.N : 1000000;
        cfg.lambda = static_cast<int>(s.integer("lambda", default_lambda));
        if (cfg.manifold_kind == "sphere" && s.has("lambda")) {
            v.check(cfg.lambda == cfg.N, "manifold.lambda of the sphere S^{N-1} is N");
        }
        cfg.claim_hypotheses = s.boolean("claim_hypotheses", false);
        if (cfg.claim_hypotheses) {
            v.check(static_cast<double>(cfg.lambda) > std::max(cfg.p, 2.0),
                    "manifold.claim_hypotheses requires lambda > max{p, 2}");
        }
    }

    // boundary data
    if (top.has("boundary_data")) {
        const Section s(doc.at("boundary_data"), "boundary_data", v);
        PresetSpec& b = cfg.boundary;
        b.name = s.string("preset");
        v.check(is_known_preset(b.name), "boundary_data.preset '" + b.name + "' is not a known preset");
        if (dims_ok) b.center = s.point("center", cfg.n, Point{0.0, 0.0, 0.0});
        b.value = s.numbers("value", false);
        if (!b.value.empty()) v.check(static_cast<int>(b.value.size()) == cfg.N, "boundary_data.value must have N entries");
        b.amplitude = s.number("amplitude", 1.0);
        b.width = s.number("width", 1.0);
        v.check(b.width > 0.0, "boundary_data.width must be > 0");
        b.alpha = s.number("alpha", 0.5);
        v.check(b.alpha > 0.0, "boundary_data.alpha must be > 0");
        b.kappa = s.number("kappa", 1.0);
        b.path = s.string("path", "");
        if (b.name == "file") v.check(!b.path.empty(), "boundary_data.path is required for the file preset");
        if (b.name == "radial-degree-1") v.check(cfg.N >= cfg.n, "radial-degree-1 needs N >= n");
        if (b.name == "holder-power" || b.name == "smooth-bump" || b.name == "radial-degree-1") {
            v.check(cfg.manifold_kind != "euclidean" || b.name == "smooth-bump",
                    "boundary_data.preset '" + b.name + "' needs a sphere target");
        }
    } else {
        v.add("config.boundary_data is required");
    }

    // minimize
    if (top.has("minimize")) {
        const Section s(doc.at("minimize"), "minimize", v);
        MinimizeOptions& m = cfg.minimize;
        m.max_iters = static_cast<int>(s.integer("max_iters", m.max_iters));
        m.step_init = s.number("step_init", m.step_init);
        m.backtrack = s.number("backtrack", m.backtrack);
        m.armijo = s.number("armijo", m.armijo);
        m.max_backtracks = static_cast<int>(s.integer("max_backtracks", m.max_backtracks));
        m.grad_tol = s.number("grad_tol", m.grad_tol);
        m.restarts = static_cast<int>(s.integer("restarts", m.restarts));
        m.restart_noise = s.number("restart_noise", m.restart_noise);
        m.barzilai_borwein = s.boolean("barzilai_borwein", m.barzilai_borwein);
        try {
            validate(m);
        } catch (const ValidationError& e) {
            for (const auto& msg : e.violations()) v.add(msg);
        }
    }
    if (cfg.p < 2.0 && cfg.p > 1.0) v.add("params.p must be >= 2 for the solver (operator range)");

    // kernel
    if (top.has("kernel")) {
        const Section s(doc.at("kernel"), "kernel", v);
        try {
            cfg.kernel.rule = near_field_rule_from_string(s.string("rule", "automatic"));
        } catch (const ValidationError& e) {
            v.add("kernel.rule: " + e.violations().front());
        }
        cfg.kernel.gauss_order = static_cast<int>(s.integer("gauss_order", cfg.kernel.gauss_order));
        v.check(cfg.kernel.gauss_order >= 2 && cfg.kernel.gauss_order <= 64, "kernel.gauss_order must lie in [2, 64]");
        if (cfg.kernel.rule == NearFieldRule::cell_pair) {
            v.check(cfg.s * cfg.p < 1.0, "kernel.rule 'cell-pair' needs sp < 1 (touching cells diverge otherwise)");
        }
    }

    // seed and output
    if (top.has("seed")) {
        const long long seed = top.integer("seed");
        v.check(seed >= 0, "config.seed must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(std::max(seed, 0LL));
    }
    cfg.minimize.seed = cfg.seed;
    cfg.output_dir = top.string("output_dir", "");

    // diagnostics plan
    if (top.has("diagnostics")) {
        const json& d = doc.at("diagnostics");
        if (!d.is_array()) {
            v.add("config.diagnostics must be an array of probe objects");
        } else {
            for (std::size_t i = 0; i < d.size(); ++i) {
                const std::string path = "diagnostics[" + std::to_string(i) + "]";
                if (!d[i].is_object() || !d[i].contains("probe") || !d[i]["probe"].is_string()) {
                    v.add(path + " must be an object with a string 'probe'");
                    continue;
                }
                ProbeSpec probe{d[i]["probe"].get<std::string>(), d[i]};
                probe.settings.erase("probe");
                if (dims_ok) check_probe(probe, path, cfg, v);
                cfg.probes.push_back(std::move(probe));
            }
        }
    }

    // sweep
    if (top.has("sweep")) {
        const Section s(doc.at("sweep"), "sweep", v);
        cfg.sweep.s = s.numbers("s", false);
        cfg.sweep.p = s.numbers("p", false);
        cfg.sweep.h = s.numbers("h", false);
        cfg.sweep.theta = s.numbers("theta", false);
        cfg.sweep.eps1 = s.numbers("eps1", false);
        for (double x : cfg.sweep.s) v.check(x > 0.0 && x < 1.0, "sweep.s entries must lie in (0, 1)");
        for (double x : cfg.sweep.p) v.check(x >= 2.0, "sweep.p entries must be >= 2");
        for (double x : cfg.sweep.h) v.check(x > 0.0, "sweep.h entries must be > 0");
        for (double x : cfg.sweep.theta) {
            v.check(x > 0.0 && x < 0.5, "sweep.theta entries must lie in (0, 1/2) (decay hypothesis), got " + format_number(x));
        }
        for (double x : cfg.sweep.eps1) v.check(x > 0.0, "sweep.eps1 entries must be > 0");
    }

    v.throw_if_any();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ValidationError("config '" + path + "' is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(doc);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hsh = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hsh ^= c;
        hsh *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hsh));
    return buf;
}

std::string config_hash(const json& doc) { return fnv1a_hex(doc.dump()); }

}  // namespace fraclab
