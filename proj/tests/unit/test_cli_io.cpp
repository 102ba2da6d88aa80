#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fraclab/commands.hpp"
#include "fraclab/config.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/presets.hpp"
#include "fraclab/snapshot.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace fraclab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::current_path() / "cli_scratch" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path write_config(const fs::path& dir, const json& doc, const std::string& name = "config.json") {
    const fs::path p = dir / name;
    std::ofstream(p) << doc.dump(2);
    return p;
}

json base_config() {
    return json::parse(R"({
        "format_version": 1,
        "params": {"s": 0.4, "p": 2.0, "n": 1, "N": 2},
        "grid": {"box_lo": [-1], "box_hi": [1], "h": 0.0625, "collar_width": 0.5},
        "manifold": {"kind": "sphere"},
        "boundary_data": {"preset": "smooth-bump", "amplitude": 1.0, "width": 0.5},
        "minimize": {"grad_tol": 1e-8},
        "seed": 5,
        "diagnostics": [
            {"probe": "energy", "balls": [{"center": [0.0], "radius": 0.5}]},
            {"probe": "caccioppoli", "x0": [0.0], "rho": [0.05, 0.1, 0.15]},
            {"probe": "decay", "x0": [0.0], "R": 0.6, "theta": 0.25, "eps1": 10.0}
        ]
    })");
}

struct Streams {
    std::ostringstream log, err;
};

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("config validation collects every violation") {
    json doc = base_config();
    doc["diagnostics"][2]["theta"] = 0.7;
    doc["params"]["s"] = 1.5;
    doc["minimize"]["backtrack"] = 2.0;
    try {
        parse_config(doc);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.violations().size() >= 3);
        CHECK(std::string(e.what()).find("(0, 1/2)") != std::string::npos);
    }
    json unknown = base_config();
    unknown["boundary_data"]["preset"] = "spiral";
    CHECK_THROWS_AS(parse_config(unknown), ValidationError);
    json probe = base_config();
    probe["diagnostics"].push_back({{"probe", "nonsense"}});
    CHECK_THROWS_AS(parse_config(probe), ValidationError);
}

TEST_CASE("malformed config exits nonzero with the decay constraint named") {
    const fs::path dir = scratch("malformed");
    json doc = base_config();
    doc["diagnostics"][2]["theta"] = 0.7;
    Streams s;
    const int code = cmd_solve(write_config(dir, doc).string(), {(dir / "out").string(), {}, false}, s.log, s.err);
    CHECK(code == exit_invalid);
    CHECK(s.err.str().find("(0, 1/2)") != std::string::npos);
    CHECK(!fs::exists(dir / "out"));
}

TEST_CASE("constant preset solves to zero energy") {
    const fs::path dir = scratch("constant");
    json doc = base_config();
    doc["boundary_data"] = {{"preset", "constant"}, {"value", {0.0, 1.0}}};
    Streams s;
    const int code = cmd_solve(write_config(dir, doc).string(), {(dir / "out").string(), {}, false}, s.log, s.err);
    REQUIRE(code == exit_ok);
    const json result = json::parse(slurp(dir / "out" / "result.json"));
    CHECK(result.at("energy").get<double>() == 0.0);
    const json man = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(man.at("format_version") == kFormatVersion);
    CHECK(man.at("seed") == 5);
    CHECK(man.at("config") == doc);
    CHECK(man.at("config_hash") == config_hash(doc));
    CHECK(fs::exists(dir / "out" / "field.bin"));
    CHECK(fs::exists(dir / "out" / "energy_history.csv"));
}

TEST_CASE("reruns are byte identical and outputs are write-once") {
    const fs::path dir = scratch("rerun");
    const fs::path cfg = write_config(dir, base_config());
    Streams s;
    REQUIRE(cmd_solve(cfg.string(), {(dir / "a").string(), {}, false}, s.log, s.err) == exit_ok);
    REQUIRE(cmd_solve(cfg.string(), {(dir / "b").string(), {}, false}, s.log, s.err) == exit_ok);
    for (const char* f : {"field.bin", "result.json", "manifest.json", "energy_history.csv"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    CHECK(cmd_solve(cfg.string(), {(dir / "a").string(), {}, false}, s.log, s.err) == exit_exists);
    CHECK(cmd_solve(cfg.string(), {(dir / "a").string(), {}, true}, s.log, s.err) == exit_ok);
    CHECK(slurp(dir / "a" / "field.bin") == slurp(dir / "b" / "field.bin"));
    CHECK(cmd_solve(cfg.string(), {(dir / "c").string(), 77, false}, s.log, s.err) == exit_ok);
    CHECK(json::parse(slurp(dir / "c" / "manifest.json")).at("seed") == 77);
}

TEST_CASE("diagnose writes one report pair per probe") {
    const fs::path dir = scratch("diagnose");
    const fs::path cfg = write_config(dir, base_config());
    Streams s;
    REQUIRE(cmd_solve(cfg.string(), {(dir / "solve").string(), {}, false}, s.log, s.err) == exit_ok);
    const std::string snap = (dir / "solve" / "field.bin").string();
    REQUIRE(cmd_diagnose(cfg.string(), snap, {(dir / "diag").string(), {}, false}, s.log, s.err) == exit_ok);
    CHECK(fs::exists(dir / "diag" / "00_energy.json"));
    CHECK(fs::exists(dir / "diag" / "00_energy.csv"));
    const std::string csv = slurp(dir / "diag" / "01_caccioppoli.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.rfind("rho,lhs,rhs_core,ratio", 0) == 0);
    CHECK(fs::exists(dir / "diag" / "02_decay.json"));

    json empty = base_config();
    empty["diagnostics"] = json::array();
    const fs::path cfg2 = write_config(dir, empty, "empty.json");
    REQUIRE(cmd_diagnose(cfg2.string(), snap, {(dir / "diag2").string(), {}, false}, s.log, s.err) == exit_ok);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "diag2")) files += e.is_regular_file() ? 1 : 0;
    CHECK(files == 1);
    CHECK(fs::exists(dir / "diag2" / "manifest.json"));

    json other = base_config();
    other["grid"]["h"] = 0.03125;
    const fs::path cfg3 = write_config(dir, other, "other.json");
    Streams m;
    CHECK(cmd_diagnose(cfg3.string(), snap, {(dir / "diag3").string(), {}, false}, m.log, m.err) == exit_invalid);
    CHECK(m.err.str().find("h: snapshot") != std::string::npos);
}

TEST_CASE("snapshot round trip") {
    const FractionalParams params(0.5, 2.0, 2, 3);
    Box b;
    b.dim = 2;
    b.lo = {-0.5, 0.0, 0.0};
    b.hi = {0.5, 0.75, 0.0};
    const Grid g = build_grid(params, b, 0.125, 0.25);
    FieldMap f(g, 3);
    Rng rng(2);
    testing::fill_random(f, rng);
    f.set_frozen(g.interior_indices()[2], true);
    const std::string bytes = encode_snapshot(f);
    const FieldMap back = decode_snapshot(bytes);
    CHECK(back.identical(f));
    CHECK(back.grid().same_lattice(g));
    CHECK(encode_snapshot(back) == bytes);
    CHECK_THROWS(decode_snapshot(bytes.substr(0, 40)));
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS(decode_snapshot(bad));
}

TEST_CASE("sweep covers the Cartesian product and isolates failures") {
    const fs::path dir = scratch("sweep");
    json doc = base_config();
    doc["sweep"] = {{"s", {0.3, 0.4}}, {"p", {2.0, 2.5}}};
    const fs::path cfg = write_config(dir, doc);
    Streams s;
    REQUIRE(cmd_sweep(cfg.string(), {(dir / "a").string(), {}, false}, s.log, s.err) == exit_ok);
    const std::string table = slurp(dir / "a" / "sweep.csv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    REQUIRE(cmd_sweep(cfg.string(), {(dir / "b").string(), {}, false}, s.log, s.err) == exit_ok);
    CHECK(slurp(dir / "b" / "sweep.csv") == table);

    json invalid = base_config();
    invalid["sweep"] = {{"theta", {0.25, 0.7}}};
    Streams v;
    CHECK(cmd_sweep(write_config(dir, invalid, "invalid.json").string(), {(dir / "v").string(), {}, false}, v.log,
                    v.err) == exit_invalid);
    CHECK(v.err.str().find("(0, 1/2)") != std::string::npos);

    // h = 0.3 does not tile the box, so only the second point fails.
    json failing = base_config();
    failing["sweep"] = {{"h", {0.0625, 0.3}}};
    const fs::path cfg2 = write_config(dir, failing, "failing.json");
    Streams f;
    CHECK(cmd_sweep(cfg2.string(), {(dir / "c").string(), {}, false}, f.log, f.err) == exit_failure);
    const std::string t2 = slurp(dir / "c" / "sweep.csv");
    CHECK(std::count(t2.begin(), t2.end(), '\n') == 3);
    CHECK(t2.find(",ok,") != std::string::npos);
    CHECK(t2.find(",failed,") != std::string::npos);
}

TEST_CASE("one-point sweep equals solve then diagnose") {
    const fs::path dir = scratch("single");
    json doc = base_config();
    doc["sweep"] = {{"s", {0.4}}};
    json plain = base_config();
    Streams s;
    REQUIRE(cmd_sweep(write_config(dir, doc).string(), {(dir / "sweep").string(), {}, false}, s.log, s.err) == exit_ok);
    const fs::path cfg = write_config(dir, plain, "plain.json");
    REQUIRE(cmd_solve(cfg.string(), {(dir / "solve").string(), {}, false}, s.log, s.err) == exit_ok);
    REQUIRE(cmd_diagnose(cfg.string(), (dir / "solve" / "field.bin").string(), {(dir / "diag").string(), {}, false},
                         s.log, s.err) == exit_ok);
    const fs::path point = dir / "sweep" / "point_0000";
    for (const auto& e : fs::directory_iterator(dir / "solve")) {
        CHECK(slurp(e.path()) == slurp(point / "solve" / e.path().filename()));
    }
    for (const auto& e : fs::directory_iterator(dir / "diag")) {
        CHECK(slurp(e.path()) == slurp(point / "diagnose" / e.path().filename()));
    }
}

TEST_CASE("command-line front end") {
    const fs::path dir = scratch("binary");
    const fs::path cfg = write_config(dir, base_config());
    const std::string exe = FRACLAB_CLI_PATH;
    auto run = [&](const std::string& args) {
        const int status = std::system((exe + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("") == exit_invalid);
    CHECK(run("solve") == exit_invalid);
    CHECK(run("solve " + cfg.string() + " --out " + (dir / "o").string() + " --seed 9") == exit_ok);
    CHECK(run("solve " + cfg.string() + " --out " + (dir / "o").string()) == exit_exists);
    CHECK(run("solve " + cfg.string() + " --out " + (dir / "o").string() + " --force") == exit_ok);
    CHECK(run("diagnose " + cfg.string() + " " + (dir / "o" / "field.bin").string() + " --out " + (dir / "d").string()) ==
          exit_ok);
    CHECK(run("diagnose " + cfg.string() + " " + (dir / "missing.bin").string() + " --out " + (dir / "e").string()) ==
          exit_invalid);
    CHECK(run("solve " + (dir / "missing.json").string() + " --out " + (dir / "f").string()) == exit_invalid);
}

}  // TEST_SUITE
