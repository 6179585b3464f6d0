#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rsm/cli.hpp"
#include "rsm/config.hpp"
#include "rsm/error.hpp"
#include "rsm/report.hpp"

using namespace rsm;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run rsm_run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "rsm_test_cli";
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    const auto p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ErrorKind schema_kind(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::consistency;
}

std::string schema_message(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config defaults and overrides") {
    const auto d = parse_config("{}");
    CHECK(d.manifold.dimension == 3);
    CHECK(d.manifold.family == Family::euclidean);
    CHECK(d.manifold.r_max == 60.0);
    CHECK(d.manifold.eps0 == 0.1);
    CHECK(d.manifold.tolerances.quad_rel == 1e-12);
    CHECK(d.criterion.jmax == 40);
    CHECK(d.verify.suite == "all");

    const auto c = parse_config(R"({
        "manifold": {"dimension": 4, "family": "power_exp", "gamma": 3, "r_max": 50.0,
                     "tolerances": {"profile_h": 0.02}},
        "criterion": {"zeta": "constant", "parameter": 2, "jmax": 30, "mode": "barta"},
        "output": {"json": "out/report.json"}
    })",
                                "/base");
    CHECK(c.manifold.dimension == 4);
    CHECK(c.manifold.family == Family::power_exp);
    CHECK(c.manifold.gamma == 3.0);
    CHECK(c.manifold.tolerances.profile_h == 0.02);
    CHECK(c.criterion.zeta == "constant");
    CHECK(c.criterion.jmax == 30);
    CHECK(c.output.json == "/base/out/report.json");
    const auto m = c.manifold.build();
    CHECK(m.dimension() == 4);
    CHECK(m.warping().gamma() == 3.0);
}

TEST_CASE("config schema errors name the key path") {
    CHECK(schema_kind(R"({"manifold": {"gama": 2}})") == ErrorKind::schema);
    CHECK(schema_message(R"({"manifold": {"gama": 2}})").find("manifold.gama") != std::string::npos);
    CHECK(schema_message(R"({"manifold": {"tolerances": {"quad": 1}}})").find("manifold.tolerances.quad") !=
          std::string::npos);
    CHECK(schema_message(R"({"extra": 1})").find("extra: unknown key") != std::string::npos);
    CHECK(schema_message(R"({"manifold": {"dimension": 2.5}})").find("manifold.dimension") != std::string::npos);
    CHECK(schema_message(R"({"manifold": {"r_max": "60"}})").find("expected a number") != std::string::npos);
    CHECK(schema_message(R"({"manifold": {"family": "sphere"}})").find("manifold.family") != std::string::npos);
    CHECK(schema_message(R"({"criterion": {"mode": "exact"}})").find("criterion.mode") != std::string::npos);
    CHECK(schema_message(R"({"manifold": {"samples": {"r": [0, "x"]}}})").find("manifold.samples.r[1]") !=
          std::string::npos);
    CHECK(schema_kind("{not json") == ErrorKind::schema);
    CHECK(schema_kind("[1, 2]") == ErrorKind::schema);
}

TEST_CASE("CSV table reader") {
    const auto p = write_file("table.csv", "r, phi\n0,0\n0.5, 0.5\n\n1.0,1.0\n");
    const auto t = read_csv_table(p);
    CHECK(t.rows() == 3);
    CHECK(t.column("phi")[1] == 0.5);
    CHECK_THROWS_AS(t.column("dphi"), Error);
    CHECK_THROWS_AS(read_csv_table(write_file("bad.csv", "r,f\n0,1,2\n")), Error);
    CHECK_THROWS_AS(read_csv_table(write_file("bad2.csv", "r,f\n0,abc\n")), Error);
}

TEST_CASE("CSV writer uses shortest round-trip numbers") {
    std::ostringstream os;
    write_csv(os, CsvColumns{{"a", "b"}, {{0.03, 1.0 / 3.0}, {kInf, -2.5}}});
    CHECK(os.str() == "a,b\n0.03,inf\n0.3333333333333333,-2.5\n");
}

TEST_CASE("exit codes") {
    CHECK(exit_code(Error(ErrorKind::precondition, "")) == 1);
    CHECK(exit_code(Error(ErrorKind::schema, "")) == 1);
    CHECK(exit_code(Error(ErrorKind::domain, "")) == 1);
    CHECK(exit_code(BudgetExceeded("", 0.0, 0.0)) == 2);
    CHECK(exit_code(Error(ErrorKind::inconclusive, "")) == 2);

    CHECK(rsm_run({}).code == 1);
    CHECK(rsm_run({"nosuch"}).code == 1);
    const auto bad = write_file("bad.json", R"({"poisson": {"sorce": "power"}})");
    const auto r1 = rsm_run({"--config", bad, "poisson"});
    CHECK(r1.code == 1);
    CHECK(r1.err.find("poisson.sorce") != std::string::npos);
    CHECK(rsm_run({"criterion", "--jmax", "80"}).code == 1);
    CHECK(rsm_run({"verify", "--suite", "nosuch"}).code == 1);
    const auto tight = write_file("tight.json", R"({"manifold": {"tolerances": {"quad_rel": 1e-300}}})");
    CHECK(rsm_run({"--config", tight, "poisson"}).code == 2);
}

TEST_CASE("help documents units and defaults for every subcommand") {
    for (const char* sub : {"manifold", "spectrum", "green", "poisson", "criterion", "verify", "sharpness"}) {
        const auto r = rsm_run({sub, "--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("default") != std::string::npos);
        CHECK(r.out.find("metric units") != std::string::npos);
    }
}

TEST_CASE("poisson prints the pole value") {
    const auto r = rsm_run({"poisson", "--source", "expdecay", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("u(p) = 1.000000") != std::string::npos);

    const auto cfg = write_file("sinh.json", R"({"manifold": {"family": "space_form"},
                                                 "poisson": {"source": "expdecay", "parameter": 2}})");
    const auto csv = (scratch() / "u.csv").string();
    const auto s = rsm_run({"--config", cfg, "poisson", "--csv", csv});
    CHECK(s.code == 0);
    CHECK(s.out.find("u(p) = 0.125000") != std::string::npos);
    const auto text = slurp(csv);
    CHECK(text.rfind("r,u\n0,0.125", 0) == 0);

    // Cubic-spline source sampled from exp(-r) on [0, 40].
    std::ostringstream src;
    src << std::setprecision(17) << "r,f\n";
    for (int i = 0; i <= 400; ++i) src << i * 0.1 << ',' << std::exp(-i * 0.1) << '\n';
    const auto path = write_file("source.csv", src.str());
    const auto f = rsm_run({"poisson", "--source", "file", path, "--json", (scratch() / "f.json").string()});
    CHECK(f.code == 0);
    CHECK(f.out.find("u(p) = 1.000000") != std::string::npos);
    CHECK(rsm_run({"poisson", "--source", "file", (scratch() / "missing.csv").string()}).code == 1);
}

TEST_CASE("criterion on hyperbolic space converges and emits JSON") {
    const auto r = rsm_run({"--family", "space_form", "criterion", "--zeta", "power", "1.5"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("verdict: Converges", 0) == 0);
    CHECK(r.out.find("\"schema_version\": \"1.0.0\"") != std::string::npos);
}

TEST_CASE("JSON reports are byte-identical across runs") {
    const auto a = (scratch() / "a.json").string();
    const auto b = (scratch() / "b.json").string();
    const std::vector<std::string> base{"--family", "power_exp", "criterion", "--jmax", "20", "--mode", "barta"};
    auto args = base;
    args.insert(args.end(), {"--json", a});
    CHECK(rsm_run(args).code == 0);
    args = base;
    args.insert(args.end(), {"--json", b, "--serial"});
    CHECK(rsm_run(args).code == 0);
    const auto ja = slurp(a);
    CHECK(!ja.empty());
    CHECK(ja == slurp(b));
    const auto doc = Json::parse(ja);
    CHECK(doc.begin().key() == "schema_version");
    CHECK(doc["criterion"]["mode"] == "barta_certified");
}

TEST_CASE("other subcommands") {
    const auto m = rsm_run({"--family", "cusp", "manifold", "info"});
    CHECK(m.code == 0);
    CHECK(m.out.find("parabolic, finite_volume") != std::string::npos);

    const auto s = rsm_run({"--family", "space_form", "spectrum", "--exterior", "4"});
    CHECK(s.code == 0);
    CHECK(s.out.find("lambda1(") != std::string::npos);
    CHECK(rsm_run({"spectrum", "--exterior", "4", "--ess"}).code == 1);

    const auto g = rsm_run({"green", "--export", "csv"});
    CHECK(g.code == 0);
    CHECK(g.out.rfind("r,G\n0.01,7.95774715459476", 0) == 0);
    CHECK(rsm_run({"green", "--kind", "parabolic"}).code == 1);
    const auto d = rsm_run({"green", "--kind", "dirichlet", "--radius", "2"});
    CHECK(d.code == 0);
    CHECK(d.out.find("G(1.0) = 3.9788735773e-02") != std::string::npos);

    const auto c = (scratch() / "cont.json").string();
    const auto v = rsm_run({"verify", "--suite", "containment", "--json", c});
    CHECK(v.code == 0);
    const auto doc = Json::parse(slurp(c));
    CHECK(doc["verify"]["pass"] == true);
    CHECK(doc["verify"]["suites"]["containment"]["checks"].size() == 3);
}
