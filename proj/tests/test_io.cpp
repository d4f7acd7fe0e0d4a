#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dyon/errors.hpp"
#include "dyon/io.hpp"

using namespace dyon;
namespace fs = std::filesystem;

namespace {

json base() {
    return json::parse(R"({
      "parameters": {"g": 1.0, "g_prime": 1.0, "lambda": 2.0, "mu": 1.0, "kappa_param": 1.0, "m": 1.0, "A0": 0.3, "B0": 0.3},
      "solver": {"fp_tol": 1e-8, "max_iters": 200, "grid_n": 2000},
      "flags": {"oracle": false, "fit_window": [0.5, 0.9], "verify_tol": 1e-6},
      "output": "out/acceptance"
    })");
}

ErrorKind kind_of(const json& j) {
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected a config error");
    return ErrorKind::Domain;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("dyon_io_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("valid config parses") {
    const RunConfig cfg = parse_config(base());
    CHECK(cfg.params.A0 == 0.3);
    CHECK(cfg.solver.grid_n == 2000);
    CHECK(cfg.window.lo_frac == 0.5);
    CHECK(cfg.out_dir == "out/acceptance");
}

TEST_CASE("unknown keys are rejected at every level") {
    json j = base();
    j["extra"] = 1;
    CHECK(kind_of(j) == ErrorKind::Config);
    j = base();
    j["solver"]["gridn"] = 100;
    CHECK(kind_of(j) == ErrorKind::Config);
    j = base();
    j["parameters"]["kappa"] = 1.0;
    CHECK(kind_of(j) == ErrorKind::Config);
    j = base();
    j["flags"]["plot"] = true;
    CHECK(kind_of(j) == ErrorKind::Config);
}

TEST_CASE("missing parameters and wrong types") {
    json j = base();
    j["parameters"].erase("m");
    CHECK(kind_of(j) == ErrorKind::Config);
    j = base();
    j["parameters"]["g"] = "one";
    CHECK(kind_of(j) == ErrorKind::Config);
    j = base();
    j["flags"]["fit_window"] = json::array({0.9, 0.5});
    CHECK(kind_of(j) == ErrorKind::Config);
}

TEST_CASE("solver ranges") {
    json j = base();
    j["solver"]["grid_n"] = 99;
    CHECK(kind_of(j) == ErrorKind::Config);
    j["solver"]["grid_n"] = 1000001;
    CHECK(kind_of(j) == ErrorKind::Config);
    j["solver"]["grid_n"] = 100;
    CHECK_NOTHROW(parse_config(j));
    j["solver"]["grid_n"] = 1000000;
    CHECK_NOTHROW(parse_config(j));

    j = base();
    j["solver"]["fp_tol"] = 1e-15;
    CHECK(kind_of(j) == ErrorKind::Config);
    j["solver"]["fp_tol"] = 0.1;
    CHECK(kind_of(j) == ErrorKind::Config);
    j["solver"]["fp_tol"] = 1e-14;
    CHECK_NOTHROW(parse_config(j));
    j = base();
    j["flags"]["verify_tol"] = 1e-1;
    CHECK(kind_of(j) == ErrorKind::Config);
}

TEST_CASE("params.json feeds back in unchanged") {
    const RunConfig cfg = parse_config(base());
    const DerivedConstants c = derive(cfg.params);
    const json out = params_json(cfg, c);
    CHECK(out.contains("derived"));
    const RunConfig again = parse_config(out);
    const DerivedConstants c2 = derive(again.params);
    CHECK(c2.kappa_decay == c.kappa_decay);
    CHECK(c2.zeta == c.zeta);
    CHECK(c2.nu0 == c.nu0);
    CHECK(c2.mu0 == c.mu0);
    CHECK(c2.xi == c.xi);
    CHECK(c2.k_exp == c.k_exp);
    CHECK(params_json(again, c2) == out);
    CHECK(out["derived"]["kappa_decay"].get<double>() == doctest::Approx(0.4));
}

TEST_CASE("profile csv round-trips doubles exactly") {
    FieldProfile p = FieldProfile::on_grid(make_grid(1e-3, 10.0, 200, 3.0));
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t k = 0; k < kFieldCount; ++k) p.value[k][i] = std::sin(0.1 + k + p.r[i]) / 3.0;
    const fs::path d = scratch("csv");
    write_profile_csv(d / "profile.csv", p);
    const auto rows = read_csv(d / "profile.csv");
    REQUIRE(rows.size() == p.size() + 1);
    CHECK(rows[0].size() == 13);
    CHECK(rows[0][0] == "r");
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(std::stod(rows[i + 1][0]) == p.r[i]);
        CHECK(std::stod(rows[i + 1][2]) == p.v(Field::rho)[i]);
    }
}

TEST_CASE("plot data reference lines") {
    Parameters pa;
    pa.A0 = pa.B0 = 0.3;
    const DerivedConstants c = derive(pa);
    FieldProfile p = FieldProfile::on_grid(make_grid(1e-3, 100.0, 1000, 3.0));
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p.r[i];
        p.v(Field::f)[i] = std::exp(-0.5 * r);
        p.v(Field::h)[i] = std::exp(-r);
        p.v(Field::rho)[i] = 1 - std::exp(-r) / r;
        p.v(Field::sigma)[i] = 1 - std::exp(-r) / r;
        p.v(Field::A)[i] = 0.3 - 0.1 / r;
        p.v(Field::B)[i] = 0.3 - 0.05 / r;
    }
    const fs::path d = scratch("plot");
    emit_plot_data(p, c, d);
    const auto fields = read_csv(d / "plotdata_fields.csv");
    CHECK(fields[0] == std::vector<std::string>{"r", "f", "rho", "A", "B", "h", "sigma"});
    const auto rows = read_csv(d / "plotdata_decay.csv");
    REQUIRE(rows.size() == p.size() + 1);
    CHECK(rows[0][1] == "log_f");
    CHECK(rows[0][2] == "ref_f");
    // slope of ref_f is -kappa
    const double r1 = std::stod(rows[100][0]), r2 = std::stod(rows[900][0]);
    const double slope = (std::stod(rows[900][2]) - std::stod(rows[100][2])) / (r2 - r1);
    CHECK(slope == doctest::Approx(-c.kappa_decay).epsilon(1e-12));
    // ref passes through the data at the window start
    std::size_t iw = 1;
    while (std::stod(rows[iw][0]) <= 50.0) ++iw;
    CHECK(std::stod(rows[iw][2]) == doctest::Approx(std::stod(rows[iw][1])).epsilon(1e-12));
}

TEST_CASE("plot data edge cases") {
    const DerivedConstants c = derive(Parameters{});
    CHECK_THROWS_AS(emit_plot_data(FieldProfile{}, c, scratch("empty")), Error);

    FieldProfile p = FieldProfile::on_grid(make_grid(1e-3, 50.0, 300, 3.0));
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.v(Field::f)[i] = std::exp(-p.r[i]);
        p.v(Field::h)[i] = std::exp(-p.r[i]);
        p.v(Field::rho)[i] = std::tanh(p.r[i]);
        p.v(Field::sigma)[i] = std::tanh(p.r[i]);
    }
    const fs::path d = scratch("monopole");
    emit_plot_data(p, c, d);
    const auto rows = read_csv(d / "plotdata_fields.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][3]) == 0.0);
        CHECK(std::stod(rows[i][4]) == 0.0);
    }
}
