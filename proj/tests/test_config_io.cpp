#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "muskat/config_io.hpp"

#include "json.hpp"

using namespace muskat;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("config parsing: minimal file plus defaults") {
    std::stringstream ss;
    ss << "# acceptance-style minimal config\n"
       << "sigma = 1\n"
       << "n = 256\n"
       << "dt = 1e-4\n"
       << "t_end = 1\n";
    const LoadedConfig lc = parse_config(ss, "mem");
    // the only warning is the stability-cap note (dt = 1e-4 far exceeds the
    // default cap at n = 256); defaults still fill in
    REQUIRE(lc.warnings.size() == 1);
    CHECK(lc.warnings[0].find("stability cap") != std::string::npos);
    CHECK(lc.config.params.sigma == 1.0);
    CHECK(lc.config.params.g_rho == 0.0);
    CHECK(lc.config.n_points == 256);
    CHECK(lc.config.formulation == Formulation::cp1);
    CHECK(lc.config.report_every == 50);
    CHECK(lc.config.smallness_C == 12.0);
    CHECK(lc.config.quad.n_alpha == 96);
}

TEST_CASE("config parsing: bad values and unknown keys") {
    {
        std::stringstream ss;
        ss << "sigma = 1\ndt = 0\n";
        CHECK_THROWS_WITH_AS(parse_config(ss, "mem"), doctest::Contains("dt must be positive"),
                             std::runtime_error);
    }
    {
        std::stringstream ss;
        ss << "sgima = 1\nsigma = 1\nn = 16\ndt = 1e-6\nt_end = 1e-3\n";
        const LoadedConfig lc = parse_config(ss, "mem");
        REQUIRE(lc.warnings.size() == 1);
        CHECK(lc.warnings[0].find("sgima") != std::string::npos);
    }
    {
        std::stringstream ss;
        ss << "formulation = cp7\n";
        CHECK_THROWS_AS(parse_config(ss, "mem"), std::runtime_error);
    }
    {
        std::stringstream ss;
        ss << "sigma\n";
        CHECK_THROWS_WITH_AS(parse_config(ss, "mem"), doctest::Contains("key = value"),
                             std::runtime_error);
    }
}

TEST_CASE("initial-data expressions") {
    const PeriodicGrid g = make_grid(64, 2.0 * pi);
    const ScalarField a = parse_initial_data("0.04*sin(1x) + 0.002*sin(2x)", g, 0);
    for (std::size_t j = 0; j < g.n_points(); ++j) {
        const double want = 0.04 * std::sin(g.node(j)) + 0.002 * std::sin(2.0 * g.node(j));
        CHECK(a[j] == doctest::Approx(want).epsilon(1e-14));
    }

    const ScalarField z = parse_initial_data("0", g, 0);
    for (double v : z.values()) CHECK(v == 0.0);

    const ScalarField c = parse_initial_data("-0.5*cos(3x)+0.25", g, 0);
    CHECK(c[0] == doctest::Approx(-0.25));

    // exponent signs inside coefficients survive the term splitter
    const ScalarField e = parse_initial_data("1e-3*sin(2x)-2.5e-2", g, 0);
    for (std::size_t j = 0; j < g.n_points(); ++j)
        CHECK(e[j] == doctest::Approx(1e-3 * std::sin(2.0 * g.node(j)) - 2.5e-2).epsilon(1e-14));

    const ScalarField r1 = parse_initial_data("random(modes=3, amp=0.01)", g, 42);
    const ScalarField r2 = parse_initial_data("random(modes=3, amp=0.01)", g, 42);
    const ScalarField r3 = parse_initial_data("random(modes=3, amp=0.01)", g, 43);
    double same = 0.0, diff = 0.0;
    for (std::size_t j = 0; j < g.n_points(); ++j) {
        same = std::max(same, std::abs(r1[j] - r2[j]));
        diff = std::max(diff, std::abs(r1[j] - r3[j]));
    }
    CHECK(same == 0.0);
    CHECK(diff > 0.0);

    CHECK_THROWS_AS(parse_initial_data("0.1*tan(1x)", g, 0), std::invalid_argument);
}

TEST_CASE("snapshot round trip, corruption, version gate") {
    const PeriodicGrid g = make_grid(64, 2.0 * pi);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(g.n_points());
    for (auto& x : v) x = u(rng);
    const ScalarField f = ScalarField::from_values(g, v);

    const auto path = temp_file("muskat_snap_test.bin");
    SnapshotMeta meta;
    meta.time = 2.5;
    meta.sigma = 1.0;
    meta.g_rho = 0.25;
    save_snapshot(f, meta, path.string());

    const auto [f2, meta2] = load_snapshot(path.string());
    CHECK(meta2.time == 2.5);
    CHECK(meta2.sigma == 1.0);
    CHECK(meta2.g_rho == 0.25);
    REQUIRE(f2.size() == f.size());
    for (std::size_t j = 0; j < f.size(); ++j) CHECK(f2[j] == f[j]); // bit-exact

    // flip one payload byte -> checksum error
    {
        std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(60);
        char c;
        io.seekg(60);
        io.get(c);
        io.seekp(60);
        io.put(static_cast<char>(c ^ 0x40));
    }
    CHECK_THROWS_WITH_AS(load_snapshot(path.string()), doctest::Contains("checksum"),
                         std::runtime_error);

    // future version tag -> refusal
    save_snapshot(f, meta, path.string());
    {
        std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(4);
        const std::uint32_t future = 9;
        io.write(reinterpret_cast<const char*>(&future), sizeof(future));
    }
    CHECK_THROWS_WITH_AS(load_snapshot(path.string()), doctest::Contains("version"),
                         std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("time series: csv and json stay in sync") {
    Trajectory traj;
    for (int i = 0; i < 3; ++i) {
        ReportRow r;
        r.time = 0.125 * i;
        r.norms.time = r.time;
        r.norms.l2 = 1.0 / (i + 1);
        r.norms.h32 = 0.5 / (i + 1);
        r.norms.h3 = 2.0 / (i + 1);
        r.norms.h52 = 1.5 / (i + 1);
        r.norms.h4 = 3.0 / (i + 1);
        r.norms.b1_inf_1 = 0.25;
        r.norms.lip = 0.1;
        r.norms.smallness = 0.75;
        r.energy.ddt_e = -0.001 * i;
        r.energy.dissip3 = 0.002 * i;
        r.energy.dissip32 = 0.001 * i;
        r.energy.K_required = 1.25;
        traj.times.push_back(r.time);
        traj.reports.push_back(r);
    }

    const auto csv_path = temp_file("muskat_series.csv");
    const auto json_path = temp_file("muskat_series.json");
    write_timeseries(traj, csv_path.string(), SeriesFormat::csv);
    write_timeseries(traj, json_path.string(), SeriesFormat::json);

    // header and column count
    std::ifstream in(csv_path);
    std::string header;
    std::getline(in, header);
    CHECK(header == timeseries_header());
    std::string row;
    int rows = 0;
    while (std::getline(in, row)) {
        if (row.empty()) continue;
        CHECK(std::count(row.begin(), row.end(), ',') == 12);
        ++rows;
    }
    CHECK(rows == 3);

    // cross-parse equality
    const Trajectory back = read_timeseries_csv(csv_path.string());
    std::ifstream jin(json_path);
    const nlohmann::json arr = nlohmann::json::parse(jin);
    REQUIRE(arr.size() == back.reports.size());
    for (std::size_t i = 0; i < back.reports.size(); ++i) {
        CHECK(arr[i]["time"].get<double>() == back.reports[i].time);
        CHECK(arr[i]["h32"].get<double>() == back.reports[i].norms.h32);
        CHECK(arr[i]["K_required"].get<double>() == back.reports[i].energy.K_required);
        CHECK(arr[i]["smallness"].get<double>() == back.reports[i].norms.smallness);
    }

    // empty trajectory -> header-only csv
    Trajectory empty;
    write_timeseries(empty, csv_path.string(), SeriesFormat::csv);
    std::ifstream in2(csv_path);
    std::getline(in2, header);
    CHECK(header == timeseries_header());
    CHECK_FALSE(std::getline(in2, row));

    std::filesystem::remove(csv_path);
    std::filesystem::remove(json_path);
}

TEST_CASE("17-digit serialization round-trips doubles exactly") {
    const double vals[] = {1.0 / 3.0, pi, 1e-17, 123456.789012345678, -0.0425789213759830127};
    for (double v : vals) {
        const std::string s = format_g17(v);
        CHECK(std::stod(s) == v);
    }
}
