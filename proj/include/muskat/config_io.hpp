#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "muskat/grid.hpp"
#include "muskat/timestepper.hpp"

#include "json.hpp"

namespace muskat {

// ---------------------------------------------------------------------------
// Initial-data expressions
//
// Grammar: sum of terms "a*sin(kx)", "a*cos(kx)", a constant, or
// "random(modes=M, amp=A)" which draws uniform amplitudes/phases for modes
// 1..M from the config seed. "0" is the zero field.
// ---------------------------------------------------------------------------

inline ScalarField parse_initial_data(const std::string& expr, const PeriodicGrid& grid,
                                      std::uint64_t seed) {
    std::string s;
    for (char c : expr)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("init: empty expression");

    const std::size_t n = grid.n_points();
    std::vector<double> vals(n, 0.0);

    if (s.rfind("random(", 0) == 0) {
        if (s.back() != ')') throw std::invalid_argument("init: malformed random(...) expression");
        std::size_t modes = 4;
        double amp = 0.01;
        std::string body = s.substr(7, s.size() - 8);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("init: expected key=value in random(...)");
            const std::string key = item.substr(0, eq);
            const std::string val = item.substr(eq + 1);
            if (key == "modes") modes = static_cast<std::size_t>(std::stoul(val));
            else if (key == "amp") amp = std::stod(val);
            else throw std::invalid_argument("init: unknown random(...) key '" + key + "'");
        }
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t m = 1; m <= modes; ++m) {
            const double a = amp * unit(rng);
            const double phase = 2.0 * pi * unit(rng);
            const double k = 2.0 * pi * static_cast<double>(m) / grid.length();
            for (std::size_t j = 0; j < n; ++j)
                vals[j] += a * std::sin(k * grid.node(j) + phase);
        }
        return ScalarField::from_values(grid, std::move(vals));
    }

    // sum of signed terms
    std::size_t i = 0;
    while (i < s.size()) {
        double sign = 1.0;
        if (s[i] == '+') { ++i; }
        else if (s[i] == '-') { sign = -1.0; ++i; }
        std::size_t j = i;
        while (j < s.size() && s[j] != '+' && s[j] != '-') {
            // keep exponent signs like 1e-3 inside the term
            if ((s[j] == 'e' || s[j] == 'E') && j + 1 < s.size() && (s[j + 1] == '+' || s[j + 1] == '-'))
                ++j;
            ++j;
        }
        const std::string term = s.substr(i, j - i);
        i = j;
        if (term.empty()) throw std::invalid_argument("init: empty term");

        double coef = 1.0;
        std::string rest = term;
        const auto star = term.find('*');
        if (star != std::string::npos) {
            coef = std::stod(term.substr(0, star));
            rest = term.substr(star + 1);
        } else if (term.find("sin") == std::string::npos && term.find("cos") == std::string::npos) {
            coef = std::stod(term);
            rest.clear();
        }
        if (rest.empty()) {
            for (std::size_t p = 0; p < n; ++p) vals[p] += sign * coef;
            continue;
        }
        bool is_sin = rest.rfind("sin(", 0) == 0;
        bool is_cos = rest.rfind("cos(", 0) == 0;
        if ((!is_sin && !is_cos) || rest.back() != ')')
            throw std::invalid_argument("init: cannot parse term '" + term + "'");
        std::string arg = rest.substr(4, rest.size() - 5);
        if (!arg.empty() && arg.back() == 'x') arg.pop_back();
        if (arg.empty()) arg = "1";
        const double mode = std::stod(arg);
        const double k = 2.0 * pi * mode / grid.length();
        for (std::size_t p = 0; p < n; ++p) {
            const double ph = k * grid.node(p);
            vals[p] += sign * coef * (is_sin ? std::sin(ph) : std::cos(ph));
        }
    }
    return ScalarField::from_values(grid, std::move(vals));
}

// ---------------------------------------------------------------------------
// Config files: flat "key = value" lines, '#' comments.
// ---------------------------------------------------------------------------

struct LoadedConfig {
    SimConfig config;
    std::vector<std::string> warnings;
};

inline LoadedConfig parse_config(std::istream& in, const std::string& origin) {
    LoadedConfig out;
    SimConfig& c = out.config;
    std::string line;
    std::size_t lineno = 0;

    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) fail("expected 'key = value'");

        auto num = [&](const char* name) {
            try {
                std::size_t used = 0;
                const double v = std::stod(val, &used);
                if (used != val.size()) fail(std::string(name) + ": trailing characters in '" + val + "'");
                return v;
            } catch (const std::invalid_argument&) {
                fail(std::string(name) + ": cannot parse number '" + val + "'");
            }
            return 0.0;
        };
        auto count = [&](const char* name) {
            const double v = num(name);
            if (v < 0.0 || v != std::floor(v)) fail(std::string(name) + ": expected a non-negative integer");
            return static_cast<std::size_t>(v);
        };

        if (key == "sigma") c.params.sigma = num("sigma");
        else if (key == "g_rho") c.params.g_rho = num("g_rho");
        else if (key == "cp0_prefactor") c.params.cp0_prefactor = num("cp0_prefactor");
        else if (key == "gravity_symbol_c") c.params.gravity_symbol_c = num("gravity_symbol_c");
        else if (key == "n") c.n_points = count("n");
        else if (key == "length") c.length = num("length");
        else if (key == "dt") {
            c.dt = num("dt");
            if (!(c.dt > 0.0)) fail("dt must be positive");
        } else if (key == "t_end") {
            c.t_end = num("t_end");
            if (!(c.t_end > 0.0)) fail("t_end must be positive");
        } else if (key == "formulation") {
            if (val == "cp0") c.formulation = Formulation::cp0;
            else if (val == "cp1") c.formulation = Formulation::cp1;
            else if (val == "nf") c.formulation = Formulation::nf;
            else fail("formulation must be cp0 | cp1 | nf");
        } else if (key == "report_every") c.report_every = count("report_every");
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(count("seed"));
        else if (key == "c_stab") c.c_stab = num("c_stab");
        else if (key == "smallness_C") c.smallness_C = num("smallness_C");
        else if (key == "alpha_min") c.quad.alpha_min = num("alpha_min");
        else if (key == "alpha_max") c.quad.alpha_max = num("alpha_max");
        else if (key == "n_alpha") c.quad.n_alpha = count("n_alpha");
        else if (key == "inner_order") c.quad.inner_order = count("inner_order");
        else if (key == "laguerre_order") c.quad.laguerre_order = count("laguerre_order");
        else if (key == "laplace_mode") {
            if (val == "closed_form") c.quad.laplace_mode = LaplaceMode::closed_form;
            else if (val == "gauss_laguerre") c.quad.laplace_mode = LaplaceMode::gauss_laguerre;
            else fail("laplace_mode must be closed_form | gauss_laguerre");
        } else if (key == "init") c.init = val;
        else out.warnings.push_back("unknown key '" + key + "' at " + origin + ":" +
                                    std::to_string(lineno) + " (ignored)");
    }
    c.validate();
    if (c.dt > c.stability_cap() * (1.0 + 1e-12))
        out.warnings.push_back("dt = " + std::to_string(c.dt) + " exceeds the stability cap " +
                               std::to_string(c.stability_cap()) +
                               "; raise c_stab (deliberately) or lower dt before running");
    return out;
}

inline LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

// ---------------------------------------------------------------------------
// Snapshot container (binary, little-endian):
//   magic "MSKT" | u32 version | f64 time | u64 n_points | f64 length |
//   f64 sigma | f64 g_rho | n_points * f64 values | u64 fnv1a of all prior bytes
// ---------------------------------------------------------------------------

struct SnapshotMeta {
    double time = 0.0;
    double sigma = 0.0;
    double g_rho = 0.0;
};

namespace detail {

inline std::uint64_t fnv1a(const unsigned char* data, std::size_t len,
                           std::uint64_t h = 1469598103934665603ull) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

template <typename T>
inline void put(std::string& buf, const T& v) {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(&v);
    buf.append(reinterpret_cast<const char*>(p), sizeof(T));
}

template <typename T>
inline T get(const std::string& buf, std::size_t& off) {
    if (off + sizeof(T) > buf.size()) throw std::runtime_error("snapshot: truncated file");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace detail

inline constexpr std::uint32_t snapshot_version = 1;

inline void save_snapshot(const ScalarField& f, const SnapshotMeta& meta, const std::string& path) {
    std::string buf;
    buf.append("MSKT", 4);
    detail::put(buf, snapshot_version);
    detail::put(buf, meta.time);
    detail::put(buf, static_cast<std::uint64_t>(f.size()));
    detail::put(buf, f.grid().length());
    detail::put(buf, meta.sigma);
    detail::put(buf, meta.g_rho);
    for (double v : f.values()) detail::put(buf, v);
    const std::uint64_t sum =
        detail::fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), buf.size());
    detail::put(buf, sum);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::pair<ScalarField, SnapshotMeta> load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();
    if (buf.size() < 12 || buf.compare(0, 4, "MSKT") != 0)
        throw std::runtime_error("snapshot: bad magic bytes in '" + path + "'");
    std::size_t off = 4;
    const std::uint32_t ver = detail::get<std::uint32_t>(buf, off);
    if (ver != snapshot_version)
        throw std::runtime_error("snapshot: version " + std::to_string(ver) +
                                 " unsupported (this build reads version " +
                                 std::to_string(snapshot_version) + ")");
    SnapshotMeta meta;
    meta.time = detail::get<double>(buf, off);
    const std::uint64_t n = detail::get<std::uint64_t>(buf, off);
    const double length = detail::get<double>(buf, off);
    meta.sigma = detail::get<double>(buf, off);
    meta.g_rho = detail::get<double>(buf, off);
    std::vector<double> vals(n);
    for (std::uint64_t i = 0; i < n; ++i) vals[i] = detail::get<double>(buf, off);
    const std::uint64_t stored = detail::get<std::uint64_t>(buf, off);
    const std::uint64_t computed =
        detail::fnv1a(reinterpret_cast<const unsigned char*>(buf.data()), off - sizeof(std::uint64_t));
    if (stored != computed)
        throw std::runtime_error("snapshot: checksum mismatch in '" + path + "'");
    PeriodicGrid grid(static_cast<std::size_t>(n), length);
    return {ScalarField::from_values(grid, std::move(vals)), meta};
}

// ---------------------------------------------------------------------------
// Time-series output. CSV columns, in order:
//   time,l2,h32,h3,h52,h4,b1_inf_1,lip,smallness,ddt_e,dissip3,dissip32,K_required
// JSON mirrors the same keys per record. Floats carry 17 significant digits.
// ---------------------------------------------------------------------------

enum class SeriesFormat { csv, json };

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const char* timeseries_header() {
    return "time,l2,h32,h3,h52,h4,b1_inf_1,lip,smallness,ddt_e,dissip3,dissip32,K_required";
}

inline void write_timeseries(const Trajectory& traj, const std::string& path, SeriesFormat fmt) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    if (fmt == SeriesFormat::csv) {
        out << timeseries_header() << "\n";
        for (const ReportRow& r : traj.reports) {
            out << format_g17(r.time) << ',' << format_g17(r.norms.l2) << ','
                << format_g17(r.norms.h32) << ',' << format_g17(r.norms.h3) << ','
                << format_g17(r.norms.h52) << ',' << format_g17(r.norms.h4) << ','
                << format_g17(r.norms.b1_inf_1) << ',' << format_g17(r.norms.lip) << ','
                << format_g17(r.norms.smallness) << ',' << format_g17(r.energy.ddt_e) << ','
                << format_g17(r.energy.dissip3) << ',' << format_g17(r.energy.dissip32) << ','
                << format_g17(r.energy.K_required) << "\n";
        }
    } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const ReportRow& r : traj.reports) {
            nlohmann::ordered_json rec;
            rec["time"] = r.time;
            rec["l2"] = r.norms.l2;
            rec["h32"] = r.norms.h32;
            rec["h3"] = r.norms.h3;
            rec["h52"] = r.norms.h52;
            rec["h4"] = r.norms.h4;
            rec["b1_inf_1"] = r.norms.b1_inf_1;
            rec["lip"] = r.norms.lip;
            rec["smallness"] = r.norms.smallness;
            rec["ddt_e"] = r.energy.ddt_e;
            rec["dissip3"] = r.energy.dissip3;
            rec["dissip32"] = r.energy.dissip32;
            rec["K_required"] = r.energy.K_required;
            arr.push_back(std::move(rec));
        }
        out << arr.dump(2) << "\n";
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// Read a CSV time series back into report rows (norms + energy columns only).
inline Trajectory read_timeseries_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("series '" + path + "' is empty");
    if (line != timeseries_header())
        throw std::runtime_error("series '" + path + "': unexpected header");
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> cols;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
        if (cols.size() != 13)
            throw std::runtime_error("series '" + path + "': expected 13 columns");
        ReportRow r;
        r.time = cols[0];
        r.norms.time = cols[0];
        r.norms.l2 = cols[1];
        r.norms.h32 = cols[2];
        r.norms.h3 = cols[3];
        r.norms.h52 = cols[4];
        r.norms.h4 = cols[5];
        r.norms.b1_inf_1 = cols[6];
        r.norms.lip = cols[7];
        r.norms.smallness = cols[8];
        r.energy.ddt_e = cols[9];
        r.energy.dissip3 = cols[10];
        r.energy.dissip32 = cols[11];
        r.energy.K_required = cols[12];
        traj.times.push_back(r.time);
        traj.reports.push_back(std::move(r));
    }
    return traj;
}

} // namespace muskat
