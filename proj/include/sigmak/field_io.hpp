#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigmak/mu_construct.hpp"
#include "sigmak/nonlinear.hpp"

namespace sigmak {

/// Malformed or inconsistent on-disk data (CSV shape, value syntax,
/// mismatch against the configuration). The CLI maps this to exit 65.
class data_format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

/// Field CSV: header x1..xn,xt1..xtn,w,u,residual, then one row per node
/// in row-major node order. 17 significant digits, enough to reproduce
/// every binary64 value exactly on read-back.
inline void write_field_csv(std::ostream& out, const SolverConfig& cfg, const ScalarField& w,
                            const ScalarField& u, const ScalarField& residual) {
    const GridSpec& g = cfg.grid;
    for (int a = 1; a <= g.n; ++a) out << "x" << a << ",";
    for (int a = 1; a <= g.n; ++a) out << "xt" << a << ",";
    out << "w,u,residual\n";
    const double eps2 = cfg.epsilon * cfg.epsilon;
    for (std::int64_t node = 0; node < w.size(); ++node) {
        const std::array<int, 3> idx = g.decode(node);
        for (int a = 0; a < g.n; ++a)
            out << detail::fmt17(g.coord(idx[static_cast<std::size_t>(a)])) << ",";
        for (int a = 0; a < g.n; ++a)
            out << detail::fmt17(eps2 * g.coord(idx[static_cast<std::size_t>(a)])) << ",";
        out << detail::fmt17(w[node]) << "," << detail::fmt17(u[node]) << ","
            << detail::fmt17(residual[node]) << "\n";
    }
}

inline void write_field_csv(const std::string& path, const SolverConfig& cfg,
                            const ScalarField& w, const ScalarField& u,
                            const ScalarField& residual) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_field_csv(out, cfg, w, u, residual);
}

struct FieldCsv {
    int n = 0;
    std::vector<double> x;   // solver coords, n per row
    std::vector<double> xt;  // physical coords, n per row
    std::vector<double> w;
    std::vector<double> u;
    std::vector<double> residual;
    [[nodiscard]] std::int64_t rows() const { return static_cast<std::int64_t>(w.size()); }
};

inline FieldCsv read_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw data_format_error("field CSV: missing header");
    int cols = 1;
    for (char c : line) cols += (c == ',');
    const int n = (cols - 3) / 2;
    if (n < 2 || n > 3 || cols != 2 * n + 3)
        throw data_format_error("field CSV: header must be x1..xn,xt1..xtn,w,u,residual");

    FieldCsv f;
    f.n = n;
    std::size_t line_no = 1;
    std::vector<double> row(static_cast<std::size_t>(cols));
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t start = 0;
        for (int c = 0; c < cols; ++c) {
            std::size_t end = line.find(',', start);
            const bool last = (c == cols - 1);
            if (last != (end == std::string::npos))
                throw data_format_error("field CSV: wrong column count on line " +
                                        std::to_string(line_no));
            if (end == std::string::npos) end = line.size();
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, v);
            if (ec != std::errc() || ptr != line.data() + end)
                throw data_format_error("field CSV: bad number on line " +
                                        std::to_string(line_no));
            row[static_cast<std::size_t>(c)] = v;
            start = end + 1;
        }
        for (int a = 0; a < n; ++a) f.x.push_back(row[static_cast<std::size_t>(a)]);
        for (int a = 0; a < n; ++a) f.xt.push_back(row[static_cast<std::size_t>(n + a)]);
        f.w.push_back(row[static_cast<std::size_t>(2 * n)]);
        f.u.push_back(row[static_cast<std::size_t>(2 * n + 1)]);
        f.residual.push_back(row[static_cast<std::size_t>(2 * n + 2)]);
    }
    if (f.rows() == 0) throw data_format_error("field CSV: no data rows");
    return f;
}

inline FieldCsv read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_format_error("cannot open '" + path + "'");
    return read_field_csv(in);
}

/// Rebuild the u samples from a CSV against a configuration, checking
/// that the file actually matches it: node count, solver coordinates and
/// the eps^2 scaling of the physical coordinates.
[[nodiscard]] inline ScalarField field_from_csv(const FieldCsv& f, const SolverConfig& cfg) {
    const GridSpec& g = cfg.grid;
    if (f.n != g.n) throw data_format_error("field CSV: dimension differs from the configuration");
    if (f.rows() != g.node_count())
        throw data_format_error("field CSV: expected " + std::to_string(g.node_count()) +
                                " rows for G=" + std::to_string(g.G) + ", found " +
                                std::to_string(f.rows()));
    const double eps2 = cfg.epsilon * cfg.epsilon;
    ScalarField u(g);
    for (std::int64_t node = 0; node < g.node_count(); ++node) {
        const std::array<int, 3> idx = g.decode(node);
        for (int a = 0; a < g.n; ++a) {
            const double want = g.coord(idx[static_cast<std::size_t>(a)]);
            const double got = f.x[static_cast<std::size_t>(node * g.n + a)];
            if (std::fabs(got - want) > 1e-12)
                throw data_format_error("field CSV: node coordinates do not match the grid");
            const double want_t = eps2 * want;
            const double got_t = f.xt[static_cast<std::size_t>(node * g.n + a)];
            if (std::fabs(got_t - want_t) > 1e-12 * (1.0 + std::fabs(want_t)))
                throw data_format_error(
                    "field CSV: physical coordinates do not match epsilon^2 * x");
        }
        u[node] = f.u[static_cast<std::size_t>(node)];
    }
    return u;
}

inline nlohmann::json mu_to_json(const MuVector& v) {
    return nlohmann::json{{"n", v.n}, {"k", v.k}, {"M", v.M}, {"mu", v.mu}, {"margin", v.margin}};
}

inline nlohmann::json validation_to_json(const MuValidation& r) {
    return nlohmann::json{{"sigma_error", r.sigma_error}, {"margin", r.margin}, {"pass", r.pass}};
}

inline nlohmann::json report_to_json(const SolveReport& r) {
    nlohmann::json j{{"epsilon", r.epsilon},
                     {"iterations", r.iterations},
                     {"residual_history", r.residual_history},
                     {"converged", r.converged},
                     {"final_w_maxnorm", r.final_w_maxnorm}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

/// The solve configuration as it appears in a JSON config file. Unknown
/// keys are rejected rather than ignored.
struct RunConfig {
    int n = 0;
    int k = 0;
    std::string mode;
    std::string psi;
    double epsilon = 0.1;
    int grid = 21;
    int max_iter = 50;
    double tol = 1e-9;
    std::string out_field = "field.csv";
    std::string out_report = "report.json";
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    static const char* known[] = {"n",        "k",   "mode",      "psi",       "epsilon",
                                  "grid",     "max_iter", "tol", "out_field", "out_report"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* name : known) ok = ok || key == name;
        if (!ok) throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    RunConfig c;
    try {
        c.n = j.at("n").get<int>();
        c.k = j.at("k").get<int>();
        c.mode = j.at("mode").get<std::string>();
        c.psi = j.at("psi").get<std::string>();
        if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
        if (j.contains("grid")) c.grid = j.at("grid").get<int>();
        if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
        if (j.contains("tol")) c.tol = j.at("tol").get<double>();
        if (j.contains("out_field")) c.out_field = j.at("out_field").get<std::string>();
        if (j.contains("out_report")) c.out_report = j.at("out_report").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return c;
}

}  // namespace sigmak
