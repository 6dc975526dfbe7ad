#include "liouville/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville {

std::string format_double(double v) {
    char buf[40];
    auto short_form = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, short_form.ptr);
    // Count significant digits of the shortest round-trip form; widen to
    // scientific with 17 significant digits when it falls below 15.
    int digits = 0;
    for (char ch : s)
        if (ch >= '0' && ch <= '9') ++digits;
    if (digits < 15 && std::isfinite(v) && v != 0.0) {
        auto wide = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
        s.assign(buf, wide.ptr);
    }
    return s;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw IoError("write failed for " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

namespace {

void write_grid_csv(const std::string& path, const Vec& grid, const std::vector<Vec>& a,
                    const std::vector<Vec>& b, const char* aname, const char* bname) {
    const int n = static_cast<int>(a.size());
    std::ostringstream os;
    os << "t,r";
    for (int i = 1; i <= n; ++i) os << "," << aname << "_" << i;
    for (int i = 1; i <= n; ++i) os << "," << bname << "_" << i;
    os << "\n";
    for (size_t k = 0; k < grid.size(); ++k) {
        os << format_double(grid[k]) << "," << format_double(std::exp(grid[k]));
        for (int i = 0; i < n; ++i) os << "," << format_double(a[i][k]);
        for (int i = 0; i < n; ++i) os << "," << format_double(b[i][k]);
        os << "\n";
    }
    write_text(path, os.str());
}

} // namespace

void write_profile_csv(const std::string& path, const RadialProfile& p) {
    write_grid_csv(path, p.grid, p.u, p.du, "u", "rdu");
}

void write_linearized_csv(const std::string& path, const LinearizedProfile& lp) {
    write_grid_csv(path, lp.grid, lp.phi, lp.dphi, "phi", "rdphi");
}

CsvProfile read_profile_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty profile CSV " + path);
    int cols = 1;
    for (char ch : line)
        if (ch == ',') ++cols;
    if (cols < 4 || (cols - 2) % 2 != 0)
        throw IoError("unexpected column count in " + path);
    const int n = (cols - 2) / 2;

    CsvProfile out;
    out.u.assign(n, Vec{});
    out.du.assign(n, Vec{});
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        Vec row;
        while (std::getline(ls, cell, ',')) {
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc()) throw IoError("bad number '" + cell + "' in " + path);
            row.push_back(v);
        }
        if (static_cast<int>(row.size()) != cols)
            throw IoError("ragged row in " + path);
        out.grid.push_back(row[0]);
        for (int i = 0; i < n; ++i) {
            out.u[i].push_back(row[2 + i]);
            out.du[i].push_back(row[2 + n + i]);
        }
    }
    if (out.grid.size() < 2) throw IoError("profile CSV has fewer than two rows");
    return out;
}

RadialProfile assemble_profile(const ProblemSpec& spec, const Vec& c0, CsvProfile&& data) {
    RadialProfile p;
    p.coupling = spec.a;
    p.beta = spec.beta;
    p.c0 = c0;
    p.grid = std::move(data.grid);
    p.u = std::move(data.u);
    p.du = std::move(data.du);
    p.tol_step = spec.tol_step;
    p.tol_energy = spec.tol_energy;
    p.converged = false;
    return p;
}

namespace {

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

} // namespace

Json profile_report(const RadialProfile& p) {
    Json r;
    r["converged"] = p.converged;
    r["sigma"] = vec_json(p.sigma.sigma);
    r["m"] = vec_json(p.m);
    r["c_const"] = vec_json(p.c_const);
    r["lambda_I_residual"] = p.diag.lambda_i_residual;
    Json lj = Json::object();
    for (const auto& [sub, val] : p.diag.lambda_js) lj[subset_to_string(sub)] = val;
    r["lambda_J"] = lj;
    r["tail_exponent_estimate"] = p.diag.tail_exponent_estimate;
    r["energy_cross_residual"] = vec_json(p.diag.energy_cross_residual);
    r["tail_energy"] = vec_json(p.diag.tail_energy);
    r["c_const_integral"] = vec_json(p.diag.c_const_integral);
    r["grid_points"] = p.grid.size();
    r["t_start"] = p.grid.empty() ? 0.0 : p.t_front();
    r["t_end"] = p.grid.empty() ? 0.0 : p.t_back();
    r["start_contraction"] = p.diag.contraction;
    r["start_error_bound"] = p.diag.start_error_bound;
    r["steps"] = p.diag.steps;
    return r;
}

Json shooting_report(const ShootingResult& s) {
    Json r;
    r["converged"] = s.converged;
    r["c"] = vec_json(s.c.c);
    r["target"] = vec_json(s.target.sigma);
    r["achieved"] = vec_json(s.achieved.sigma);
    r["iterations"] = s.iterations;
    r["condition_M"] = s.condition;
    r["boundary_warning"] = s.boundary_warning;
    r["fnorm_history"] = vec_json(s.fnorm_history);
    r["profile"] = profile_report(s.profile);
    return r;
}

Json jacobian_report(const JacobianResult& j) {
    Json r;
    const int m = j.m.size();
    Json rows = Json::array();
    for (int i = 0; i < m; ++i) {
        Json row = Json::array();
        for (int k = 0; k < m; ++k) row.push_back(j.m(i, k));
        rows.push_back(row);
    }
    r["M"] = rows;
    Json sens = Json::array();
    for (const auto& row : j.sensitivity) sens.push_back(vec_json(row));
    r["sensitivity"] = sens;
    r["smallest_singular_value"] = j.smallest_singular_value;
    r["condition_M"] = j.condition;
    return r;
}

} // namespace liouville
