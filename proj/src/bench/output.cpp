#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "subdiff/bench.hpp"
#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

std::string sci5(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

std::string plain(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError("failed writing " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep))
        out.push_back(cur);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

} // namespace

ErrorTable sorted(const ErrorTable& t)
{
    ErrorTable s = t;
    std::stable_sort(s.rows.begin(), s.rows.end(), [](const ErrorRow& x, const ErrorRow& y) {
        return std::tie(x.alpha, x.r, x.N, x.M, x.k, x.l) < std::tie(y.alpha, y.r, y.N, y.M, y.k, y.l);
    });
    return s;
}

std::string format_csv(const ErrorTable& table)
{
    std::ostringstream os;
    os << "case,alpha,r,M,N,k,l,E,rate\n";
    for (const auto& row : sorted(table).rows) {
        os << row.case_name << ',' << plain(row.alpha) << ',' << plain(row.r) << ',' << row.M << ',' << row.N
           << ',' << row.k << ',' << row.l << ',' << sci5(row.E) << ',';
        if (row.rate)
            os << plain(*row.rate);
        os << '\n';
    }
    return os.str();
}

void emit_csv(const ErrorTable& table, const std::filesystem::path& path)
{
    write_file(path, format_csv(table));
}

ErrorTable parse_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "case,alpha,r,M,N,k,l,E,rate")
        throw ValidationError("csv: unexpected header");
    ErrorTable t;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 9)
            throw ValidationError("csv: expected 9 fields in '" + line + "'");
        ErrorRow r;
        try {
            r.case_name = f[0];
            r.alpha = std::stod(f[1]);
            r.r = std::stod(f[2]);
            r.M = std::stoi(f[3]);
            r.N = std::stoi(f[4]);
            r.k = std::stoi(f[5]);
            r.l = std::stoi(f[6]);
            r.E = std::stod(f[7]);
            if (!f[8].empty())
                r.rate = std::stod(f[8]);
        } catch (const std::exception&) {
            throw ValidationError("csv: malformed row '" + line + "'");
        }
        t.case_name = r.case_name;
        t.rows.push_back(r);
    }
    return t;
}

void emit_metadata(const ErrorTable& table, const RunConfig& cfg, const std::filesystem::path& path)
{
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(table.spec_hash));
    nlohmann::json j;
    j["case"] = table.case_name;
    j["spec_hash"] = hash;
    j["timestamp"] = table.timestamp;
    j["config"] = nlohmann::json::parse(cfg.canonical_json());
    write_file(path, j.dump(2) + "\n");
}

void emit_verify(const VerifyReport& report, const std::filesystem::path& dir)
{
    std::ostringstream txt, csv;
    csv << "check,value,threshold,pass\n";
    for (const auto& e : report.entries) {
        txt << (e.pass ? "[PASS] " : "[FAIL] ") << e.name << ": " << sci5(e.value) << " (limit "
            << sci5(e.threshold) << ") " << e.detail << '\n';
        std::string name = e.name;
        std::replace(name.begin(), name.end(), ',', ';');
        csv << name << ',' << sci5(e.value) << ',' << sci5(e.threshold) << ',' << (e.pass ? 1 : 0) << '\n';
    }
    txt << (report.all_pass() ? "all checks passed\n" : "some checks failed\n");
    write_file(dir / "verify_report.txt", txt.str());
    write_file(dir / "verify.csv", csv.str());
}

void emit_solution_slices(const SolveRecord& record, std::span<const double> times, std::span<const double> xs,
                          const std::filesystem::path& path)
{
    const TemporalMesh& tm = record.tmesh;
    const SpatialMesh& sm = record.smesh;
    std::ostringstream os;
    os << "t,x,u\n";
    for (double t : times) {
        if (t < tm.t(tm.first_level()) || t > tm.t(tm.last_level()))
            throw ValidationError("slice time " + std::to_string(t) + " is outside the mesh");
        const auto pts = tm.points();
        const auto it = std::lower_bound(pts.begin(), pts.end(), t);
        std::size_t idx = static_cast<std::size_t>(it - pts.begin());
        if (idx == pts.size())
            idx = pts.size() - 1;
        else if (idx > 0 && t - pts[idx - 1] <= pts[idx] - t)
            idx -= 1;
        const int n = static_cast<int>(idx) + tm.first_level();
        auto u = record.level(n);
        for (double x : xs) {
            if (x < 0.0 || x > sm.L)
                throw ValidationError("slice x " + std::to_string(x) + " is outside the domain");
            const double s = x / sm.h;
            const int j = std::min(static_cast<int>(std::floor(s)), sm.M - 1);
            const double frac = s - j;
            auto nodal = [&](int node) { return node <= 0 || node >= sm.M ? 0.0 : u[static_cast<std::size_t>(node - 1)]; };
            const double val = frac == 0.0 ? nodal(j) : (1.0 - frac) * nodal(j) + frac * nodal(j + 1);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", val);
            os << plain(tm.t(n)) << ',' << plain(x) << ',' << buf << '\n';
        }
    }
    write_file(path, os.str());
}

} // namespace subdiff
