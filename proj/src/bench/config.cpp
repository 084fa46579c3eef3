#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "subdiff/bench.hpp"
#include "subdiff/errors.hpp"

namespace subdiff {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw ValidationError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

double parse_number(const json& v, const std::string& where)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto slash = s.find('/');
        try {
            std::size_t used = 0;
            if (slash == std::string::npos) {
                const double x = std::stod(s, &used);
                if (used == s.size())
                    return x;
            } else {
                const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
                std::size_t u1 = 0, u2 = 0;
                const double a = std::stod(num, &u1), b = std::stod(den, &u2);
                if (u1 == num.size() && u2 == den.size() && b != 0.0)
                    return a / b;
            }
        } catch (const std::exception&) {
        }
    }
    throw ValidationError(where + ": expected a number or a fraction string");
}

template <class T>
std::vector<T> parse_list(const json& v, const std::string& where)
{
    if (!v.is_array() || v.empty())
        throw ValidationError(where + ": expected a non-empty array");
    std::vector<T> out;
    for (const auto& e : v) {
        if constexpr (std::is_same_v<T, int>) {
            if (!e.is_number_integer())
                throw ValidationError(where + ": expected integers");
            out.push_back(e.get<int>());
        } else {
            out.push_back(parse_number(e, where));
        }
    }
    return out;
}

PowerExpansion parse_terms(const json& v, const std::string& where)
{
    if (!v.is_array())
        throw ValidationError(where + ": expected an array of [c, s, beta] triples");
    PowerExpansion e;
    for (const auto& t : v) {
        if (!t.is_array() || t.size() != 3)
            throw ValidationError(where + ": each term must be [c, s, beta]");
        e.terms.push_back({parse_number(t[0], where), parse_number(t[1], where), parse_number(t[2], where)});
    }
    return e;
}

json dump_terms(const PowerExpansion& e)
{
    json a = json::array();
    for (const auto& t : e.terms)
        a.push_back({t.c, t.s, t.beta});
    return a;
}

CustomProblem parse_custom(const json& j)
{
    reject_unknown(j, {"p", "a", "b", "tau", "K", "L", "mode", "history", "f", "G", "solution"}, "problem");
    CustomProblem c;
    if (j.contains("p")) c.p = parse_number(j["p"], "problem.p");
    if (j.contains("a")) c.a = parse_number(j["a"], "problem.a");
    if (j.contains("b")) c.b = parse_number(j["b"], "problem.b");
    if (j.contains("tau")) c.tau = parse_number(j["tau"], "problem.tau");
    if (j.contains("K")) c.K = j["K"].get<int>();
    if (j.contains("L")) c.L = parse_number(j["L"], "problem.L");
    if (j.contains("mode")) c.mode = j["mode"].get<int>();
    if (j.contains("history")) c.history = parse_terms(j["history"], "problem.history");
    if (j.contains("f")) c.f = parse_terms(j["f"], "problem.f");
    if (j.contains("G")) c.G = parse_terms(j["G"], "problem.G");
    if (j.contains("solution")) {
        const json& s = j["solution"];
        reject_unknown(s, {"history", "windows"}, "problem.solution");
        CumulativeSolution sol;
        sol.tau = c.tau;
        if (s.contains("history"))
            sol.history = parse_terms(s["history"], "problem.solution.history");
        if (s.contains("windows"))
            for (const auto& w : s["windows"])
                sol.windows.push_back(parse_terms(w, "problem.solution.windows"));
        c.solution = sol;
        c.history = sol.history;
    }
    const int given = int(c.f.has_value()) + int(c.G.has_value()) + int(c.solution.has_value());
    if (given != 1)
        throw ValidationError("problem: give exactly one of 'f', 'G' or 'solution'");
    if (c.mode < 1)
        throw ValidationError("problem.mode must be >= 1");
    return c;
}

std::string weight_name(WeightPath w)
{
    switch (w) {
    case WeightPath::Uniform: return "uniform";
    case WeightPath::Graded: return "graded";
    default: return "auto";
    }
}

WeightPath parse_weights(const std::string& s)
{
    if (s == "auto") return WeightPath::Auto;
    if (s == "uniform") return WeightPath::Uniform;
    if (s == "graded") return WeightPath::Graded;
    throw ValidationError("weights must be auto, uniform or graded, got '" + s + "'");
}

void apply_keys(RunConfig& cfg, const json& j)
{
    reject_unknown(j, {"preset", "case", "problem", "alpha", "r", "N", "M", "windows", "reference", "source",
                       "weights", "threads", "full", "slices"},
                   "config");
    if (j.contains("case"))
        cfg.case_id = parse_case(j["case"].get<std::string>());
    if (j.contains("problem")) {
        cfg.custom = parse_custom(j["problem"]);
        cfg.case_id = CaseId::Custom;
    }
    if (j.contains("alpha"))
        cfg.alphas = parse_list<double>(j["alpha"], "alpha");
    if (j.contains("r")) {
        if (!j["r"].is_array() || j["r"].empty())
            throw ValidationError("r: expected a non-empty array");
        cfg.rs.clear();
        for (const auto& e : j["r"]) {
            GradingEntry g;
            if (e.is_string() && e.get<std::string>() == "1/alpha")
                g.inverse_alpha = true;
            else
                g.value = parse_number(e, "r");
            cfg.rs.push_back(g);
        }
    }
    if (j.contains("N"))
        cfg.Ns = parse_list<int>(j["N"], "N");
    if (j.contains("M"))
        cfg.Ms = parse_list<int>(j["M"], "M");
    if (j.contains("windows")) {
        if (!j["windows"].is_array() || j["windows"].empty())
            throw ValidationError("windows: expected a non-empty array of [k, l] pairs");
        cfg.windows.clear();
        for (const auto& w : j["windows"]) {
            if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer())
                throw ValidationError("windows: each entry must be [k, l]");
            cfg.windows.push_back({w[0].get<int>(), w[1].get<int>()});
        }
    }
    if (j.contains("reference")) {
        const json& r = j["reference"];
        reject_unknown(r, {"time_factor", "space_factor", "truth"}, "reference");
        if (r.contains("time_factor")) cfg.reference.time_factor = r["time_factor"].get<int>();
        if (r.contains("space_factor")) cfg.reference.space_factor = r["space_factor"].get<int>();
        if (r.contains("truth")) cfg.reference.truth = r["truth"].get<std::string>();
    }
    if (j.contains("source"))
        cfg.source = parse_source(j["source"].get<std::string>());
    if (j.contains("weights"))
        cfg.weights = parse_weights(j["weights"].get<std::string>());
    if (j.contains("threads"))
        cfg.threads = j["threads"].get<int>();
    if (j.contains("full"))
        cfg.full = j["full"].get<bool>();
    if (j.contains("slices")) {
        const json& s = j["slices"];
        reject_unknown(s, {"times", "x"}, "slices");
        if (s.contains("times")) cfg.slices.times = parse_list<double>(s["times"], "slices.times");
        if (s.contains("x")) cfg.slices.x = parse_list<double>(s["x"], "slices.x");
    }
}

bool power_of_two(int v)
{
    return v > 0 && (v & (v - 1)) == 0;
}

} // namespace

std::string case_name(CaseId id)
{
    switch (id) {
    case CaseId::Example1Case1: return "example1-case1";
    case CaseId::Example1Case2: return "example1-case2";
    default: return "custom";
    }
}

CaseId parse_case(const std::string& name)
{
    if (name == "example1-case1") return CaseId::Example1Case1;
    if (name == "example1-case2") return CaseId::Example1Case2;
    if (name == "custom") return CaseId::Custom;
    throw ValidationError("unknown case '" + name + "'");
}

SourceMode parse_source(const std::string& name)
{
    if (name == "auto") return SourceMode::Auto;
    if (name == "closed-g") return SourceMode::ClosedG;
    if (name == "closed-f") return SourceMode::ClosedF;
    if (name == "sampled-f") return SourceMode::SampledF;
    throw ValidationError("source must be auto, closed-g, closed-f or sampled-f, got '" + name + "'");
}

std::string source_name(SourceMode mode)
{
    switch (mode) {
    case SourceMode::ClosedG: return "closed-g";
    case SourceMode::ClosedF: return "closed-f";
    case SourceMode::SampledF: return "sampled-f";
    default: return "auto";
    }
}

void RunConfig::validate() const
{
    if (case_id == CaseId::Custom && !custom)
        throw ValidationError("custom case needs a 'problem' block");
    const int K = case_id == CaseId::Custom ? custom->K : 3;
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0))
            throw ValidationError("alpha values must lie in (0,1)");
    for (const auto& g : rs)
        if (!g.inverse_alpha && !(g.value >= 1.0))
            throw ValidationError("r values must be >= 1");
    for (int n : Ns)
        if (n < 2)
            throw ValidationError("N values must be >= 2");
    for (int m : Ms)
        if (m < 2)
            throw ValidationError("M values must be >= 2");
    for (std::size_t i = 1; i < Ns.size(); ++i)
        if (Ns[i] != 2 * Ns[i - 1])
            throw ValidationError("N ladder must be strictly doubling");
    for (std::size_t i = 1; i < Ms.size(); ++i)
        if (Ms[i] != 2 * Ms[i - 1])
            throw ValidationError("M ladder must be strictly doubling");
    for (const auto& w : windows)
        if (w.k < 0 || w.k > w.l || w.l > K || w.l < 1)
            throw ValidationError("window pairs need 0 <= k <= l <= K (k == l selects one level)");
    if (!power_of_two(reference.time_factor) || reference.time_factor < 4)
        throw ValidationError("reference.time_factor must be a power of two >= 4");
    if (!power_of_two(reference.space_factor) || reference.space_factor < 2)
        throw ValidationError("reference.space_factor must be a power of two >= 2");
    if (reference.truth != "auto" && reference.truth != "exact" && reference.truth != "reference")
        throw ValidationError("reference.truth must be auto, exact or reference");
    if (threads < 0)
        throw ValidationError("threads must be >= 0");
}

std::string RunConfig::canonical_json() const
{
    json j;
    j["case"] = case_name(case_id);
    j["alpha"] = alphas;
    json r = json::array();
    for (const auto& g : rs)
        r.push_back(g.inverse_alpha ? json("1/alpha") : json(g.value));
    j["r"] = r;
    j["N"] = Ns;
    j["M"] = Ms;
    json w = json::array();
    for (const auto& p : windows)
        w.push_back({p.k, p.l});
    j["windows"] = w;
    j["reference"] = {{"time_factor", reference.time_factor},
                      {"space_factor", reference.space_factor},
                      {"truth", reference.truth}};
    j["source"] = source_name(source);
    j["weights"] = weight_name(weights);
    if (custom) {
        json c{{"p", custom->p}, {"a", custom->a}, {"b", custom->b}, {"tau", custom->tau},
               {"K", custom->K}, {"L", custom->L}, {"mode", custom->mode},
               {"history", dump_terms(custom->history)}};
        if (custom->f) c["f"] = dump_terms(*custom->f);
        if (custom->G) c["G"] = dump_terms(*custom->G);
        if (custom->solution) {
            json ws = json::array();
            for (const auto& e : custom->solution->windows)
                ws.push_back(dump_terms(e));
            c["solution"] = {{"history", dump_terms(custom->solution->history)}, {"windows", ws}};
        }
        j["problem"] = c;
    }
    return j.dump();
}

std::uint64_t RunConfig::hash() const
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical_json()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig preset(const std::string& name, bool full)
{
    RunConfig c;
    auto grading = [](std::initializer_list<double> v) {
        std::vector<GradingEntry> out;
        for (double x : v)
            out.push_back({x, false});
        return out;
    };
    const std::vector<GradingEntry> inverse{{1.0, true}};
    if (name == "table1") {
        c.alphas = {0.5, 0.7};
        c.Ns = {200, 400, 800, 1600};
        c.Ms = {1000};
        c.windows = {{0, 1}, {1, 3}};
    } else if (name == "table2") {
        c.alphas = {0.5, 0.6, 0.8};
        c.Ns = {full ? 5000 : 2000};
        c.Ms = {8, 16, 32, 64};
        c.windows = {{3, 3}};
    } else if (name == "table3") {
        c.alphas = {0.5};
        c.rs = grading({4.0 / 3.0, 5.0 / 3.0, 2.0, 3.0});
        c.Ns = full ? std::vector<int>{400, 800, 1600, 3200} : std::vector<int>{400, 800, 1600};
        c.Ms = {1000};
        c.windows = {{0, 3}};
    } else if (name == "table4") {
        c.alphas = {0.7};
        c.rs = grading({8.0 / 7.0, 10.0 / 7.0, 15.0 / 7.0, 3.0});
        c.Ns = full ? std::vector<int>{400, 800, 1600, 3200} : std::vector<int>{400, 800, 1600};
        c.Ms = {1000};
        c.windows = {{0, 3}};
    } else if (name == "table5") {
        c.case_id = CaseId::Example1Case2;
        c.alphas = {0.6, 0.8};
        c.Ns = full ? std::vector<int>{400, 800, 1600, 3200} : std::vector<int>{100, 200, 400};
        c.Ms = {16};
        c.windows = {{0, 1}, {1, 3}};
    } else if (name == "table6") {
        c.alphas = {0.4, 0.6, 0.8};
        c.rs = inverse;
        c.Ns = {full ? 5000 : 2000};
        c.Ms = {8, 16, 32, 64};
        c.windows = {{0, 3}};
    } else if (name == "table7") {
        c.case_id = CaseId::Example1Case2;
        c.alphas = {0.6};
        c.rs = grading({4.0 / 3.0, 5.0 / 3.0, 2.0, 7.0 / 3.0});
        c.Ns = full ? std::vector<int>{200, 400, 800, 1600} : std::vector<int>{100, 200, 400};
        c.Ms = {16};
        c.windows = {{0, 3}};
    } else if (name == "table8") {
        c.case_id = CaseId::Example1Case2;
        c.alphas = {0.4, 0.5, 0.6, 0.7};
        c.rs = inverse;
        c.Ns = {full ? 5000 : 200};
        c.Ms = {8, 16, 32, 64};
        c.windows = {{0, 3}};
    } else if (name == "figure1") {
        c.case_id = CaseId::Example1Case2;
        c.alphas = {0.3};
        c.Ns = {10};
        c.Ms = {40};
        c.slices.times = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
        c.slices.x = {0.5};
    } else {
        throw ValidationError("unknown preset '" + name + "'");
    }
    c.full = full;
    return c;
}

RunConfig parse_run_config(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ValidationError("config: top level must be an object");
    RunConfig cfg;
    try {
        bool full = j.contains("full") && j["full"].is_boolean() && j["full"].get<bool>();
        if (j.contains("preset"))
            cfg = preset(j["preset"].get<std::string>(), full);
        apply_keys(cfg, j);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

} // namespace subdiff
