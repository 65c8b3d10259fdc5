#include "hopfreeb/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "hopfreeb/autgroup.hpp"
#include "hopfreeb/classify.hpp"
#include "hopfreeb/error.hpp"
#include "hopfreeb/funceq.hpp"

namespace hopfreeb {

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::ConfigError, path + ": " + what);
}

void reject_unknown(const ojson& obj, const std::vector<std::string>& known, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            config_fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
        }
    }
}

const ojson* field(const ojson& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double read_double(const ojson& obj, const char* key, double def, const std::string& path) {
    const ojson* f = field(obj, key);
    if (!f) return def;
    if (!f->is_number()) config_fail(path + "." + key, "expected a number");
    return f->get<double>();
}

int read_int(const ojson& obj, const char* key, int def, const std::string& path) {
    const ojson* f = field(obj, key);
    if (!f) return def;
    if (!f->is_number_integer()) config_fail(path + "." + key, "expected an integer");
    return f->get<int>();
}

std::string read_string(const ojson& obj, const char* key, const std::string& def, const std::string& path) {
    const ojson* f = field(obj, key);
    if (!f) return def;
    if (!f->is_string()) config_fail(path + "." + key, "expected a string");
    return f->get<std::string>();
}

std::array<std::string, 2> read_rational_pair(const ojson& obj, const char* key, std::array<std::string, 2> def,
                                              const std::string& path) {
    const ojson* f = field(obj, key);
    if (!f) return def;
    const std::string where = path + "." + key;
    if (!f->is_array() || f->size() != 2 || !(*f)[0].is_string() || !(*f)[1].is_string()) {
        config_fail(where, "expected [\"re\", \"im\"] rational strings");
    }
    std::array<std::string, 2> out{(*f)[0].get<std::string>(), (*f)[1].get<std::string>()};
    try {
        ComplexRational::parse(out[0], out[1]);
    } catch (const Error& e) {
        config_fail(where, e.what());
    }
    return out;
}

double component(const ojson& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return ComplexRational::parse(v.get<std::string>(), "0").to_complex().real();
        } catch (const Error& e) {
            config_fail(where, e.what());
        }
    }
    config_fail(where, "expected a number or rational string");
}

cplx read_complex(const ojson& obj, const char* key, cplx def, const std::string& path) {
    const ojson* f = field(obj, key);
    if (!f) return def;
    const std::string where = path + "." + key;
    if (f->is_number() || f->is_string()) return component(*f, where);
    if (!f->is_array() || f->size() != 2) config_fail(where, "expected [re, im]");
    return {component((*f)[0], where + "[0]"), component((*f)[1], where + "[1]")};
}

PeriodicSeed read_seed(const ojson& v, const std::string& where) {
    if (!v.is_array()) config_fail(where, "expected a list of [frequency, re, im] terms");
    std::vector<PeriodicSeed::Term> terms;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const ojson& t = v[i];
        const std::string w = where + "[" + std::to_string(i) + "]";
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer()) config_fail(w, "expected [k, re, im]");
        terms.emplace_back(t[0].get<int>(), cplx(component(t[1], w), component(t[2], w)));
    }
    return PeriodicSeed(std::move(terms));
}

PeriodicSeed read_seed_field(const ojson& obj, const char* key, const PeriodicSeed& def, const std::string& path) {
    const ojson* f = field(obj, key);
    return f ? read_seed(*f, path + "." + key) : def;
}

std::vector<std::optional<PeriodicSeed>> read_seed_list(const ojson& obj, const char* key, const std::string& path) {
    std::vector<std::optional<PeriodicSeed>> out;
    const ojson* f = field(obj, key);
    if (!f) return out;
    if (!f->is_array()) config_fail(path + "." + key, "expected a list of seeds");
    for (std::size_t i = 0; i < f->size(); ++i) {
        const ojson& s = (*f)[i];
        if (s.is_null()) out.emplace_back();
        else out.emplace_back(read_seed(s, path + "." + key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ResidualStat make_stat(const std::string& name, const std::vector<double>& values, double threshold) {
    ResidualStat s;
    s.name = name;
    s.threshold = threshold;
    for (double v : values) s.max = std::max(s.max, v);
    s.median = median(values);
    return s;
}

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson status_json(const CoeffSlot& slot, const CoeffStatus& st) {
    ojson j;
    j["j"] = slot.j;
    j["k"] = slot.k;
    j["l"] = slot.l;
    j["q"] = slot.q;
    j["r"] = slot.r;
    j["status"] = to_string(st.kind);
    if (st.kind == CoeffStatus::Kind::ForcedConstant) j["value"] = st.value;
    if (st.survives()) {
        j["nu"] = st.nu_exact ? ojson(st.nu_exact->to_string()) : complex_json(st.nu);
    }
    if (st.kind == CoeffStatus::Kind::CoupledS) {
        ojson partners = ojson::array();
        for (std::size_t i = 0; i < st.partners.size(); ++i) {
            ojson pj;
            pj["slot"] = st.partners[i].to_string();
            pj["c"] = i < st.constants_exact.size() ? ojson(st.constants_exact[i].to_string()) : complex_json(st.constants[i]);
            partners.push_back(pj);
        }
        j["partners"] = partners;
        j["exponent"] = st.exponent;
    }
    j["text"] = st.to_string();
    return j;
}

} // namespace

// ---------------------------------------------------------------------------
// Configuration

ojson RunConfig::to_json() const {
    ojson j;
    j["hopf"] = {{"lambda", hopf.lambda}, {"mu", hopf.mu}, {"tau", hopf.tau}, {"p", hopf.p}};
    j["holonomy"] = {{"family", holonomy.family}, {"c", holonomy.c},       {"a", holonomy.a},
                     {"x0", holonomy.x0},         {"x_max", holonomy.x_max}, {"k_match", holonomy.k_match}};
    j["task"] = task;
    j["thresholds"] = {{"functional", thresholds.functional},
                       {"group", thresholds.group},
                       {"composition", thresholds.composition},
                       {"boundary", thresholds.boundary}};
    j["seed"] = seed;
    j["out"] = out;
    return j;
}

RunConfig RunConfig::from_json(const ojson& j) {
    if (!j.is_object()) config_fail("(root)", "expected a JSON object");
    reject_unknown(j, {"hopf", "holonomy", "task", "thresholds", "seed", "out"}, "");
    RunConfig c;
    if (const ojson* h = field(j, "hopf")) {
        if (!h->is_object()) config_fail("hopf", "expected an object");
        reject_unknown(*h, {"lambda", "mu", "tau", "p"}, "hopf");
        c.hopf.lambda = read_rational_pair(*h, "lambda", c.hopf.lambda, "hopf");
        c.hopf.mu = read_rational_pair(*h, "mu", c.hopf.mu, "hopf");
        c.hopf.tau = read_rational_pair(*h, "tau", c.hopf.tau, "hopf");
        c.hopf.p = read_int(*h, "p", c.hopf.p, "hopf");
    }
    if (const ojson* h = field(j, "holonomy")) {
        if (!h->is_object()) config_fail("holonomy", "expected an object");
        reject_unknown(*h, {"family", "c", "a", "x0", "x_max", "k_match"}, "holonomy");
        c.holonomy.family = read_string(*h, "family", c.holonomy.family, "holonomy");
        c.holonomy.c = read_double(*h, "c", c.holonomy.c, "holonomy");
        c.holonomy.a = read_double(*h, "a", c.holonomy.a, "holonomy");
        c.holonomy.x0 = read_double(*h, "x0", c.holonomy.x0, "holonomy");
        c.holonomy.x_max = read_double(*h, "x_max", c.holonomy.x_max, "holonomy");
        c.holonomy.k_match = read_int(*h, "k_match", c.holonomy.k_match, "holonomy");
        if (c.holonomy.family != HolonomyMap::kFamily) config_fail("holonomy.family", "unsupported family");
    }
    if (const ojson* t = field(j, "task")) {
        if (!t->is_object()) config_fail("task", "expected an object");
        c.task = *t;
    }
    if (const ojson* t = field(j, "thresholds")) {
        if (!t->is_object()) config_fail("thresholds", "expected an object");
        reject_unknown(*t, {"functional", "group", "composition", "boundary"}, "thresholds");
        c.thresholds.functional = read_double(*t, "functional", c.thresholds.functional, "thresholds");
        c.thresholds.group = read_double(*t, "group", c.thresholds.group, "thresholds");
        c.thresholds.composition = read_double(*t, "composition", c.thresholds.composition, "thresholds");
        c.thresholds.boundary = read_double(*t, "boundary", c.thresholds.boundary, "thresholds");
        for (double v : {c.thresholds.functional, c.thresholds.group, c.thresholds.composition, c.thresholds.boundary}) {
            if (!(v > 0.0)) config_fail("thresholds", "all thresholds must be positive");
        }
    }
    if (const ojson* s = field(j, "seed")) {
        if (!s->is_number_unsigned()) config_fail("seed", "expected a nonnegative integer");
        c.seed = s->get<std::uint64_t>();
    }
    c.out = read_string(j, "out", c.out, "");
    return c;
}

RunConfig parse_config(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    return RunConfig::from_json(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

HopfParams make_params(const HopfBlock& b) {
    return validate_params(ComplexRational::parse(b.lambda[0], b.lambda[1]), ComplexRational::parse(b.mu[0], b.mu[1]),
                           ComplexRational::parse(b.tau[0], b.tau[1]), b.p);
}

HolonomyMap make_holonomy(const HolonomyBlock& b) { return make_holonomy(b.c, b.a, b.x_max); }

TimeFunctionPtr make_time_function(const HolonomyBlock& b) {
    return std::make_shared<const TimeFunction>(build_time_function(make_holonomy(b), b.x0, b.k_match));
}

// ---------------------------------------------------------------------------
// Reports

bool Report::pass() const {
    if (!error.empty()) return false;
    for (const auto& r : residuals) {
        if (!r.pass()) return false;
    }
    for (const auto& c : checks) {
        if (!c.second) return false;
    }
    return true;
}

ojson Report::to_json(bool with_clock) const {
    ojson j;
    j["task"] = task;
    j["config"] = config;
    j["seed"] = seed;
    j["result"] = result;
    ojson res = ojson::array();
    for (const auto& r : residuals) {
        res.push_back({{"name", r.name}, {"max", r.max}, {"median", r.median}, {"threshold", r.threshold},
                       {"pass", r.pass()}});
    }
    j["residuals"] = res;
    ojson ch = ojson::object();
    for (const auto& [name, ok] : checks) ch[name] = ok;
    j["checks"] = ch;
    if (!error.empty()) j["error"] = error;
    j["verdict"] = pass() ? "PASS" : "FAIL";
    if (with_clock) j["wall_clock_s"] = wall_clock;
    return j;
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "task: " << task << "\n";
    if (result.contains("line")) os << result["line"].get<std::string>() << "\n";
    if (result.contains("table_text")) os << result["table_text"].get<std::string>();
    if (result.contains("summary") && !result.contains("table_text")) {
        os << "summary: " << result["summary"].get<std::string>() << "\n";
    }
    for (const auto& r : residuals) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-28s max %.3e  median %.3e  threshold %.1e  %s\n", r.name.c_str(), r.max,
                      r.median, r.threshold, r.pass() ? "PASS" : "FAIL");
        os << buf;
    }
    for (const auto& [name, ok] : checks) os << name << ": " << (ok ? "PASS" : "FAIL") << "\n";
    if (!error.empty()) os << "error: " << error << "\n";
    os << "seed: " << seed << "\n";
    os << "verdict: " << (pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

int exit_code(const Report& report) {
    if (report.config_error) return 2;
    return report.pass() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// classify

Report run_classify(const RunConfig& config) {
    Report rep;
    rep.task = "classify";
    rep.config = config.to_json();
    rep.seed = config.seed;
    HopfParams params = make_params(config.hopf);
    CaseTag tag = classify_case(params);
    std::string label = boundary_group_label(tag);
    rep.result["case"] = tag.number();
    rep.result["tag"] = tag.to_string();
    rep.result["p"] = tag.p;
    rep.result["boundary_group"] = label;
    rep.result["line"] = "Case " + std::to_string(tag.number()) + "; Aut(H̃;G) ≅ " + label;
    rep.result["constraints"] = {{"modulus_order", true}, {"resonance", true}};

    std::mt19937_64 rng(config.seed);
    std::vector<Point2> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(sample_point2(rng));
    std::vector<double> values;
    for (int i = 0; i < 20; ++i) values.push_back(check_commutes_with_G(random_boundary_aut(tag, rng), params, pts));
    rep.residuals.push_back(make_stat("boundary_commutation", values, config.thresholds.boundary));
    return rep;
}

// ---------------------------------------------------------------------------
// table

Report run_table(const RunConfig& config) {
    Report rep;
    rep.task = "table";
    rep.config = config.to_json();
    rep.seed = config.seed;
    const ojson& t = config.task;
    const int degree = read_int(t, "degree", kDefaultTableDegree, "task");
    const int oracle_degree = read_int(t, "oracle_degree", 6, "task");
    const int orbit = read_int(t, "orbit", kDefaultOracleOrbit, "task");
    HopfParams params = make_params(config.hopf);
    NormalFormTable table = normal_form_table(params, degree);

    rep.result["tag"] = table.tag.to_string();
    rep.result["degree"] = table.degree;
    ojson slots = ojson::array();
    int normalized = 0;
    bool other_constants_zero = true;
    for (const auto& [s, st] : table.slots) {
        slots.push_back(status_json(s, st));
        if (st.kind == CoeffStatus::Kind::ForcedConstant) {
            if (st.value == 1) ++normalized;
            else if (st.value != 0) other_constants_zero = false;
        }
    }
    rep.result["slots"] = slots;
    rep.result["summary"] = table.summary;
    ojson constants = ojson::array();
    for (const auto& c : table.constants) constants.push_back(c.to_string());
    rep.result["constants"] = constants;
    rep.result["certified_tail"] = table.certified_tail;
    rep.result["table_text"] = table.to_text();

    int disagreements = 0;
    bool inconclusive = false;
    ojson mismatches = ojson::array();
    try {
        for (const auto& [s, st] : oracle_table(params, oracle_degree, orbit)) {
            const CoeffStatus& exact = table.status(s.j, s.k, s.l);
            if (!statuses_agree(exact, st)) {
                ++disagreements;
                mismatches.push_back({{"slot", s.to_string()}, {"exact", exact.to_string()}, {"oracle", st.to_string()}});
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Inconclusive) throw;
        inconclusive = true;
        rep.result["oracle_message"] = e.what();
    }
    rep.result["oracle"] = {{"degree", oracle_degree},
                            {"orbit", orbit},
                            {"disagreements", disagreements},
                            {"inconclusive", inconclusive},
                            {"mismatches", mismatches}};
    rep.checks.emplace_back("oracle_agreement", disagreements == 0 && !inconclusive);
    rep.checks.emplace_back("certified_tail", table.certified_tail);
    rep.checks.emplace_back("normalization", normalized == 2 && other_constants_zero);
    return rep;
}

// ---------------------------------------------------------------------------
// solve

namespace {

struct Component {
    std::string name;
    CoeffFn f;
    cplx nu;
};

} // namespace

Report run_solve(const RunConfig& config) {
    Report rep;
    rep.task = "solve";
    rep.config = config.to_json();
    rep.seed = config.seed;
    const ojson& t = config.task;
    HopfParams params = make_params(config.hopf);
    TimeFunctionPtr tf = make_time_function(config.holonomy);
    const HolonomyMap& phi = tf->holonomy();
    const std::string equation = read_string(t, "equation", "I", "task");
    const int grid_n = read_int(t, "grid", 1000, "task");
    const int k_max = read_int(t, "k_max", 6, "task");
    const int steps = read_int(t, "steps", 100, "task");
    if (grid_n < 2) config_fail("task.grid", "need at least two grid points");
    const cplx lambda = params.lambda_c(), mu = params.mu_c();
    const PeriodicSeed unit = PeriodicSeed::constant(1.0);

    // Each row: the components at x and at phi(x), with their residual.
    std::vector<std::string> names;
    std::function<std::vector<cplx>(double)> values;
    std::function<double(const std::vector<cplx>&, const std::vector<cplx>&)> row_residual;
    std::vector<Component> flat_parts;

    if (equation == "I") {
        cplx nu = read_complex(t, "nu", lambda, "task");
        if (!(std::abs(nu) > 1.0)) config_fail("task.nu", "Equation I needs |nu| > 1");
        SolutionZ beta = solve_I(tf, nu, read_seed_field(t, "seed", unit, "task"));
        names = {"beta"};
        values = [beta](double x) { return std::vector<cplx>{beta(x)}; };
        row_residual = [nu](const std::vector<cplx>& a, const std::vector<cplx>& b) {
            return scaled_deviation(b[0], nu * a[0]);
        };
        flat_parts.push_back({"beta", beta.as_function(), nu});
        rep.result["multiplier"] = complex_json(nu);
    } else if (equation == "II" || equation == "IIc") {
        cplx c = equation == "II" ? cplx(1.0) : read_complex(t, "c", 1.0, "task");
        SolutionZ beta2 = solve_I(tf, lambda, read_seed_field(t, "seed", unit, "task"));
        std::optional<SolutionZ> gamma;
        if (field(t, "gamma")) gamma = solve_I(tf, lambda, read_seed_field(t, "gamma", unit, "task"));
        SolutionS s = solve_IIc(tf, lambda, c, beta2, gamma);
        names = {"beta1", "beta2"};
        values = [s](double x) { return std::vector<cplx>{s.beta1(x), s.beta2(x)}; };
        row_residual = [lambda, c](const std::vector<cplx>& a, const std::vector<cplx>& b) {
            return std::max(scaled_deviation(b[1], lambda * a[1]), scaled_deviation(b[0], lambda * a[0] + c * a[1]));
        };
        flat_parts.push_back({"beta1", s.beta1, lambda});
        flat_parts.push_back({"beta2", s.beta2.as_function(), lambda});
        rep.result["coupling"] = complex_json(c);
    } else if (equation == "III") {
        const int p = params.p();
        if (p < 2) config_fail("hopf.p", "Equation III needs p >= 2");
        std::vector<cplx> c;
        if (const ojson* cv = field(t, "c")) {
            if (!cv->is_array() || static_cast<int>(cv->size()) != p) config_fail("task.c", "expected p constants");
            for (std::size_t i = 0; i < cv->size(); ++i) {
                ojson wrap = {{"v", (*cv)[i]}};
                c.push_back(read_complex(wrap, "v", 0.0, "task.c[" + std::to_string(i) + "]"));
            }
        } else {
            for (const auto& cj : case5_constants(params.mu(), p)) c.push_back(cj.to_complex());
        }
        SolutionZ beta2 = solve_I(tf, mu, read_seed_field(t, "seed", unit, "task"));
        std::vector<std::optional<SolutionZ>> gammas(static_cast<std::size_t>(p));
        auto gseeds = read_seed_list(t, "gammas", "task");
        if (gseeds.size() > static_cast<std::size_t>(p)) config_fail("task.gammas", "at most p seeds");
        for (std::size_t j = 0; j < gseeds.size(); ++j) {
            if (gseeds[j]) gammas[j] = solve_I(tf, std::pow(mu, p - static_cast<int>(j)), *gseeds[j]);
        }
        SolutionSIII s = solve_III(tf, mu, p, c, beta2, gammas);
        for (int j = 0; j < p; ++j) names.push_back("beta1_" + std::to_string(j));
        names.push_back("beta2");
        values = [s](double x) {
            std::vector<cplx> v;
            for (const auto& b : s.beta1) v.push_back(b(x));
            v.push_back(s.beta2(x));
            return v;
        };
        row_residual = [mu, p, c](const std::vector<cplx>& a, const std::vector<cplx>& b) {
            double r = scaled_deviation(b[p], mu * a[p]);
            for (int j = 0; j < p; ++j) {
                r = std::max(r, scaled_deviation(b[j], std::pow(mu, p - j) * a[j] + c[j] * std::pow(a[p], p - j)));
            }
            return r;
        };
        for (int j = 0; j < p; ++j) flat_parts.push_back({names[j], s.beta1[j], std::pow(mu, p - j)});
        flat_parts.push_back({"beta2", s.beta2.as_function(), mu});
        ojson cj = ojson::array();
        for (cplx v : c) cj.push_back(complex_json(v));
        rep.result["constants"] = cj;
    } else {
        config_fail("task.equation", "expected one of I, II, IIc, III");
    }
    rep.result["equation"] = equation;

    std::ostringstream csv;
    csv << "x";
    for (const auto& n : names) csv << ",re_" << n << ",im_" << n;
    csv << ",x_next";
    for (const auto& n : names) csv << ",re_" << n << "_next,im_" << n << "_next";
    csv << ",residual\n";
    std::vector<double> residuals;
    for (double x : window_grid(phi, grid_n)) {
        double y = phi(x);
        auto a = values(x);
        auto b = values(y);
        double r = row_residual(a, b);
        residuals.push_back(r);
        csv << fmt17(x);
        for (cplx v : a) csv << ',' << fmt17(v.real()) << ',' << fmt17(v.imag());
        csv << ',' << fmt17(y);
        for (cplx v : b) csv << ',' << fmt17(v.real()) << ',' << fmt17(v.imag());
        csv << ',' << fmt17(r) << '\n';
    }
    rep.csv = csv.str();
    rep.residuals.push_back(make_stat("functional_equation", residuals, config.thresholds.functional));

    std::ostringstream fcsv;
    fcsv << "component,n,x_n,abs_f";
    for (int k = 1; k <= k_max; ++k) fcsv << ",ratio_K" << k;
    fcsv << '\n';
    ojson flat = ojson::object();
    for (const auto& part : flat_parts) {
        FlatnessReport fr = flatness_report(part.f, phi, config.holonomy.x0, k_max, steps);
        for (std::size_t n = 0; n < fr.x.size(); ++n) {
            fcsv << part.name << ',' << n << ',' << fmt17(fr.x[n]) << ',' << fmt17(fr.abs_f[n]);
            for (double r : fr.ratio[n]) fcsv << ',' << fmt17(r);
            fcsv << '\n';
        }
        flat[part.name] = {{"flat", fr.flat}, {"truncated", fr.truncated}, {"steps", fr.x.size() - 1}};
        rep.checks.emplace_back("flat_" + part.name, fr.flat);
    }
    rep.flatness_csv = fcsv.str();
    rep.result["flatness"] = flat;
    rep.result["x_min"] = phi.x_min();
    rep.result["x_max"] = phi.x_max();
    return rep;
}

// ---------------------------------------------------------------------------
// verify

namespace {

CentralizerElement read_eta(const ojson& e, TimeFunctionPtr tf, const std::string& path) {
    const ojson* f = field(e, "eta");
    if (!f) return CentralizerElement::identity(tf);
    if (!f->is_object()) config_fail(path + ".eta", "expected {\"flow\": t} or {\"iterate\": n}");
    reject_unknown(*f, {"flow", "iterate"}, path + ".eta");
    if (field(*f, "flow")) return centralizer_flow(tf, read_double(*f, "flow", 0.0, path + ".eta"));
    return CentralizerElement::iterate(tf, read_int(*f, "iterate", 0, path + ".eta"));
}

KernelElement read_kernel(const ojson& e, const HopfParams& params, TimeFunctionPtr tf) {
    const std::string path = "task.element";
    CentralizerElement eta = read_eta(e, tf, path);
    CaseTag tag = classify_case(params);
    auto seeds = read_seed_list(e, "beta1", path);
    PeriodicSeed b2seed = read_seed_field(e, "beta2", PeriodicSeed::zero(), path);
    const int degree = kernel_degree(params);
    if (static_cast<int>(seeds.size()) > degree + 1) {
        config_fail(path + ".beta1", "at most " + std::to_string(degree + 1) + " seeds for " + tag.to_string());
    }
    seeds.resize(static_cast<std::size_t>(degree + 1));
    auto seed_or_zero = [&](std::size_t j) { return seeds[j] ? *seeds[j] : PeriodicSeed::zero(); };
    const cplx lambda = params.lambda_c(), mu = params.mu_c();
    switch (tag.kind) {
    case CaseKind::Case1:
    case CaseKind::Case2:
    case CaseKind::Case3: {
        std::vector<SolutionZ> beta1;
        for (int j = 0; j <= degree; ++j) {
            beta1.push_back(solve_I(tf, kernel_multiplier(params, j), seed_or_zero(static_cast<std::size_t>(j))));
        }
        return make_kernel_element(params, beta1, solve_I(tf, mu, b2seed), eta);
    }
    case CaseKind::Case4: {
        SolutionZ beta2 = solve_I(tf, lambda, b2seed);
        return make_kernel_element(params, solve_II(tf, lambda, beta2, solve_I(tf, lambda, seed_or_zero(0))), eta);
    }
    case CaseKind::Case5: {
        const int p = params.p();
        std::vector<cplx> c;
        for (const auto& cj : case5_constants(params.mu(), p)) c.push_back(cj.to_complex());
        std::vector<std::optional<SolutionZ>> gammas;
        for (int j = 0; j < p; ++j) {
            gammas.emplace_back(solve_I(tf, std::pow(mu, p - j), seed_or_zero(static_cast<std::size_t>(j))));
        }
        return make_kernel_element(params, solve_III(tf, mu, p, c, solve_I(tf, mu, b2seed), gammas), eta);
    }
    }
    throw Error(ErrorCode::Internal, "unknown case");
}

BoundaryAut read_boundary(const ojson& e, const CaseTag& tag) {
    const ojson* f = field(e, "boundary");
    if (!f) return identity_boundary(tag);
    const std::string path = "task.element.boundary";
    if (!f->is_object()) config_fail(path, "expected an object");
    reject_unknown(*f, {"a", "b", "c", "d"}, path);
    BoundaryAut id = identity_boundary(tag);
    return make_boundary_aut(tag, read_complex(*f, "a", id.a(), path), read_complex(*f, "b", id.b(), path),
                             read_complex(*f, "c", id.c(), path), read_complex(*f, "d", id.d(), path));
}

ActionFn action_of(const KernelElement& g) {
    return [g](const Point2& z, double x) { return g(z, x); };
}

} // namespace

Report run_verify(const RunConfig& config) {
    Report rep;
    rep.task = "verify";
    rep.config = config.to_json();
    rep.seed = config.seed;
    const ojson& t = config.task;
    HopfParams params = make_params(config.hopf);
    TimeFunctionPtr tf = make_time_function(config.holonomy);
    const HolonomyMap& phi = tf->holonomy();
    CaseTag tag = classify_case(params);
    const int n_samples = read_int(t, "samples", 1000, "task");
    const int n_random = read_int(t, "random_elements", 10, "task");
    const int n_points = read_int(t, "group_points", 100, "task");
    if (n_samples < 1 || n_random < 0 || n_points < 1) config_fail("task", "sample counts must be positive");
    ojson element = ojson::object();
    if (const ojson* e = field(t, "element")) {
        if (!e->is_object()) config_fail("task.element", "expected an object");
        element = *e;
    }
    reject_unknown(element, {"kind", "eta", "beta1", "beta2", "boundary", "dimension", "betas"}, "task.element");
    const std::string kind = read_string(element, "kind", "kernel", "task.element");
    std::mt19937_64 rng(config.seed);
    rep.result["case"] = tag.to_string();

    if (kind == "diagonal") {
        const int n = read_int(element, "dimension", 2, "task.element");
        if (n < 1) config_fail("task.element.dimension", "must be at least 1");
        const cplx lambda = params.lambda_c();
        CentralizerElement eta = read_eta(element, tf, "task.element");
        auto seeds = read_seed_list(element, "betas", "task.element");
        if (static_cast<int>(seeds.size()) > n) config_fail("task.element.betas", "more seeds than dimensions");
        seeds.resize(static_cast<std::size_t>(n));
        std::vector<SolutionZ> betas;
        for (const auto& s : seeds) betas.push_back(solve_I(tf, lambda, s ? *s : PeriodicSeed::zero()));
        DiagonalElementN g = make_diagonal_n(n, lambda, betas, eta);
        auto samples = sample_points_n(rng, phi, n, n_samples);
        rep.residuals.push_back(make_stat("equivariance", {verify_equivariance(g, samples)}, config.thresholds.group));
        std::vector<double> comp, ident;
        auto pts = sample_points_n(rng, phi, n, n_points);
        for (int i = 0; i < n_random; ++i) {
            std::vector<SolutionZ> r1, r2;
            for (int k = 0; k < n; ++k) {
                r1.push_back(solve_I(tf, lambda, random_seed(rng)));
                r2.push_back(solve_I(tf, lambda, random_seed(rng)));
            }
            auto g1 = make_diagonal_n(n, lambda, r1, centralizer_flow(tf, 0.25 * (i % 3)));
            auto g2 = make_diagonal_n(n, lambda, r2, centralizer_flow(tf, -0.5));
            comp.push_back(composition_deviation(compose_diagonal(g1, g2), g1, g2, pts));
            ident.push_back(identity_deviation(compose_diagonal(g1, invert_diagonal(g1)), pts));
        }
        rep.residuals.push_back(make_stat("composition", comp, config.thresholds.composition));
        rep.residuals.push_back(make_stat("inverse", ident, config.thresholds.composition));
        rep.result["dimension"] = n;
        rep.result["eta"] = eta.describe();
        return rep;
    }
    if (kind != "kernel") config_fail("task.element.kind", "expected kernel or diagonal");

    KernelElement k = read_kernel(element, params, tf);
    BoundaryAut f = read_boundary(element, tag);
    FullAutomorphism g = make_full_automorphism(f, k);
    rep.result["eta"] = k.eta().describe();
    auto samples = sample_points(rng, phi, n_samples);
    rep.residuals.push_back(make_stat("equivariance", {verify_equivariance(g, samples)}, config.thresholds.group));
    std::vector<Point2> pts;
    for (const auto& s : samples) pts.push_back(s.z);
    rep.residuals.push_back(
        make_stat("boundary_commutation", {check_commutes_with_G(f, params, pts)}, config.thresholds.boundary));
    double restriction = 0.0;
    for (const auto& s : samples) {
        Sample at0 = g(s.z, 0.0);
        restriction = std::max({restriction, scaled_deviation(at0.z, f(s.z)), std::abs(at0.x)});
    }
    rep.residuals.push_back(make_stat("boundary_restriction", {restriction}, config.thresholds.composition));

    // Group-axiom suite on random elements around the given one.
    std::vector<Sample> pts_g = sample_points(rng, phi, n_points);
    std::vector<double> comp, assoc, ident, inverse, action;
    ActionFn id = [](const Point2& z, double x) { return Sample{z, x}; };
    for (int i = 0; i < n_random; ++i) {
        auto g1 = random_kernel_element(params, tf, rng, centralizer_flow(tf, 0.5));
        auto g2 = random_kernel_element(params, tf, rng, centralizer_flow(tf, -0.25));
        auto g12 = compose_kernel(g1, k);
        ActionFn direct = [g1, k](const Point2& z, double x) {
            Sample s = k(z, x);
            return g1(s.z, s.x);
        };
        comp.push_back(action_deviation(action_of(g12), direct, pts_g));
        assoc.push_back(action_deviation(action_of(compose_kernel(g12, g2)),
                                         action_of(compose_kernel(g1, compose_kernel(k, g2))), pts_g));
        ident.push_back(std::max(action_deviation(action_of(compose_kernel(g1, kernel_identity(params, tf))),
                                                  action_of(g1), pts_g),
                                 action_deviation(action_of(compose_kernel(kernel_identity(params, tf), g1)),
                                                  action_of(g1), pts_g)));
        inverse.push_back(std::max(action_deviation(action_of(compose_kernel(g1, invert_kernel(g1))), id, pts_g),
                                   action_deviation(action_of(compose_kernel(invert_kernel(g1), g1)), id, pts_g)));
        CentralizerElement zeta = centralizer_flow(tf, 0.3 + 0.1 * (i % 4));
        KernelElement h = kernel_translation(params, zeta);
        KernelElement hinv = invert_kernel(h);
        ActionFn conj = [h, hinv, g2](const Point2& z, double x) {
            Sample a = h(z, x);
            Sample b = g2(a.z, a.x);
            return hinv(b.z, b.x);
        };
        action.push_back(action_deviation(conj, action_of(precompose_coefficients(g2, zeta)), pts_g));
    }
    if (n_random > 0) {
        rep.residuals.push_back(make_stat("composition", comp, config.thresholds.composition));
        rep.residuals.push_back(make_stat("associativity", assoc, config.thresholds.composition));
        rep.residuals.push_back(make_stat("identity", ident, config.thresholds.composition));
        rep.residuals.push_back(make_stat("inverse", inverse, config.thresholds.composition));
        rep.residuals.push_back(make_stat("semidirect_action", action, config.thresholds.functional));
    }
    return rep;
}

Report run_task(const std::string& task, const RunConfig& config) {
    auto start = std::chrono::steady_clock::now();
    Report rep;
    try {
        if (task == "classify") rep = run_classify(config);
        else if (task == "table") rep = run_table(config);
        else if (task == "solve") rep = run_solve(config);
        else if (task == "verify") rep = run_verify(config);
        else throw Error(ErrorCode::ConfigError, "unknown task " + task);
    } catch (const Error& e) {
        rep = Report{};
        rep.task = task;
        rep.config = config.to_json();
        rep.seed = config.seed;
        rep.error = e.what();
        switch (e.code()) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::ModulusOrder:
        case ErrorCode::ResonanceConstraint:
        case ErrorCode::SearchBoundExceeded:
        case ErrorCode::NotExpanding:
        case ErrorCode::Degenerate:
        case ErrorCode::ZeroCoupling:
        case ErrorCode::DegreeBoundExceeded: rep.config_error = true; break;
        default: break;
        }
    }
    rep.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace hopfreeb
