#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "hopfreeb/cli.hpp"
#include "hopfreeb/error.hpp"

using namespace hopfreeb;

namespace {

RunConfig config_for(const std::string& lambda, const std::string& mu, const std::string& tau, int p, ojson task) {
    RunConfig c;
    c.hopf.lambda = {lambda, "0/1"};
    c.hopf.mu = {mu, "0/1"};
    c.hopf.tau = {tau, "0/1"};
    c.hopf.p = p;
    c.task = std::move(task);
    return c;
}

std::string config_error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        return e.what();
    }
    return "";
}

std::vector<double> split_doubles(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

} // namespace

TEST_CASE("config round trip") {
    RunConfig c = config_for("5/1", "2/1", "0/1", 1, ojson{{"degree", 6}});
    c.holonomy.c = 0.75;
    c.seed = 99;
    c.thresholds.functional = 1e-8;
    ojson j = c.to_json();
    RunConfig back = parse_config(j.dump());
    CHECK(back.to_json() == j);
    CHECK(back.seed == 99);
    CHECK(back.holonomy.c == 0.75);
    CHECK(make_params(back.hopf).lambda().to_string() == "5");
}

TEST_CASE("config errors name the field") {
    CHECK(config_error_of(R"({"hopf": {"lambda": ["2/1", "0/1"], "lamda": 1}})").find("hopf") != std::string::npos);
    CHECK(config_error_of(R"({"bogus": 1})").find("bogus") != std::string::npos);
    CHECK(config_error_of(R"({"hopf": {"mu": ["2/0", "0/1"]}})").find("mu") != std::string::npos);
    CHECK(config_error_of(R"({"seed": -4})").find("seed") != std::string::npos);
    CHECK(config_error_of(R"({"thresholds": {"group": 0}})").find("thresholds") != std::string::npos);
    CHECK_FALSE(config_error_of("{ not json").empty());
    CHECK_NOTHROW(parse_config("{}"));
}

TEST_CASE("classify task") {
    Report r = run_task("classify", config_for("5/1", "2/1", "0/1", 1, ojson::object()));
    CHECK(r.pass());
    CHECK(r.result["case"] == 3);
    CHECK(r.result["line"].get<std::string>() == "Case 3; Aut(H̃;G) ≅ ℂ* × ℂ*");
    CHECK(exit_code(r) == 0);

    Report bad = run_task("classify", config_for("2/1", "3/1", "0/1", 1, ojson::object()));
    CHECK(bad.config_error);
    CHECK(exit_code(bad) == 2);
    CHECK(bad.error.find("ModulusOrder") != std::string::npos);
}

TEST_CASE("table task") {
    Report r = run_task("table", config_for("4/1", "2/1", "1/1", 2, ojson{{"degree", 6}}));
    CHECK(r.pass());
    CHECK(r.result["summary"].get<std::string>() == "0 -> S(2; c = (1, 1)) -> Aut(R,H) -> Z_phi -> 1");
    CHECK(r.result["oracle"]["disagreements"] == 0);
    CHECK(r.to_text().find("summary") != std::string::npos);
}

TEST_CASE("solve task is deterministic and its csv can be rechecked") {
    ojson task = {{"equation", "I"}, {"nu", ojson::array({"2", "1"})}, {"seed", ojson::array({ojson::array({1, 0.5, -0.25})})},
                  {"grid", 200}};
    RunConfig c = config_for("2/1", "2/1", "0/1", 1, task);
    Report a = run_task("solve", c);
    Report b = run_task("solve", c);
    REQUIRE(a.error.empty());
    CHECK(a.pass());
    CHECK(a.to_json(false).dump() == b.to_json(false).dump());
    CHECK(a.csv == b.csv);

    std::stringstream ss(a.csv);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "x,re_beta,im_beta,x_next,re_beta_next,im_beta_next,residual");
    int rows = 0;
    double worst = 0.0;
    while (std::getline(ss, line)) {
        auto v = split_doubles(line);
        REQUIRE(v.size() == 7);
        cplx f(v[1], v[2]), g(v[4], v[5]);
        double r = scaled_deviation(g, cplx(2.0, 1.0) * f);
        CHECK(r == doctest::Approx(v[6]).epsilon(1e-6).scale(1e-15));
        worst = std::max(worst, r);
        ++rows;
    }
    CHECK(rows == 200);
    CHECK(worst < 1e-9);
    CHECK(a.flatness_csv.rfind("component,n,x_n,abs_f,ratio_K1", 0) == 0);
}

TEST_CASE("solve task for each equation") {
    for (const char* eq : {"II", "IIc"}) {
        ojson task = {{"equation", eq}, {"c", 3}, {"grid", 100}};
        if (std::string(eq) == "II") task.erase("c");
        Report r = run_task("solve", config_for("2/1", "2/1", "1/1", 1, task));
        CAPTURE(r.error);
        CHECK(r.pass());
    }
    Report r3 = run_task("solve", config_for("4/1", "2/1", "1/1", 2, ojson{{"equation", "III"}, {"grid", 100}}));
    CAPTURE(r3.error);
    CHECK(r3.pass());
    Report zero = run_task("solve", config_for("2/1", "2/1", "1/1", 1, ojson{{"equation", "IIc"}, {"c", 0}}));
    CHECK_FALSE(zero.pass());
    CHECK(zero.error.find("ZeroCoupling") != std::string::npos);
    Report unknown = run_task("solve", config_for("2/1", "2/1", "1/1", 1, ojson{{"equation", "IV"}}));
    CHECK(exit_code(unknown) == 2);
}

TEST_CASE("verify task") {
    ojson task = {{"samples", 200}, {"random_elements", 2}, {"group_points", 50},
                  {"element", {{"kind", "kernel"}, {"eta", {{"flow", 0.5}}}}}};
    Report r = run_task("verify", config_for("5/1", "2/1", "0/1", 1, task));
    CAPTURE(r.error);
    CHECK(r.pass());
    std::vector<std::string> names;
    for (const auto& s : r.residuals) names.push_back(s.name);
    CHECK(std::find(names.begin(), names.end(), "equivariance") != names.end());
    CHECK(std::find(names.begin(), names.end(), "semidirect_action") != names.end());

    ojson diag = {{"samples", 200}, {"random_elements", 0},
                  {"element", {{"kind", "diagonal"}, {"dimension", 3}, {"eta", {{"iterate", 2}}}}}};
    Report d = run_task("verify", config_for("2/1", "2/1", "0/1", 1, diag));
    CAPTURE(d.error);
    CHECK(d.pass());
    CHECK(exit_code(run_task("frobnicate", RunConfig{})) == 2);
}
