#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hopfreeb/cli.hpp"
#include "hopfreeb/error.hpp"

using namespace hopfreeb;

namespace {

bool write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) return false;
    out << text;
    return static_cast<bool>(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Automorphism groups of Reeb components over primary Hopf surfaces"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::uint64_t seed = 0;
    bool seed_given = false;

    for (const char* name : {"classify", "table", "solve", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", out_path, "write the report here instead of stdout");
        sub->add_option("--seed", seed, "seed for randomized verification")->each([&](const std::string&) {
            seed_given = true;
        });
        sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text", "csv"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string task = app.get_subcommands().front()->get_name();

    RunConfig config;
    try {
        if (!config_path.empty()) config = load_config(config_path);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    if (seed_given) config.seed = seed;
    if (!out_path.empty()) config.out = out_path;

    Report report = run_task(task, config);

    std::string body;
    if (format == "json") {
        body = report.to_json().dump(2) + "\n";
    } else if (format == "text") {
        body = report.to_text();
    } else {
        if (task != "solve") {
            std::cerr << "csv output is only available for solve\n";
            return 2;
        }
        body = report.csv;
    }

    if (config.out.empty()) {
        std::cout << body;
    } else {
        if (!write_text(config.out, body)) {
            std::cerr << "cannot write " << config.out << "\n";
            return 2;
        }
        if (task == "solve" && !report.flatness_csv.empty()) write_text(config.out + ".flatness.csv", report.flatness_csv);
        std::cerr << "verdict: " << (report.pass() ? "PASS" : "FAIL") << "\n";
    }
    return exit_code(report);
}
