// Acceptance suite on the default grid: one line per criterion, nonzero exit
// if any criterion fails. Optional argv[1]: a run config; argv[2]: output dir.
#include <cstdio>
#include <fstream>
#include <iostream>

#include "jetstokes/harness.hpp"

using namespace jetstokes;

int main(int argc, char** argv) {
    try {
        RunConfig cfg = argc > 1 && argv[1][0] ? load_run_config(argv[1]) : parse_run_config(nlohmann::json::object());
        cfg.output_dir = argc > 2 ? argv[2] : "acceptance_out";
        const int code = cmd_verify_all(cfg, [](const std::string& s) { std::cerr << s << '\n'; });
        std::ifstream in(cfg.output_dir / "verify_report.json");
        const auto rep = nlohmann::ordered_json::parse(in);
        for (const auto& [k, v] : rep.items())
            std::printf("%-22s %s  measured=%s  tolerance=%s\n", k.c_str(), v.at("pass").get<bool>() ? "PASS" : "FAIL",
                        v.at("measured").dump().c_str(), v.at("tolerance").dump().c_str());
        std::printf("%s\n", code == 0 ? "ALL PASS" : "SOME CRITERIA FAILED");
        return code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 2;
    }
}
