// Runs acceptance criteria 1-9 in process and criterion 10 through the CLI.
// One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "oulab/acceptance.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// check --builtin demo1d --seed 42, twice, compared byte for byte.
bool determinism(double& seconds, std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const auto dir = std::filesystem::temp_directory_path();
    const std::string a = (dir / "oulab_acceptance_a.json").string(), b = (dir / "oulab_acceptance_b.json").string();
    const std::string base = std::string(OULAB_CLI) + " check --builtin demo1d --seed 42 --out-json ";
    const int ca = shell(base + a + " 2>/dev/null"), cb = shell(base + b + " 2>/dev/null");
    const std::string ja = slurp(a), jb = slurp(b);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail = "exit codes " + std::to_string(ca) + "/" + std::to_string(cb) + ", " + std::to_string(ja.size()) + " bytes";
    return ca == 0 && cb == 0 && !ja.empty() && ja == jb;
}

}  // namespace

int main() {
    using namespace oulab::acceptance;
    const Options o;
    bool all = true;
    for (int id : criteria_for(o)) {
        try {
            const Result r = run_criterion(id, o);
            std::cout << result_line(r) << std::endl;
            all = all && r.ok();
        } catch (const std::exception& e) {
            std::cout << "[FAIL] criterion " << id << ": " << e.what() << std::endl;
            all = false;
        }
    }
    double seconds = 0.0;
    std::string detail;
    const bool det = determinism(seconds, detail);
    char buf[256];
    std::snprintf(buf, sizeof buf, "[%s] criterion 10: determinism of check --builtin demo1d --seed 42 (%.2f s, %s)",
                  det ? "PASS" : "FAIL", seconds, detail.c_str());
    std::cout << buf << std::endl;
    all = all && det;
    std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
    return all ? 0 : 1;
}
