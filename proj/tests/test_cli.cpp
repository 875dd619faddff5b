#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(BELLMAG_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

fs::path temp_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() /
                 ("bellmag_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run("sweep-g1tau --no-such-flag").exit_code == 2);
    CHECK(run("").exit_code == 2);  // subcommand required
    CHECK(run("sweep-g1tau --g1tau-min 0.5 --g1tau-max 0.1").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
}

TEST_CASE("sweep-g1tau CSV contract") {
    const auto csv1 = temp_dir() / "g1_a.csv";
    const auto csv2 = temp_dir() / "g1_b.csv";
    const std::string flags =
        "sweep-g1tau --t-list 1.0,0.9 --g1tau-min 0.2 --g1tau-max 0.3 --g1tau-step 0.05";
    CHECK(run(flags + " --out " + csv1.string()).exit_code == 0);
    CHECK(run(flags + " --out " + csv2.string()).exit_code == 0);

    const std::string a = slurp(csv1);
    CHECK(a == slurp(csv2));  // byte-identical rerun
    std::istringstream in(a);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "g1tau,T,p,S,alpha1_re,alpha1_im,alpha2_re,alpha2_im,beta1_re,beta1_im,"
          "beta2_re,beta2_im");
    CHECK(count_lines(a) == 1 + 2 * 3);  // header + 2 curves x 3 grid points
}

TEST_CASE("sweep-g1tau default grid has 100 rows per curve") {
    const auto out = run("sweep-g1tau --t-list 1.0 --out -");
    CHECK(out.exit_code == 0);
    CHECK(count_lines(out.output) == 101);
}

TEST_CASE("sweep-g2tau smoke") {
    const auto res =
        run("sweep-g2tau --p-list 0.39 --g2tau-min 0.5 --g2tau-max 1.5 --g2tau-step 0.5 "
            "--out -");
    CHECK(res.exit_code == 0);
    std::istringstream in(res.output);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("g2tau,p,T,S,", 0) == 0);
    CHECK(count_lines(res.output) == 4);
}

TEST_CASE("contour-eta emits a threshold summary") {
    const auto summary = temp_dir() / "contour_summary.json";
    const auto res = run(
        "contour-eta --g1tau-min 0.2 --g1tau-max 0.3 --g1tau-step 0.05 "
        "--eta-min 0.7 --eta-max 0.9 --eta-step 0.1 --out " +
        (temp_dir() / "contour.csv").string() + " --summary-out " + summary.string());
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("eta_threshold=0.8") != std::string::npos);
    const auto parsed = nlohmann::json::parse(slurp(summary));
    CHECK(parsed["eta_threshold"].get<double>() == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("oracle-check exit codes") {
    CHECK(run("oracle-check --samples 1").exit_code == 0);
    const auto res = run("oracle-check --samples 5 --tol 1e-18");
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("FAIL") != std::string::npos);
    CHECK(res.output.find("worst tuple") != std::string::npos);
}

TEST_CASE("oracle-check seed control") {
    const auto a = run("--seed 99 oracle-check --samples 10");
    const auto b = run("--seed 99 oracle-check --samples 10");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("BELLMAG_SEED environment override") {
    const std::string cmd = "env BELLMAG_SEED=99 " + std::string(BELLMAG_CLI_PATH) +
                            " oracle-check --samples 10 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
    pclose(pipe);
    CHECK(output == run("--seed 99 oracle-check --samples 10").output);
}

TEST_CASE("dynamics command") {
    const auto series = temp_dir() / "dyn.csv";
    const auto res = run(
        "dynamics --pulse squeezer --g-over-kappa 0.05 --gtau 0.25 --json --out " +
        series.string());
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("\"magnon_deviation\"") != std::string::npos);
    const std::string csv = slurp(series);
    CHECK(csv.rfind("t,occ_cav,occ_mag,out_mode_occ", 0) == 0);

    // G = 0: every series value is exactly zero
    const auto zero = run("dynamics --pulse squeezer --g-over-kappa 0 --tau 5 --out -");
    CHECK(zero.exit_code == 0);
    std::istringstream in(zero.output);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.rfind("pulse=", 0) == 0 || line.rfind("out_mode", 0) == 0) break;
        const auto first_comma = line.find(',');
        CHECK(line.substr(first_comma + 1) == "0,0,0");
    }
}

TEST_CASE("feasibility command") {
    CHECK(run("feasibility --config /no/such/file.json").exit_code == 1);

    const auto empty = temp_dir() / "empty.json";
    std::ofstream(empty) << "{}";
    const auto res = run("feasibility --config " + empty.string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("required key missing") != std::string::npos);

    const auto bad = temp_dir() / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run("feasibility --config " + bad.string()).exit_code == 2);

    const auto preset = run(std::string("feasibility --json --config ") +
                            BELLMAG_PRESET_PATH);
    CHECK(preset.exit_code == 0);
    CHECK(preset.output.find("\"T\": 0.95021") != std::string::npos);
    CHECK(preset.output.find("\"g2tau\": 1.5") != std::string::npos);
}
