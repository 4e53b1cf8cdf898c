#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(BRWSIM_CLI_PATH) + " " + args + " 2>/tmp/brwsim_cli_err";
    std::array<char, 4096> buf{};
    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) result.out += buf.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string stderr_text() { return read_file("/tmp/brwsim_cli_err"); }

double extract_number(const std::string& json, const std::string& key) {
    const auto pos = json.find("\"" + key + "\":");
    REQUIRE(pos != std::string::npos);
    return std::stod(json.substr(pos + key.size() + 3));
}

}  // namespace

TEST_CASE("cli: positivity record matches the closed form") {
    const auto r = run_cli("positivity --d 2 --n 2 --method conditional --samples 200000 "
                           "--seed 7 --shards 8");
    CHECK(r.exit_code == 0);
    CHECK(extract_number(r.out, "value") == doctest::Approx(1.0 / 9.0).epsilon(0.02));
    CHECK(extract_number(r.out, "seed") == 7);
    CHECK(extract_number(r.out, "shards") == 8);
    CHECK(r.out.find("\"estimator\":\"conditional\"") != std::string::npos);
}

TEST_CASE("cli: lambda-prime") {
    const auto r = run_cli("lambda-prime --d 2 --n 16 --cpp 1.0");
    CHECK(r.exit_code == 0);
    CHECK(extract_number(r.out, "value") == doctest::Approx(4.8818977112230164).epsilon(1e-8));
}

TEST_CASE("cli: lemma-sum") {
    const auto r = run_cli("lemma-sum --d 2 --n 3");
    CHECK(r.exit_code == 0);
    CHECK(extract_number(r.out, "sum") == doctest::Approx(4.9698132995760007).epsilon(1e-12));
    CHECK(extract_number(r.out, "ratio") == doctest::Approx(0.62122666244700009).epsilon(1e-12));
    CHECK(extract_number(r.out, "upper") == doctest::Approx(22.0));
}

TEST_CASE("cli: covariance matrix as csv") {
    const auto r = run_cli("cov --d 2 --n 2 --model brw");
    CHECK(r.exit_code == 0);
    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "2,1,0,0");
    int rows = 1;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("cli: full-field csv export") {
    const auto brw = run_cli("sample --d 2 --n 2 --model brw --mode full --samples 3 --seed 1");
    CHECK(brw.exit_code == 0);
    std::stringstream ss(brw.out);
    std::string line;
    int rows = 0;
    while (std::getline(ss, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 3);  // 4 leaf columns
    }
    CHECK(rows == 3);

    // the switching field carries its shared Gaussian as one extra column
    const auto sw =
        run_cli("sample --d 2 --n 2 --model switching --mode full --samples 2 --seed 1");
    CHECK(sw.exit_code == 0);
    std::stringstream ss2(sw.out);
    while (std::getline(ss2, line))
        CHECK(std::count(line.begin(), line.end(), ',') == 4);  // 4 leaves + x
}

TEST_CASE("cli: binary export size") {
    const auto r = run_cli("sample --d 2 --n 3 --model brw --mode full --samples 5 --seed 2 "
                           "--format bin --out /tmp/brwsim_cli_sample.bin");
    CHECK(r.exit_code == 0);
    CHECK(read_file("/tmp/brwsim_cli_sample.bin").size() == 5u * 8u * sizeof(double));
}

TEST_CASE("cli: comparison model is max-only") {
    const auto bad = run_cli("sample --d 2 --n 4 --model comparison --n-prime 2 --mode full "
                             "--samples 1");
    CHECK(bad.exit_code == 1);
    CHECK(stderr_text().find("max-only") != std::string::npos);

    const auto ok = run_cli("sample --d 2 --n 4 --model comparison --n-prime 2 "
                            "--mode max-only --samples 4 --seed 3");
    CHECK(ok.exit_code == 0);
}

TEST_CASE("cli: tail curve in both formats") {
    const auto jsonl =
        run_cli("tail --d 2 --n 4 --model brw --thresholds 2,4,6 --samples 2000 --seed 5");
    CHECK(jsonl.exit_code == 0);
    std::stringstream ss(jsonl.out);
    std::string line;
    int rows = 0;
    double prev = -1.0;
    while (std::getline(ss, line)) {
        ++rows;
        const double v = extract_number(line, "value");
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(rows == 3);

    const auto csv = run_cli(
        "tail --d 2 --n 4 --model brw --thresholds 2,4,6 --samples 2000 --seed 5 --format csv");
    CHECK(csv.exit_code == 0);
    std::stringstream css(csv.out);
    rows = 0;
    while (std::getline(css, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 1);
    }
    CHECK(rows == 3);
}

TEST_CASE("cli: tilted tail runs through the tail subcommand") {
    const auto r = run_cli("tail --d 2 --n 6 --model switching --lambda 0.5,1.0 --tilt 0.25 "
                           "--samples 5000 --seed 6");
    CHECK(r.exit_code == 0);
    std::stringstream ss(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(ss, line)) {
        ++rows;
        CHECK(line.find("\"estimator\":\"tilted\"") != std::string::npos);
        CHECK(line.find("\"ess\":") != std::string::npos);
    }
    CHECK(rows == 2);

    const auto bad = run_cli("tail --d 2 --n 6 --model brw --lambda 0.5 --samples 5000");
    CHECK(bad.exit_code == 1);
}

TEST_CASE("cli: manifest written alongside results") {
    std::remove("/tmp/brwsim_cli_out.jsonl");
    std::remove("/tmp/brwsim_cli_out.jsonl.manifest.json");
    const auto r = run_cli("positivity --d 2 --n 1 --method conditional --samples 1000 "
                           "--seed 11 --out /tmp/brwsim_cli_out.jsonl");
    CHECK(r.exit_code == 0);
    const std::string manifest = read_file("/tmp/brwsim_cli_out.jsonl.manifest.json");
    CHECK(manifest.find("\"subcommand\": \"positivity\"") != std::string::npos);
    CHECK(manifest.find("\"finished_utc\"") != std::string::npos);
    CHECK(manifest.find("\"seed\": \"11\"") != std::string::npos);
    CHECK(read_file("/tmp/brwsim_cli_out.jsonl").find("\"value\":") != std::string::npos);
}

TEST_CASE("cli: identical runs produce identical payload bytes") {
    run_cli("positivity --d 2 --n 3 --method conditional --samples 20000 --seed 21 "
            "--out /tmp/brwsim_cli_a.jsonl");
    run_cli("positivity --d 2 --n 3 --method conditional --samples 20000 --seed 21 "
            "--out /tmp/brwsim_cli_b.jsonl");
    const auto a = read_file("/tmp/brwsim_cli_a.jsonl");
    CHECK(!a.empty());
    CHECK(a == read_file("/tmp/brwsim_cli_b.jsonl"));
}

TEST_CASE("cli: config file merges under explicit flags") {
    {
        std::ofstream f("/tmp/brwsim_cli.cfg");
        f << "d=2\nn=12\nsamples=1000\n";
    }
    const auto r = run_cli("positivity --config /tmp/brwsim_cli.cfg --n 2 --seed 1 "
                           "--method conditional");
    CHECK(r.exit_code == 0);
    CHECK(extract_number(r.out, "n") == 2);      // flag wins
    CHECK(extract_number(r.out, "d") == 2);      // config fills the rest
    CHECK(extract_number(r.out, "samples") == 1000);
}

TEST_CASE("cli: unknown config key lists the valid keys") {
    {
        std::ofstream f("/tmp/brwsim_cli_bad.cfg");
        f << "dd=2\n";
    }
    const auto r = run_cli("positivity --config /tmp/brwsim_cli_bad.cfg --samples 1000");
    CHECK(r.exit_code == 1);
    const auto err = stderr_text();
    CHECK(err.find("'dd'") != std::string::npos);
    CHECK(err.find("valid keys") != std::string::npos);
}

TEST_CASE("cli: usage errors exit with 1 and one diagnostic line") {
    CHECK(run_cli("positivity --no-such-flag").exit_code == 1);
    CHECK(run_cli("no-such-command").exit_code == 1);
    CHECK(run_cli("positivity --d 1 --n 2 --samples 1000").exit_code == 1);
    CHECK(run_cli("cond-mean --d 2 --n 2 --samples 10").exit_code == 1);
}
