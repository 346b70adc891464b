// End-to-end tests of the command-line tool. The binary path arrives via
// the USQT_CLI environment variable (set by the test registration); each
// case launches the real executable and inspects exit code and output.
#include <doctest.h>

#include "test_util.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using namespace usqt::test;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("USQT_CLI");
    if (env && *env) return env;
    return "../usqt"; // ctest runs test binaries from build/tests
}

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = "\"" + cli_path() + "\" " + args + " 2>&1";
    std::FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0)
        result.output.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::string tiny_config_file(const std::string& dir) {
    const std::string path = dir + "/pipeline.conf";
    write_file(path,
               "# compact dataset for fast end-to-end checks\n"
               "pipeline.models = nakagami\n"
               "pipeline.seed = 7\n"
               "pipeline.threads = 1\n"
               "map.window_height = 15\n"
               "map.window_width = 15\n"
               "map.stride = 4\n"
               "wavelet.depth = 1\n"
               "wavelet.basis = full\n"
               "phantom.rows = 320\n"
               "phantom.cols = 80\n"
               "phantom.frames_per_class = 2\n"
               "phantom.groups_per_class = 2\n"
               "phantom.density_a = 20\n"
               "phantom.density_b = 0.5\n");
    return path;
}

} // namespace

TEST_CASE("help and version succeed without a command") {
    const RunResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(contains(help.output, "usage"));
    CHECK(contains(help.output, "simulate"));

    const RunResult version = run_cli("--version");
    CHECK(version.exit_code == 0);
    CHECK(contains(version.output, "usqt"));
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(run_cli("").exit_code == 2);

    const RunResult unknown = run_cli("transmogrify");
    CHECK(unknown.exit_code == 2);
    CHECK(contains(unknown.output, "transmogrify"));

    const RunResult bad_flag = run_cli("all --bogus 1");
    CHECK(bad_flag.exit_code == 2);
    CHECK(contains(bad_flag.output, "bogus"));

    const RunResult bad_value = run_cli("all --depth 0");
    CHECK(bad_value.exit_code == 2);
    CHECK(contains(bad_value.output, "wavelet.depth"));

    const RunResult missing_value = run_cli("all --seed");
    CHECK(missing_value.exit_code == 2);

    const RunResult bad_file = run_cli("all --config /nonexistent.conf");
    CHECK(bad_file.exit_code == 2);
    CHECK(contains(bad_file.output, "/nonexistent.conf"));

    // Cross-field validation failures are also configuration errors.
    const RunResult bad_window = run_cli("all --window 14x15");
    CHECK(bad_window.exit_code == 2);
}

TEST_CASE("the full chain runs from a config file and prints the report") {
    const std::string dir = scratch_dir("cli_all");
    const std::string conf = tiny_config_file(dir);
    const std::string out = dir + "/out";

    const RunResult run =
        run_cli("all --config " + conf + " --out " + out);
    INFO(run.output);
    REQUIRE(run.exit_code == 0);
    CHECK(contains(run.output, "command=all"));
    CHECK(contains(run.output, "failed=0"));

    // The evaluation report is echoed to stdout.
    CHECK(contains(run.output, "scheme=leave-one-group-out"));
    CHECK(contains(run.output, "[fractal]"));
    CHECK(contains(run.output, "[details]"));

    CHECK(fs::exists(out + "/frames/manifest.txt"));
    CHECK(fs::exists(out + "/envelopes/a_000.env"));
    CHECK(fs::exists(out + "/features/nakagami.fractal.tsv"));
    CHECK(fs::exists(out + "/reports/evaluation_logo.txt"));

    // Flags override the config file: a k-fold evaluation of the same
    // feature tables lands in a second report.
    const RunResult eval = run_cli("evaluate --config " + conf + " --in " +
                                   out + "/features --out " + dir +
                                   "/out_kfold --cv kfold --k 2 --repeats 3");
    INFO(eval.output);
    REQUIRE(eval.exit_code == 0);
    CHECK(contains(eval.output, "scheme=k-fold"));
    CHECK(contains(eval.output, "accuracy_mean="));
    CHECK(fs::exists(dir + "/out_kfold/reports/evaluation_kfold.txt"));
}

TEST_CASE("per-frame failures surface as exit status 1") {
    const std::string dir = scratch_dir("cli_partial");
    const std::string conf = tiny_config_file(dir);
    const std::string out = dir + "/out";

    REQUIRE(run_cli("simulate --config " + conf + " --out " + out)
                .exit_code == 0);
    // Truncate one RF payload; its header stays inconsistent with the data.
    write_file(out + "/frames/a_001.rf", "xx");

    const RunResult envelope = run_cli("envelope --config " + conf +
                                       " --in " + out + "/frames --out " +
                                       dir + "/out2");
    INFO(envelope.output);
    CHECK(envelope.exit_code == 1);
    CHECK(contains(envelope.output, "a_001.rf"));
    CHECK(contains(envelope.output, "failed=1"));

    // A stage that cannot run at all is a run-time failure, not a usage
    // error.
    const RunResult no_inputs = run_cli("evaluate --config " + conf +
                                        " --out " + dir + "/empty");
    CHECK(no_inputs.exit_code == 1);
    CHECK(contains(no_inputs.output, "fractal.tsv"));
}
