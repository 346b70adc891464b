// Command-line front end. Everything goes through the public C interface;
// this translation unit deliberately includes no core headers.
#include <usqt.h>

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

namespace {

const char* kUsage =
    "usage: usqt <command> [options]\n"
    "\n"
    "commands:\n"
    "  simulate   synthesize phantom RF frames into <out>/frames\n"
    "  envelope   detect envelopes into <out>/envelopes\n"
    "  features   fit parametric maps and write feature tables\n"
    "  evaluate   cross-validate classifiers and write a report\n"
    "  all        run the full chain\n"
    "\n"
    "options:\n"
    "  --config FILE     load a key=value configuration file first\n"
    "  --model LIST      comma-separated models: rayleigh,rician,k,nakagami,nig\n"
    "  --window HxW[xS]  sliding window height,width and optional stride\n"
    "  --depth N         wavelet decomposition depth (1..6)\n"
    "  --cv SCHEME       cross-validation scheme: logo or kfold\n"
    "  --k N             folds for kfold\n"
    "  --repeats N       repeats for kfold\n"
    "  --seed N          master seed\n"
    "  --in DIR          input directory (default: previous stage's output)\n"
    "  --out DIR         output directory (default: usqt_out)\n"
    "  --threads N       worker threads (0 = automatic)\n"
    "  --help            show this help\n"
    "  --version         print the library version\n"
    "\n"
    "exit status: 0 success, 1 run-time failure, 2 usage or configuration "
    "error\n";

[[noreturn]] void die_usage(const std::string& message) {
    std::fprintf(stderr, "usqt: %s\n\n%s", message.c_str(), kUsage);
    std::exit(2);
}

bool is_known_command(const std::string& cmd) {
    return cmd == "simulate" || cmd == "envelope" || cmd == "features" ||
           cmd == "evaluate" || cmd == "all";
}

// Prints a written report file to stdout; the evaluation stages produce
// human-readable text that doubles as the command's output.
void print_file(const char* path) {
    std::FILE* f = std::fopen(path, "rb");
    if (!f) return;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0)
        std::fwrite(buf, 1, got, stdout);
    std::fclose(f);
}

struct FlagValue {
    std::string flag;
    std::string value;
};

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) die_usage("missing command");
    std::string command = argv[1];
    if (command == "--help" || command == "-h") {
        std::fputs(kUsage, stdout);
        return 0;
    }
    if (command == "--version") {
        std::printf("usqt %s\n", usqt_version());
        return 0;
    }
    if (!is_known_command(command))
        die_usage("unknown command '" + command + "'");

    std::string config_file;
    std::vector<FlagValue> flags;
    for (int i = 2; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("--", 0) != 0)
            die_usage("unexpected argument '" + arg + "'");
        arg.erase(0, 2);
        std::string value;
        const size_t eq = arg.find('=');
        if (eq != std::string::npos) {
            value = arg.substr(eq + 1);
            arg.erase(eq);
        } else if (arg == "help") {
            std::fputs(kUsage, stdout);
            return 0;
        } else {
            if (i + 1 >= argc)
                die_usage("flag '--" + arg + "' requires a value");
            value = argv[++i];
        }
        if (arg == "config")
            config_file = value;
        else
            flags.push_back({arg, value});
    }

    usqt_config* config = usqt_config_new();
    if (!config) {
        std::fprintf(stderr, "usqt: %s\n", usqt_last_error());
        return 2;
    }
    // The configuration file forms the base; command-line flags override it
    // regardless of their position relative to --config.
    if (!config_file.empty() &&
        usqt_config_load_file(config, config_file.c_str()) != USQT_OK) {
        std::fprintf(stderr, "usqt: %s\n", usqt_last_error());
        usqt_config_free(config);
        return 2;
    }
    for (const FlagValue& fv : flags) {
        if (usqt_config_set_flag(config, fv.flag.c_str(), fv.value.c_str()) !=
            USQT_OK) {
            std::fprintf(stderr, "usqt: %s\n", usqt_last_error());
            usqt_config_free(config);
            return 2;
        }
    }
    if (usqt_config_validate(config) != USQT_OK) {
        std::fprintf(stderr, "usqt: %s\n", usqt_last_error());
        usqt_config_free(config);
        return 2;
    }

    usqt_result* result = nullptr;
    const int status = usqt_run(config, command.c_str(), &result);
    if (status != USQT_OK) {
        std::fprintf(stderr, "usqt: %s failed (%s): %s\n", command.c_str(),
                     usqt_status_name(status), usqt_last_error());
        usqt_config_free(config);
        return 1;
    }

    const int processed = usqt_result_processed(result);
    const int failed = usqt_result_failed(result);
    std::printf("command=%s processed=%d failed=%d\n", command.c_str(),
                processed, failed);
    for (size_t i = 0; i < usqt_result_output_count(result); ++i)
        std::printf("wrote %s\n", usqt_result_output(result, i));
    for (size_t i = 0; i < usqt_result_failure_count(result); ++i)
        std::fprintf(stderr, "usqt: failed: %s\n",
                     usqt_result_failure(result, i));

    if (command == "evaluate" || command == "all") {
        for (size_t i = 0; i < usqt_result_output_count(result); ++i) {
            const std::string path = usqt_result_output(result, i);
            if (path.find("evaluation_") != std::string::npos) {
                std::printf("\n");
                print_file(path.c_str());
            }
        }
    }

    usqt_result_free(result);
    usqt_config_free(config);
    return failed > 0 ? 1 : 0;
}
