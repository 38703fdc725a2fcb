#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace testutil {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(IOTL_SOURCE_DIR); }
inline fs::path fixture_path(const std::string& name) {
    return source_dir() / "tests" / "fixtures" / name;
}
inline fs::path data_path(const std::string& name) { return source_dir() / "data" / name; }

struct TempDir {
    fs::path path;
    TempDir() {
        auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() /
               ("iotl_test_" + std::to_string(stamp) + "_" + std::to_string(rng() & 0xFFFF));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

#ifdef IOTL_BIN
struct CliResult {
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
};

// Runs the built CLI binary with stdout/stderr captured to files.
inline CliResult run_cli(const std::string& args) {
    TempDir io;
    const fs::path out = io.path / "stdout.txt";
    const fs::path err = io.path / "stderr.txt";
    std::string cmd = std::string(IOTL_BIN) + " " + args + " > " + out.string() + " 2> " +
                      err.string();
    int raw = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.stdout_text = read_file(out);
    result.stderr_text = read_file(err);
    return result;
}
#endif

}  // namespace testutil
