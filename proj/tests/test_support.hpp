#pragma once

// Shared helpers for the test binaries. Paths come in via compile
// definitions from tests/CMakeLists.txt.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#ifndef QUASAR_TEST_DIR
#error "QUASAR_TEST_DIR must be defined"
#endif
#ifndef QUASAR_DATA_DIR
#error "QUASAR_DATA_DIR must be defined"
#endif

namespace test_support {

inline std::string test_dir() { return QUASAR_TEST_DIR; }
inline std::string data_dir() { return QUASAR_DATA_DIR; }
inline std::string fixture(const std::string& name) {
    return test_dir() + "/fixtures/" + name;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return out;
}

inline void spit(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

// Unique temp directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "quasar-test") {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace test_support
