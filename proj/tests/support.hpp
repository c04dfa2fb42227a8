#pragma once

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hep/agent_runtime.hpp"

namespace test {

inline const std::filesystem::path kAssets = HEP_TEST_ASSETS;
inline const std::filesystem::path kGolden = HEP_TEST_GOLDEN;
inline const std::filesystem::path kFixtures = HEP_TEST_FIXTURES;

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

// A fresh directory under the build tree, emptied on every call.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::path(HEP_TEST_SCRATCH) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline const hep::World& world() {
    static const hep::World w = hep::load_world(kAssets);
    return w;
}

}  // namespace test
