#pragma once

#include <filesystem>
#include <string>

namespace crest::test {

// Fresh, empty directory under the build tree's test scratch area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(CREST_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace crest::test
