#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mars::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Exclusive ownership of an output directory for the lifetime of the
/// object, through a ".mars.lock" file created with O_EXCL.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
};

/// One line of manifest.jsonl.
struct ManifestEntry {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  double wall_time_seconds = 0.0;
};

/// Appends the entry, hashing every output, to dir/manifest.jsonl.
void append_manifest(const std::filesystem::path& dir, const ManifestEntry& entry);

}  // namespace mars::cli
