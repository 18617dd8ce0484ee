#include "run_dir.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "mars/error.hpp"

namespace mars::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::io, "SHA-256 initialization failed");
  }
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < length; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 15]);
  }
  return out;
}

DirectoryLock::DirectoryLock(const std::filesystem::path& dir) : path_(dir / ".mars.lock") {
  std::filesystem::create_directories(dir);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw Error(ErrorCode::io, "output directory " + dir.string() + " is locked by another run (" +
                                     path_.string() + ")");
    }
    throw Error(ErrorCode::io, "cannot create lock " + path_.string() + ": " + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

DirectoryLock::~DirectoryLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

void append_manifest(const std::filesystem::path& dir, const ManifestEntry& entry) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : entry.outputs) {
    outputs.push_back({{"path", std::filesystem::relative(p, dir).generic_string()}, {"sha256", sha256_file(p)}});
  }
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& p : entry.inputs) inputs.push_back(p.generic_string());
  const nlohmann::json line = {
      {"command", entry.command},
      {"config", entry.config},
      {"seed", entry.seed},
      {"threads", entry.threads},
      {"inputs", inputs},
      {"outputs", outputs},
      {"wall_time_seconds", entry.wall_time_seconds},
  };
  std::ofstream out(dir / "manifest.jsonl", std::ios::app);
  if (!out) throw Error(ErrorCode::io, "cannot append to manifest in " + dir.string());
  out << line.dump() << '\n';
}

}  // namespace mars::cli
