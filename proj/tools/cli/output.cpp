#include "output.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include <openssl/evp.h>

#include "ccesnet/error.hpp"
#include "text_util.hpp"

namespace ccesnet::cli {

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::io, "cli", "cannot create output directory", {{"path", root_.string()}});
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const auto path = root_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cli", "cannot write file", {{"path", path.string()}});
  out << content;
  if (!out) throw Error(ErrorCode::io, "cli", "write failed", {{"path", path.string()}});
  adopt(name);
}

void OutputDir::adopt(const std::string& name) {
  if (!std::filesystem::exists(root_ / name)) {
    throw Error(ErrorCode::io, "cli", "expected output is missing", {{"path", (root_ / name).string()}});
  }
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string fmt(double x) { return detail::format_double(x); }

std::string labelled_matrix_csv(const Matrix& m, const std::vector<std::string>& ids, const std::vector<int>& order,
                                const std::string& corner) {
  std::string s = corner;
  for (int j : order) s += "," + ids[j];
  s += "\n";
  for (int i : order) {
    s += ids[i];
    for (int j : order) s += "," + fmt(m(i, j));
    s += "\n";
  }
  return s;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ccesnet::cli
