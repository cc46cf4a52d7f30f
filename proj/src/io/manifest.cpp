#include "shelab/io/manifest.hpp"

#include <unistd.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "shelab/errors.hpp"
#include "shelab/io/serialize.hpp"

namespace shelab::io {

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ResourceError("cannot read " + file.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw ResourceError("SHA-256 init failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%FT%TZ");
  return os.str();
}

std::string host_descriptor() {
  char name[256] = {};
  if (gethostname(name, sizeof name - 1) != 0) name[0] = '\0';
  return std::string(name[0] ? name : "unknown-host") + "; " +
         std::to_string(std::thread::hardware_concurrency()) + " hardware threads";
}

void RunManifest::add_file(const std::filesystem::path& root, const std::filesystem::path& file) {
  ManifestEntry e;
  e.path = std::filesystem::relative(file, root).generic_string();
  e.sha256 = sha256_file(file);
  e.bytes = std::filesystem::file_size(file);
  files.push_back(std::move(e));
}

namespace {

Json to_json(const RunManifest& m) {
  Json files = Json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"command", m.command},   {"spec_hash", m.spec_hash}, {"master_seed", m.master_seed},
          {"version", m.version},   {"started", m.started},     {"finished", m.finished},
          {"host", m.host},         {"incomplete", m.incomplete}, {"files", files}};
}

}  // namespace

std::filesystem::path append_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "manifest.jsonl";
  std::ofstream out(path, std::ios::app);
  if (!out) throw ResourceError("cannot append to " + path.string());
  out << to_json(m).dump() << '\n';
  if (!out) throw ResourceError("failed writing " + path.string());
  return path;
}

std::vector<RunManifest> read_manifests(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ResourceError("cannot open " + file.string());
  std::vector<RunManifest> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.spec_hash = j.at("spec_hash").get<std::string>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.host = j.at("host").get<std::string>();
    m.incomplete = j.at("incomplete").get<bool>();
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("bytes").get<std::uintmax_t>()});
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::string> verify_manifest(const std::filesystem::path& root, const RunManifest& m) {
  std::vector<std::string> bad;
  for (const auto& f : m.files) {
    const auto p = root / f.path;
    if (!std::filesystem::exists(p) || sha256_file(p) != f.sha256) bad.push_back(f.path);
  }
  return bad;
}

}  // namespace shelab::io
