#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace shelab::io {

struct ManifestEntry {
  std::string path;  // relative to the manifest directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string command;
  std::string spec_hash;
  std::uint64_t master_seed = 0;
  std::string version;
  std::string started;
  std::string finished;
  std::string host;
  bool incomplete = false;
  std::vector<ManifestEntry> files;

  /// Digests `file` and records it relative to `root`.
  void add_file(const std::filesystem::path& root, const std::filesystem::path& file);
};

std::string sha256_file(const std::filesystem::path& file);
std::string utc_timestamp();
std::string host_descriptor();

/// Appends one JSON line to `<dir>/manifest.jsonl`.
std::filesystem::path append_manifest(const std::filesystem::path& dir, const RunManifest& m);
/// Every manifest line in the file, oldest first.
std::vector<RunManifest> read_manifests(const std::filesystem::path& file);
/// Paths whose current digest no longer matches.
std::vector<std::string> verify_manifest(const std::filesystem::path& root, const RunManifest& m);

}  // namespace shelab::io
