#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "polariton/config.hpp"
#include "polariton/eigensolver.hpp"

namespace polariton {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Content hash of everything that determines a sector spectrum, including
// the code version and the cache file format.
std::string spectrum_cache_key(const Sector& sector, const ModelParams& params);

void save_spectrum(const SpectrumResult& spectrum, const std::filesystem::path& path);
// Throws FormatError on a bad header or truncated file.
SpectrumResult load_spectrum(const std::filesystem::path& path);

/// Directory of binary spectrum files plus an index.json describing them.
class SpectrumCache {
 public:
  SpectrumCache(std::filesystem::path dir, CachePolicy policy);

  CachePolicy policy() const { return policy_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path file_for(const std::string& key) const { return dir_ / (key + ".spec"); }

  // A cached spectrum without vectors does not satisfy a request for vectors.
  // Unreadable or mismatching files count as misses.
  std::optional<SpectrumResult> load(const Sector& sector, const ModelParams& params, bool need_vectors) const;
  void store(const SpectrumResult& spectrum);

  // Merges entries stored by this instance into index.json.
  void write_index() const;

 private:
  std::filesystem::path dir_;
  CachePolicy policy_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> added_;  // key -> sector label and parameters
};

}  // namespace polariton
