#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "polariton/error.hpp"

namespace polariton::io {

// Raw little-endian records for the cache files. Files are written to a
// temporary name and renamed into place so readers never see partial files.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::filesystem::path path);
  ~BinaryWriter();
  BinaryWriter(const BinaryWriter&) = delete;
  BinaryWriter& operator=(const BinaryWriter&) = delete;

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  void put(const T& value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  void put_array(std::span<const T> values) {
    put<std::uint64_t>(values.size());
    out_.write(reinterpret_cast<const char*>(values.data()),
               static_cast<std::streamsize>(values.size_bytes()));
  }

  void put_string(const std::string& text);

  // Flushes and atomically moves the file into place.
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    check();
    return value;
  }

  template <typename T>
    requires std::is_trivially_copyable_v<T>
  std::vector<T> get_array(std::uint64_t max_count = UINT64_MAX) {
    const auto count = get<std::uint64_t>();
    if (count > max_count) throw FormatError("array length exceeds limit in " + path_.string());
    std::vector<T> values(count);
    in_.read(reinterpret_cast<char*>(values.data()),
             static_cast<std::streamsize>(count * sizeof(T)));
    check();
    return values;
  }

  // Reads exactly values.size() elements after a length prefix equal to it.
  template <typename T>
    requires std::is_trivially_copyable_v<T>
  void get_into(std::span<T> values) {
    const auto count = get<std::uint64_t>();
    if (count != values.size()) throw FormatError("array length mismatch in " + path_.string());
    in_.read(reinterpret_cast<char*>(values.data()),
             static_cast<std::streamsize>(values.size_bytes()));
    check();
  }

  std::string get_string();
  void expect_magic(const std::string& magic, std::uint32_t version);

 private:
  void check();

  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace polariton::io
