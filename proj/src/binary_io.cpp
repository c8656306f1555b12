#include "polariton/binary_io.hpp"

#include <system_error>

namespace polariton::io {

BinaryWriter::BinaryWriter(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  temp_ = path_;
  temp_ += ".tmp";
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot open " + temp_.string() + " for writing");
}

BinaryWriter::~BinaryWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
  }
}

void BinaryWriter::put_string(const std::string& text) {
  put<std::uint64_t>(text.size());
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void BinaryWriter::commit() {
  out_.flush();
  if (!out_) throw Error("write failed for " + temp_.string());
  out_.close();
  std::filesystem::rename(temp_, path_);
  committed_ = true;
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw Error("cannot open " + path.string());
}

std::string BinaryReader::get_string() {
  const auto size = get<std::uint64_t>();
  if (size > (1u << 26)) throw FormatError("string too long in " + path_.string());
  std::string text(size, '\0');
  in_.read(text.data(), static_cast<std::streamsize>(size));
  check();
  return text;
}

void BinaryReader::expect_magic(const std::string& magic, std::uint32_t version) {
  std::string found(magic.size(), '\0');
  in_.read(found.data(), static_cast<std::streamsize>(found.size()));
  check();
  if (found != magic) throw FormatError(path_.string() + ": bad magic");
  const auto stored = get<std::uint32_t>();
  if (stored != version) {
    throw FormatError(path_.string() + ": format version " + std::to_string(stored) +
                      ", expected " + std::to_string(version));
  }
}

void BinaryReader::check() {
  if (!in_) throw FormatError("truncated file " + path_.string());
}

}  // namespace polariton::io
