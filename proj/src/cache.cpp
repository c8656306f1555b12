#include "polariton/cache.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <json.hpp>

#include "polariton/binary_io.hpp"
#include "polariton/error.hpp"
#include "polariton/version.hpp"

namespace polariton {

namespace {

constexpr const char* kSpectrumMagic = "PEDSPEC";
constexpr std::uint32_t kSpectrumFormat = 1;

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  }
  void update(const void* data, std::size_t size) { EVP_DigestUpdate(ctx_.get(), data, size); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len);
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string spectrum_cache_key(const Sector& sector, const ModelParams& params) {
  const nlohmann::json doc = {
      {"code_version", kCodeVersion},
      {"format", kSpectrumFormat},
      {"method", "dense"},
      {"sector", sector.label()},
      {"delta", params.delta},
      {"g", params.g},
      {"t", params.t},
  };
  return sha256_hex(doc.dump());
}

void save_spectrum(const SpectrumResult& s, const std::filesystem::path& path) {
  io::BinaryWriter w(path);
  w.put_string(kSpectrumMagic);
  w.put<std::uint32_t>(kSpectrumFormat);
  w.put_string(kCodeVersion);
  w.put<std::int32_t>(s.sector.sites);
  w.put<std::int32_t>(s.sector.excitations);
  w.put<std::int32_t>(static_cast<std::int32_t>(s.sector.boundary));
  w.put<std::int32_t>(s.sector.momentum ? 1 : 0);
  w.put<std::int32_t>(s.sector.momentum.value_or(0));
  w.put<std::int32_t>(static_cast<std::int32_t>(s.sector.parity));
  w.put<double>(s.params.delta);
  w.put<double>(s.params.g);
  w.put<double>(s.params.t);
  w.put<std::int32_t>(static_cast<std::int32_t>(s.params.boundary));
  w.put_array(std::span<const double>(s.eigenvalues.data(), static_cast<std::size_t>(s.eigenvalues.size())));
  w.put<double>(s.residual_max);
  if (s.has_real_vectors()) {
    const auto& v = s.real_vectors();
    w.put<std::uint8_t>(1);
    w.put<std::uint64_t>(static_cast<std::uint64_t>(v.rows()));
    w.put_array(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
  } else if (s.has_vectors()) {
    const auto& v = s.complex_vectors();
    w.put<std::uint8_t>(2);
    w.put<std::uint64_t>(static_cast<std::uint64_t>(v.rows()));
    w.put_array(std::span<const std::complex<double>>(v.data(), static_cast<std::size_t>(v.size())));
  } else {
    w.put<std::uint8_t>(0);
  }
  w.commit();
}

SpectrumResult load_spectrum(const std::filesystem::path& path) {
  io::BinaryReader r(path);
  if (r.get_string() != kSpectrumMagic) throw FormatError(path.string() + " is not a spectrum file");
  if (r.get<std::uint32_t>() != kSpectrumFormat) throw FormatError(path.string() + " has an unsupported format");
  if (r.get_string() != kCodeVersion) throw FormatError(path.string() + " was written by another code version");
  SpectrumResult s;
  s.sector.sites = r.get<std::int32_t>();
  s.sector.excitations = r.get<std::int32_t>();
  s.sector.boundary = static_cast<Boundary>(r.get<std::int32_t>());
  const bool has_q = r.get<std::int32_t>() != 0;
  const int q = r.get<std::int32_t>();
  if (has_q) s.sector.momentum = q;
  s.sector.parity = static_cast<Parity>(r.get<std::int32_t>());
  s.params.delta = r.get<double>();
  s.params.g = r.get<double>();
  s.params.t = r.get<double>();
  s.params.boundary = static_cast<Boundary>(r.get<std::int32_t>());
  const auto values = r.get_array<double>(std::uint64_t{1} << 32);
  s.eigenvalues = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  s.residual_max = r.get<double>();
  const auto kind = r.get<std::uint8_t>();
  if (kind != 0) {
    const auto rows = static_cast<Eigen::Index>(r.get<std::uint64_t>());
    const auto cols = s.eigenvalues.size();
    if (rows != cols) throw FormatError(path.string() + ": eigenvector block is not square");
    if (kind == 1) {
      Eigen::MatrixXd v(rows, cols);
      r.get_into(std::span<double>(v.data(), static_cast<std::size_t>(v.size())));
      s.eigenvectors = std::move(v);
    } else if (kind == 2) {
      Eigen::MatrixXcd v(rows, cols);
      r.get_into(std::span<std::complex<double>>(v.data(), static_cast<std::size_t>(v.size())));
      s.eigenvectors = std::move(v);
    } else {
      throw FormatError(path.string() + ": unknown eigenvector kind");
    }
  }
  return s;
}

SpectrumCache::SpectrumCache(std::filesystem::path dir, CachePolicy policy) : dir_(std::move(dir)), policy_(policy) {
  if (policy_ == CachePolicy::ReadWrite) std::filesystem::create_directories(dir_);
}

std::optional<SpectrumResult> SpectrumCache::load(const Sector& sector, const ModelParams& params,
                                                  bool need_vectors) const {
  if (policy_ == CachePolicy::Off) return std::nullopt;
  const auto path = file_for(spectrum_cache_key(sector, params));
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    auto s = load_spectrum(path);
    if (!(s.sector == sector) || s.params.delta != params.delta || s.params.g != params.g ||
        s.params.t != params.t || s.params.boundary != params.boundary) {
      return std::nullopt;
    }
    if (need_vectors && !s.has_vectors()) return std::nullopt;
    return s;
  } catch (const Error&) {
    return std::nullopt;
  }
}

void SpectrumCache::store(const SpectrumResult& spectrum) {
  if (policy_ != CachePolicy::ReadWrite) return;
  const auto key = spectrum_cache_key(spectrum.sector, spectrum.params);
  save_spectrum(spectrum, file_for(key));
  std::lock_guard lock(mutex_);
  added_[key] = fmt::format("{} delta={} g={} t={} vectors={}", spectrum.sector.label(), spectrum.params.delta,
                            spectrum.params.g, spectrum.params.t, spectrum.has_vectors());
}

void SpectrumCache::write_index() const {
  if (policy_ != CachePolicy::ReadWrite) return;
  std::lock_guard lock(mutex_);
  if (added_.empty()) return;
  const auto path = dir_ / "index.json";
  nlohmann::json index = nlohmann::json::object();
  if (std::ifstream in(path); in) {
    try {
      index = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
      index = nlohmann::json::object();
    }
  }
  for (const auto& [key, what] : added_) index[key] = what;
  const auto temp = path.string() + ".tmp";
  {
    std::ofstream out(temp);
    out << index.dump(2) << '\n';
  }
  std::filesystem::rename(temp, path);
}

}  // namespace polariton
