#include "polariton/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polariton/binary_io.hpp"
#include "polariton/error.hpp"

namespace polariton {

std::string_view to_string(Boundary boundary) {
  return boundary == Boundary::Periodic ? "pbc" : "hwbc";
}

std::string to_string(Parity parity) {
  switch (parity) {
    case Parity::Even: return "+1";
    case Parity::Odd: return "-1";
    case Parity::None: break;
  }
  return "none";
}

Boundary parse_boundary(std::string_view text) {
  if (text == "pbc" || text == "PBC" || text == "periodic") return Boundary::Periodic;
  if (text == "hwbc" || text == "HWBC" || text == "open" || text == "hardwall") {
    return Boundary::HardWall;
  }
  throw InvalidSectorError("unknown boundary condition '" + std::string(text) + "'");
}

Parity parse_parity(std::string_view text) {
  if (text == "+1" || text == "1" || text == "+" || text == "even") return Parity::Even;
  if (text == "-1" || text == "-" || text == "odd") return Parity::Odd;
  if (text == "none" || text == "0" || text.empty()) return Parity::None;
  throw InvalidSectorError("unknown parity '" + std::string(text) + "'");
}

int BasisState::excitations() const {
  int total = 0;
  for (const auto& site : sites) total += site.excitations();
  return total;
}

BasisState apply_translation(const BasisState& state) {
  BasisState out = state;
  if (!state.sites.empty()) {
    std::rotate(out.sites.rbegin(), out.sites.rbegin() + 1, out.sites.rend());
  }
  return out;
}

BasisState apply_reflection(const BasisState& state) {
  BasisState out = state;
  std::reverse(out.sites.begin(), out.sites.end());
  return out;
}

// ---------------------------------------------------------------------------

StateCodec::StateCodec(int sites, int max_excitations) : sites_(sites) {
  if (sites < 1) throw DomainError("site count must be >= 1");
  if (max_excitations < 0) throw DomainError("excitation number must be >= 0");
  radix_ = 2 * static_cast<StateKey>(max_excitations) + 2;
  place_.assign(sites, 1);
  unsigned __int128 p = 1;
  for (int i = sites - 1; i >= 0; --i) {
    place_[i] = static_cast<StateKey>(p);
    p *= radix_;
    if (p > UINT64_MAX) throw OverflowError("state keys do not fit in 64 bits");
  }
}

StateKey StateCodec::encode(const BasisState& state) const {
  if (static_cast<int>(state.sites.size()) != sites_) {
    throw DimensionMismatchError("state has wrong number of sites");
  }
  StateKey key = 0;
  for (int i = 0; i < sites_; ++i) {
    const auto& s = state.sites[i];
    const StateKey d = 2 * static_cast<StateKey>(s.photons) + s.atom;
    if (s.photons < 0 || s.atom < 0 || s.atom > 1 || d >= radix_) {
      throw DomainError("site state outside codec range");
    }
    key += d * place_[i];
  }
  return key;
}

BasisState StateCodec::decode(StateKey key) const {
  BasisState state;
  state.sites.resize(sites_);
  for (int i = 0; i < sites_; ++i) {
    const int d = digit(key, i);
    state.sites[i] = {d >> 1, d & 1};
  }
  return state;
}

StateKey StateCodec::translate(StateKey key, int shift) const {
  shift %= sites_;
  if (shift < 0) shift += sites_;
  for (int j = 0; j < shift; ++j) key = translate(key);
  return key;
}

StateKey StateCodec::reflect(StateKey key) const {
  StateKey out = 0;
  for (int i = 0; i < sites_; ++i) {
    out += static_cast<StateKey>(digit(key, i)) * place_[sites_ - 1 - i];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

unsigned __int128 binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > UINT64_MAX) throw OverflowError("binomial coefficient exceeds 64 bits");
  }
  return result;
}

void fill_states(const StateCodec& codec, int site, int remaining, StateKey prefix,
                 std::vector<StateKey>& out) {
  const int last = codec.sites() - 1;
  if (site == last) {
    // Last site takes all remaining quanta: (rem-1, e) sorts before (rem, g).
    if (remaining >= 1) out.push_back(prefix + (2 * static_cast<StateKey>(remaining) - 1) * codec.place(site));
    out.push_back(prefix + 2 * static_cast<StateKey>(remaining) * codec.place(site));
    return;
  }
  for (int d = 0; d <= 2 * remaining; ++d) {
    const int used = (d >> 1) + (d & 1);
    if (used > remaining) continue;
    fill_states(codec, site + 1, remaining - used, prefix + static_cast<StateKey>(d) * codec.place(site), out);
  }
}

}  // namespace

std::uint64_t full_dimension(int sites, int excitations) {
  if (sites < 1) throw DomainError("site count must be >= 1");
  if (excitations < 0) throw DomainError("excitation number must be >= 0");
  unsigned __int128 total = 0;
  const int top = std::min(sites, excitations);
  for (int s = 0; s <= top; ++s) {
    total += binomial(sites, s) *
             binomial(static_cast<std::uint64_t>(excitations - s + sites - 1), sites - 1);
    if (total > UINT64_MAX) throw OverflowError("Hilbert-space dimension exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(total);
}

ProductBasis ProductBasis::enumerate(int sites, int excitations, std::size_t max_states) {
  const auto dim = full_dimension(sites, excitations);
  if (dim > max_states) {
    throw CapacityError("product basis of dimension " + std::to_string(dim) +
                        " exceeds the configured maximum " + std::to_string(max_states));
  }
  ProductBasis basis(sites, excitations);
  basis.keys_.reserve(dim);
  fill_states(basis.codec_, 0, excitations, 0, basis.keys_);
  return basis;
}

std::optional<std::size_t> ProductBasis::index_of(StateKey key) const {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys_.begin());
}

std::vector<BasisState> enumerate_basis(int sites, int excitations, std::size_t max_states) {
  const auto basis = ProductBasis::enumerate(sites, excitations, max_states);
  std::vector<BasisState> states;
  states.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) states.push_back(basis.state(i));
  return states;
}

// ---------------------------------------------------------------------------

void Sector::validate() const {
  if (sites < 1) throw InvalidSectorError("site count must be >= 1");
  if (excitations < 0) throw InvalidSectorError("excitation number must be >= 0");
  if (boundary == Boundary::HardWall) {
    if (momentum) throw InvalidSectorError("momentum is not a quantum number under HWBC");
    return;
  }
  if (!momentum) throw InvalidSectorError("PBC sectors need a momentum index Q");
  if (*momentum < 0 || *momentum >= sites) {
    throw InvalidSectorError("momentum index Q=" + std::to_string(*momentum) + " outside [0, L)");
  }
  if (parity != Parity::None && (2 * *momentum) % sites != 0) {
    throw InvalidSectorError("parity only commutes with translations at Q=0 or Q=L/2");
  }
}

bool Sector::is_real() const {
  return boundary == Boundary::HardWall || (momentum && (2 * *momentum) % sites == 0);
}

std::string Sector::label() const {
  std::string out = "L" + std::to_string(sites) + "_N" + std::to_string(excitations) + "_" +
                    std::string(to_string(boundary));
  if (momentum) out += "_Q" + std::to_string(*momentum);
  if (parity != Parity::None) out += "_p" + std::string(parity == Parity::Even ? "+1" : "-1");
  return out;
}

std::vector<Sector> all_sectors(int sites, int excitations, Boundary boundary) {
  std::vector<Sector> out;
  if (boundary == Boundary::HardWall) {
    for (Parity p : {Parity::Even, Parity::Odd}) {
      out.push_back({sites, excitations, boundary, std::nullopt, p});
    }
    if (sites == 1) out = {{sites, excitations, boundary, std::nullopt, Parity::None}};
    return out;
  }
  for (int q = 0; q < sites; ++q) {
    if ((2 * q) % sites == 0 && sites > 1) {
      for (Parity p : {Parity::Even, Parity::Odd}) out.push_back({sites, excitations, boundary, q, p});
    } else {
      out.push_back({sites, excitations, boundary, q, Parity::None});
    }
  }
  return out;
}

namespace {

struct GroupElement {
  int shift;
  bool reflect;
  std::complex<double> character;
};

std::vector<GroupElement> sector_group(const Sector& sector) {
  std::vector<GroupElement> group;
  const double p = static_cast<double>(static_cast<int>(sector.parity));
  if (sector.boundary == Boundary::HardWall) {
    group.push_back({0, false, 1.0});
    if (sector.parity != Parity::None) group.push_back({0, true, p});
    return group;
  }
  const int L = sector.sites;
  const int q = *sector.momentum;
  for (int j = 0; j < L; ++j) {
    std::complex<double> chi;
    if (sector.is_real()) {
      chi = (q == 0 || j % 2 == 0) ? 1.0 : -1.0;
    } else {
      const double angle = 2.0 * std::numbers::pi * q * j / L;
      chi = {std::cos(angle), std::sin(angle)};
    }
    group.push_back({j, false, chi});
    if (sector.parity != Parity::None) group.push_back({j, true, p * chi});
  }
  return group;
}

constexpr std::int64_t kUnvisited = -2;

}  // namespace

SymBasis SymBasis::build(const Sector& sector, std::shared_ptr<const ProductBasis> product) {
  sector.validate();
  if (product->sites() != sector.sites || product->excitations() != sector.excitations) {
    throw DimensionMismatchError("product basis does not match sector " + sector.label());
  }
  SymBasis basis;
  basis.sector_ = sector;
  basis.product_ = std::move(product);
  const auto& prod = *basis.product_;
  const auto& codec = prod.codec();
  const auto group = sector_group(sector);
  const double inv_order = 1.0 / static_cast<double>(group.size());

  basis.owner_.assign(prod.size(), kUnvisited);
  basis.components_.assign(prod.size(), 0.0);

  std::vector<std::pair<StateKey, std::complex<double>>> images;
  for (std::size_t idx = 0; idx < prod.size(); ++idx) {
    if (basis.owner_[idx] != kUnvisited) continue;
    // Keys are visited in ascending order, so this is the orbit minimum.
    const StateKey rep = prod.key(idx);
    images.clear();
    for (const auto& g : group) {
      StateKey s = codec.translate(rep, g.shift);
      if (g.reflect) s = codec.reflect(s);
      images.emplace_back(s, std::conj(g.character) * inv_order);
    }
    std::sort(images.begin(), images.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t unique = 0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (unique > 0 && images[unique - 1].first == images[i].first) {
        images[unique - 1].second += images[i].second;
      } else {
        images[unique++] = images[i];
      }
    }
    images.resize(unique);

    double norm2 = 0.0;
    for (const auto& [key, amp] : images) norm2 += std::norm(amp);
    const bool admitted = norm2 > 1e-10 * inv_order;
    const double norm = std::sqrt(norm2);
    const auto k = static_cast<std::int64_t>(basis.representatives_.size());
    if (admitted) {
      basis.representatives_.push_back(rep);
      basis.norms_.push_back(norm);
    }
    for (const auto& [key, amp] : images) {
      const auto where = prod.index_of(key);
      if (!where) throw Error("symmetry image left the product basis; codec is inconsistent");
      basis.owner_[*where] = admitted ? k : -1;
      basis.components_[*where] = admitted ? amp / norm : 0.0;
    }
  }
  return basis;
}

Eigen::VectorXcd SymBasis::expand(const Eigen::Ref<const Eigen::VectorXcd>& coefficients) const {
  if (static_cast<std::size_t>(coefficients.size()) != dimension()) {
    throw DimensionMismatchError("coefficient vector does not match sector dimension");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(owner_.size()));
  for (std::size_t i = 0; i < owner_.size(); ++i) {
    if (owner_[i] >= 0) out[static_cast<Eigen::Index>(i)] = coefficients[owner_[i]] * components_[i];
  }
  return out;
}

Eigen::VectorXd SymBasis::expand(const Eigen::Ref<const Eigen::VectorXd>& coefficients) const {
  if (!is_real()) throw DomainError("real expansion requested for a complex sector");
  if (static_cast<std::size_t>(coefficients.size()) != dimension()) {
    throw DimensionMismatchError("coefficient vector does not match sector dimension");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(owner_.size()));
  for (std::size_t i = 0; i < owner_.size(); ++i) {
    if (owner_[i] >= 0) out[static_cast<Eigen::Index>(i)] = coefficients[owner_[i]] * components_[i].real();
  }
  return out;
}

namespace {
constexpr const char* kBasisMagic = "PEDBASIS";
constexpr std::uint32_t kBasisVersion = 1;
}  // namespace

void SymBasis::save(const std::filesystem::path& path) const {
  io::BinaryWriter out(path);
  out.put_array<char>(std::span<const char>(kBasisMagic, 8));
  out.put<std::uint32_t>(kBasisVersion);
  out.put<std::int32_t>(sector_.sites);
  out.put<std::int32_t>(sector_.excitations);
  out.put<std::int32_t>(static_cast<std::int32_t>(sector_.boundary));
  out.put<std::int32_t>(sector_.momentum.value_or(-1));
  out.put<std::int32_t>(static_cast<std::int32_t>(sector_.parity));
  out.put<std::uint64_t>(product_->size());
  out.put_array<StateKey>(representatives_);
  out.put_array<double>(norms_);
  out.put_array<std::int64_t>(owner_);
  out.put_array<std::complex<double>>(components_);
  out.commit();
}

SymBasis SymBasis::load(const std::filesystem::path& path, const Sector& sector,
                        std::shared_ptr<const ProductBasis> product) {
  io::BinaryReader in(path);
  const auto magic = in.get_array<char>(8);
  if (std::string(magic.begin(), magic.end()) != kBasisMagic) {
    throw FormatError(path.string() + ": not a basis cache file");
  }
  if (in.get<std::uint32_t>() != kBasisVersion) throw FormatError(path.string() + ": version mismatch");
  Sector stored;
  stored.sites = in.get<std::int32_t>();
  stored.excitations = in.get<std::int32_t>();
  stored.boundary = static_cast<Boundary>(in.get<std::int32_t>());
  const auto q = in.get<std::int32_t>();
  if (q >= 0) stored.momentum = q;
  stored.parity = static_cast<Parity>(in.get<std::int32_t>());
  if (!(stored == sector)) throw FormatError(path.string() + ": sector mismatch");
  if (in.get<std::uint64_t>() != product->size()) throw FormatError(path.string() + ": product size mismatch");

  SymBasis basis;
  basis.sector_ = sector;
  basis.product_ = std::move(product);
  const auto n = basis.product_->size();
  basis.representatives_ = in.get_array<StateKey>(n);
  basis.norms_ = in.get_array<double>(n);
  basis.owner_ = in.get_array<std::int64_t>(n);
  basis.components_ = in.get_array<std::complex<double>>(n);
  if (basis.norms_.size() != basis.representatives_.size() || basis.owner_.size() != n ||
      basis.components_.size() != n) {
    throw FormatError(path.string() + ": inconsistent array lengths");
  }
  return basis;
}

SymBasis build_sector_basis(int sites, int excitations, Boundary boundary,
                            std::optional<int> momentum, Parity parity, std::size_t max_states) {
  const Sector sector{sites, excitations, boundary, momentum, parity};
  sector.validate();
  auto product = std::make_shared<const ProductBasis>(
      ProductBasis::enumerate(sites, excitations, max_states));
  return SymBasis::build(sector, std::move(product));
}

}  // namespace polariton
