#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace polariton {

enum class Boundary { Periodic, HardWall };

// Reflection eigenvalue of a sector; None means the reflection is not used.
enum class Parity : int { Odd = -1, None = 0, Even = 1 };

std::string_view to_string(Boundary boundary);
std::string to_string(Parity parity);
Boundary parse_boundary(std::string_view text);
Parity parse_parity(std::string_view text);

// One cavity: photon number and the two-level atom (0 = g, 1 = e).
struct SiteState {
  int photons = 0;
  int atom = 0;

  int excitations() const { return photons + atom; }
  friend bool operator==(const SiteState&, const SiteState&) = default;
};

struct BasisState {
  std::vector<SiteState> sites;

  int excitations() const;
  friend bool operator==(const BasisState&, const BasisState&) = default;
};

// Cyclic shift by one site: (A,B,C) -> (C,A,B).
BasisState apply_translation(const BasisState& state);
// Site-order reversal: (A,B,C) -> (C,B,A).
BasisState apply_reflection(const BasisState& state);

using StateKey = std::uint64_t;

/// Mixed-radix encoding of product states with at most `max_excitations`
/// quanta. Each site contributes the digit 2*photons + atom; site 0 is the
/// most significant digit, so key order equals lexicographic site order.
class StateCodec {
 public:
  StateCodec(int sites, int max_excitations);

  int sites() const { return sites_; }
  StateKey radix() const { return radix_; }

  StateKey encode(const BasisState& state) const;
  BasisState decode(StateKey key) const;

  int digit(StateKey key, int site) const {
    return static_cast<int>((key / place_[site]) % radix_);
  }
  int photons(StateKey key, int site) const { return digit(key, site) >> 1; }
  int atom(StateKey key, int site) const { return digit(key, site) & 1; }
  StateKey place(int site) const { return place_[site]; }

  StateKey translate(StateKey key) const {
    return key / radix_ + (key % radix_) * place_[0];
  }
  StateKey translate(StateKey key, int shift) const;
  StateKey reflect(StateKey key) const;

 private:
  int sites_;
  StateKey radix_;
  std::vector<StateKey> place_;  // radix^(L-1-i)
};

inline constexpr std::size_t kDefaultMaxStates = 20'000'000;

/// Every product state of L sites carrying exactly N excitations, sorted by key.
class ProductBasis {
 public:
  static ProductBasis enumerate(int sites, int excitations,
                                std::size_t max_states = kDefaultMaxStates);

  int sites() const { return codec_.sites(); }
  int excitations() const { return excitations_; }
  std::size_t size() const { return keys_.size(); }
  const StateCodec& codec() const { return codec_; }
  std::span<const StateKey> keys() const { return keys_; }
  StateKey key(std::size_t index) const { return keys_[index]; }
  BasisState state(std::size_t index) const { return codec_.decode(keys_[index]); }

  std::optional<std::size_t> index_of(StateKey key) const;

 private:
  ProductBasis(int sites, int excitations) : codec_(sites, excitations), excitations_(excitations) {}

  StateCodec codec_;
  int excitations_;
  std::vector<StateKey> keys_;
};

std::vector<BasisState> enumerate_basis(int sites, int excitations,
                                        std::size_t max_states = kDefaultMaxStates);

// sum_{s=0}^{min(N,L)} C(L,s) C(N-s+L-1, L-1); throws OverflowError past 64 bits.
std::uint64_t full_dimension(int sites, int excitations);

struct Sector {
  int sites = 1;
  int excitations = 0;
  Boundary boundary = Boundary::Periodic;
  std::optional<int> momentum;  // PBC only, in [0, L)
  Parity parity = Parity::None;

  double filling() const { return static_cast<double>(excitations) / sites; }
  // Throws InvalidSectorError if the labels are inconsistent.
  void validate() const;
  // Characters of the sector are all real (Q = 0 or 2Q = L).
  bool is_real() const;
  std::string label() const;

  friend bool operator==(const Sector&, const Sector&) = default;
};

// Every sector of one (L, N, boundary) family; their dimensions add up to full_dimension.
std::vector<Sector> all_sectors(int sites, int excitations, Boundary boundary);

/// Orthonormal symmetry-adapted basis of one sector.
///
/// Sector vector k is |v_k> = P|r_k> / ||P|r_k>|| with P the character
/// projector of the sector's symmetry group and r_k the orbit-minimal
/// representative. For every product state s the basis stores the sector
/// vector whose orbit contains s and the component <s|v_k>.
class SymBasis {
 public:
  static SymBasis build(const Sector& sector, std::shared_ptr<const ProductBasis> product);

  const Sector& sector() const { return sector_; }
  std::size_t dimension() const { return representatives_.size(); }
  const ProductBasis& product() const { return *product_; }
  std::shared_ptr<const ProductBasis> product_ptr() const { return product_; }
  bool is_real() const { return sector_.is_real(); }

  std::span<const StateKey> representatives() const { return representatives_; }
  // ||P|r_k>|| for each representative.
  std::span<const double> normalizations() const { return norms_; }

  // Sector vector containing product state `product_index`, or -1 if its orbit
  // carries no weight in this sector.
  std::int64_t owner(std::size_t product_index) const { return owner_[product_index]; }
  std::complex<double> component(std::size_t product_index) const {
    return components_[product_index];
  }

  // Coefficients in this basis -> amplitudes over the product basis.
  Eigen::VectorXcd expand(const Eigen::Ref<const Eigen::VectorXcd>& coefficients) const;
  Eigen::VectorXd expand(const Eigen::Ref<const Eigen::VectorXd>& coefficients) const;

  void save(const std::filesystem::path& path) const;
  // Loads a basis written by save(); throws FormatError on header mismatch.
  static SymBasis load(const std::filesystem::path& path, const Sector& sector,
                       std::shared_ptr<const ProductBasis> product);

 private:
  Sector sector_;
  std::shared_ptr<const ProductBasis> product_;
  std::vector<StateKey> representatives_;
  std::vector<double> norms_;
  std::vector<std::int64_t> owner_;
  std::vector<std::complex<double>> components_;
};

SymBasis build_sector_basis(int sites, int excitations, Boundary boundary,
                            std::optional<int> momentum, Parity parity,
                            std::size_t max_states = kDefaultMaxStates);

}  // namespace polariton
