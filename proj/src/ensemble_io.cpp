#include "gshs/ensemble_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "gshs/error.hpp"

namespace gshs {

namespace {

constexpr char kMagic[8] = {'G', 'S', 'H', 'S', 'E', 'N', 'S', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(std::is_integral_v<T>);
  std::array<char, sizeof(T)> b;
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b.data(), b.size());
}

void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> b;
  is.read(reinterpret_cast<char*>(b.data()), b.size());
  require(static_cast<bool>(is), ErrorKind::InvalidInput, "truncated ensemble file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

}  // namespace

void write_binary(const PathEnsemble& ens, std::ostream& os) {
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ens.d));
  put_le<std::uint64_t>(os, ens.n_paths);
  put_le<std::uint64_t>(os, ens.grid());
  put_le<std::uint32_t>(os, ens.has_velocity ? 1u : 0u);
  put_le<std::uint32_t>(os, 0u);
  put_le<std::uint64_t>(os, ens.config_hash);
  for (double t : ens.times) put_f64(os, t);
  for (double s : ens.states) put_f64(os, s);
}

PathEnsemble read_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  require(static_cast<bool>(is) && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
          ErrorKind::InvalidInput, "not an ensemble file (bad magic)");
  auto version = get_le<std::uint32_t>(is);
  require(version == kVersion, ErrorKind::InvalidInput, "unsupported ensemble file version");
  PathEnsemble ens;
  ens.d = get_le<std::uint32_t>(is);
  ens.n_paths = get_le<std::uint64_t>(is);
  std::size_t grid = get_le<std::uint64_t>(is);
  ens.has_velocity = get_le<std::uint32_t>(is) != 0;
  get_le<std::uint32_t>(is);
  ens.config_hash = get_le<std::uint64_t>(is);
  ens.times.resize(grid);
  for (auto& t : ens.times) t = get_f64(is);
  ens.states.resize(ens.n_paths * grid * ens.state_dim());
  for (auto& s : ens.states) s = get_f64(is);
  return ens;
}

void write_csv(const PathEnsemble& ens, std::ostream& os) {
  os << "path_id,t";
  for (std::size_t i = 0; i < ens.d; ++i) os << ",x_" << i + 1;
  if (ens.has_velocity)
    for (std::size_t i = 0; i < ens.d; ++i) os << ",v_" << i + 1;
  os << "\r\n";
  for (std::size_t p = 0; p < ens.n_paths; ++p) {
    for (std::size_t k = 0; k < ens.grid(); ++k) {
      os << p << ',' << format_double(ens.times[k]);
      for (double s : ens.state(p, k)) os << ',' << format_double(s);
      os << "\r\n";
    }
  }
  os << config_hash_line(ens.config_hash) << "\r\n";
}

}  // namespace gshs
