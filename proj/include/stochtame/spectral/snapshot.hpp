#pragma once

// Field snapshot layout (little-endian):
//   bytes 0..7   magic "STFIELD1"
//   uint32       dim
//   uint32       n_per_axis
//   uint32       components
//   uint32       flags (bit 0: post-blow-up)
//   components * n^dim pairs of float64 (re, im), component-major, wavevectors
//   row-major in FFT order with the x axis slowest.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "stochtame/spectral/spectral_field.hpp"

namespace stochtame {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

inline constexpr char kSnapshotMagic[8] = {'S', 'T', 'F', 'I', 'E', 'L', 'D', '1'};

inline void write_snapshot(std::ostream& os, const SpectralField& f) {
  os.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  const std::uint32_t header[4] = {static_cast<std::uint32_t>(f.grid().dim()),
                                   static_cast<std::uint32_t>(f.grid().n()),
                                   static_cast<std::uint32_t>(f.components()), f.post_blowup() ? 1u : 0u};
  os.write(reinterpret_cast<const char*>(header), sizeof(header));
  auto coeffs = f.coeffs();
  os.write(reinterpret_cast<const char*>(coeffs.data()), static_cast<std::streamsize>(coeffs.size_bytes()));
  if (!os) throw std::runtime_error("write_snapshot: stream error");
}

inline SpectralField read_snapshot(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0)
    throw ValidationError("read_snapshot: bad magic");
  std::uint32_t header[4];
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!is) throw ValidationError("read_snapshot: truncated header");
  SpectralField f(TorusGrid(static_cast<int>(header[0]), static_cast<int>(header[1])),
                  static_cast<int>(header[2]));
  f.set_post_blowup((header[3] & 1u) != 0);
  auto coeffs = f.coeffs();
  is.read(reinterpret_cast<char*>(coeffs.data()), static_cast<std::streamsize>(coeffs.size_bytes()));
  if (!is) throw ValidationError("read_snapshot: truncated coefficient block");
  return f;
}

inline void save_snapshot(const std::string& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, f);
}

inline SpectralField load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is);
}

}  // namespace stochtame
