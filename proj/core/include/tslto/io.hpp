#pragma once

// File formats.
//
// TSR3: the 4-byte magic "TSR3", three little-endian uint32 dims, then
// D1*D2*D3 little-endian IEEE-754 doubles in mode-1-unfolding row-major order
// (for each i1, columns i2 + i3*D2 ascending). Masks are stored as TSR3
// tensors holding 0.0 / 1.0.
//
// CSV triples: header "i,j,k,value" followed by one row per entry, 1-based.

#include "tslto/tensor.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>

namespace tslto {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_tsr3(std::ostream& out, const Tensor3& x);
Tensor3 read_tsr3(std::istream& in);
void write_tsr3(const std::filesystem::path& path, const Tensor3& x);
Tensor3 read_tsr3(const std::filesystem::path& path);

void write_mask(const std::filesystem::path& path, const ObservationMask& mask);
/// Any nonzero stored value is a member.
ObservationMask read_mask(const std::filesystem::path& path);

/// Writes every entry, or only nonzero entries when `nonzero_only`.
void write_csv_triples(std::ostream& out, const Tensor3& x, bool nonzero_only = false);
void write_csv_triples(const std::filesystem::path& path, const Tensor3& x,
                       bool nonzero_only = false);
/// Entries not listed are zero. Without explicit dims the largest index seen
/// in each mode defines the dimension.
Tensor3 read_csv_triples(std::istream& in, std::optional<Dims> dims = std::nullopt);
Tensor3 read_csv_triples(const std::filesystem::path& path,
                         std::optional<Dims> dims = std::nullopt);

/// Dispatches on extension: ".csv" reads triples, anything else TSR3.
Tensor3 read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor3& x);

}  // namespace tslto
