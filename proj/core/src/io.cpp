#include "tslto/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace tslto {

namespace {

constexpr std::array<char, 4> kMagic{'T', 'S', 'R', '3'};

template <typename UInt>
void put_le(std::ostream& out, UInt v) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError("TSR3: truncated stream");
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw FormatError("CSV line " + std::to_string(line) + ": cannot parse '" +
                      std::string(field) + "'");
  }
  return value;
}

}  // namespace

void write_tsr3(std::ostream& out, const Tensor3& x) {
  out.write(kMagic.data(), kMagic.size());
  for (Index d : x.dims()) {
    if (d > std::numeric_limits<std::uint32_t>::max()) throw FormatError("TSR3: dimension too large");
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  }
  const Dims& d = x.dims();
  for (Index i1 = 0; i1 < d[0]; ++i1) {
    for (Index i3 = 0; i3 < d[2]; ++i3) {
      for (Index i2 = 0; i2 < d[1]; ++i2) {
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x(i1, i2, i3)));
      }
    }
  }
  if (!out) throw std::runtime_error("TSR3: write failed");
}

Tensor3 read_tsr3(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("TSR3: bad magic");
  Dims d{};
  for (auto& v : d) {
    v = static_cast<Index>(get_le<std::uint32_t>(in));
    if (v == 0) throw FormatError("TSR3: zero dimension");
  }
  Tensor3 x(d);
  for (Index i1 = 0; i1 < d[0]; ++i1) {
    for (Index i3 = 0; i3 < d[2]; ++i3) {
      for (Index i2 = 0; i2 < d[1]; ++i2) {
        x(i1, i2, i3) = std::bit_cast<double>(get_le<std::uint64_t>(in));
      }
    }
  }
  return x;
}

void write_tsr3(const std::filesystem::path& path, const Tensor3& x) {
  auto out = open_out(path, std::ios::binary | std::ios::trunc);
  write_tsr3(out, x);
}

Tensor3 read_tsr3(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  try {
    return read_tsr3(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_mask(const std::filesystem::path& path, const ObservationMask& mask) {
  write_tsr3(path, mask.to_tensor());
}

ObservationMask read_mask(const std::filesystem::path& path) {
  return ObservationMask::from_nonzeros(read_tensor(path));
}

void write_csv_triples(std::ostream& out, const Tensor3& x, bool nonzero_only) {
  out << "i,j,k,value\n";
  out.precision(17);
  const Dims& d = x.dims();
  for (Index i3 = 0; i3 < d[2]; ++i3) {
    for (Index i2 = 0; i2 < d[1]; ++i2) {
      for (Index i1 = 0; i1 < d[0]; ++i1) {
        const double v = x(i1, i2, i3);
        if (nonzero_only && v == 0.0) continue;
        out << i1 + 1 << ',' << i2 + 1 << ',' << i3 + 1 << ',' << v << '\n';
      }
    }
  }
}

void write_csv_triples(const std::filesystem::path& path, const Tensor3& x, bool nonzero_only) {
  auto out = open_out(path, std::ios::trunc);
  write_csv_triples(out, x, nonzero_only);
}

Tensor3 read_csv_triples(std::istream& in, std::optional<Dims> dims) {
  struct Entry {
    Index i, j, k;
    double v;
  };
  std::vector<Entry> entries;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw FormatError("CSV: empty input");
  ++lineno;
  if (line.rfind("i,j,k,value", 0) != 0) throw FormatError("CSV: expected header i,j,k,value");
  Dims seen{0, 0, 0};
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::array<std::string_view, 4> fields;
    std::string_view rest(line);
    for (std::size_t f = 0; f < 4; ++f) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (f == 3)) {
        throw FormatError("CSV line " + std::to_string(lineno) + ": expected 4 fields");
      }
      fields[f] = rest.substr(0, comma);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    Entry e{parse_number<Index>(fields[0], lineno) - 1, parse_number<Index>(fields[1], lineno) - 1,
            parse_number<Index>(fields[2], lineno) - 1, parse_number<double>(fields[3], lineno)};
    if (e.i < 0 || e.j < 0 || e.k < 0) {
      throw FormatError("CSV line " + std::to_string(lineno) + ": indices are 1-based");
    }
    seen = {std::max(seen[0], e.i + 1), std::max(seen[1], e.j + 1), std::max(seen[2], e.k + 1)};
    entries.push_back(e);
  }
  const Dims d = dims.value_or(seen);
  if (d[0] <= 0 || d[1] <= 0 || d[2] <= 0) throw FormatError("CSV: no entries and no dims");
  if (seen[0] > d[0] || seen[1] > d[1] || seen[2] > d[2]) {
    throw FormatError("CSV: index outside the given dims");
  }
  Tensor3 x(d);
  for (const auto& e : entries) x(e.i, e.j, e.k) = e.v;
  return x;
}

Tensor3 read_csv_triples(const std::filesystem::path& path, std::optional<Dims> dims) {
  auto in = open_in(path, std::ios::in);
  try {
    return read_csv_triples(in, dims);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Tensor3 read_tensor(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_csv_triples(path);
  return read_tsr3(path);
}

void write_tensor(const std::filesystem::path& path, const Tensor3& x) {
  if (path.extension() == ".csv") {
    write_csv_triples(path, x);
  } else {
    write_tsr3(path, x);
  }
}

}  // namespace tslto
