#include "test_helpers.hpp"
#include "tslto/io.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <sstream>

using namespace tslto;

TEST(Tsr3, RoundTripThroughStream) {
  Rng rng(1);
  Tensor3 x = tslto::testing::random_tensor({3, 4, 5}, rng);
  std::stringstream buf;
  write_tsr3(buf, x);
  EXPECT_EQ(buf.str().size(), 4u + 12u + 8u * 60u);
  EXPECT_EQ(read_tsr3(buf), x);
}

TEST(Tsr3, ByteLayoutIsModeOneRowMajor) {
  Tensor3 x({2, 2, 1});
  x(0, 0, 0) = 1.0;
  x(1, 0, 0) = 2.0;
  x(0, 1, 0) = 3.0;
  x(1, 1, 0) = 4.0;
  std::stringstream buf;
  write_tsr3(buf, x);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "TSR3");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2u);
  auto value_at = [&](std::size_t k) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[16 + 8 * k + b]);
    return std::bit_cast<double>(bits);
  };
  // Row i1 = 0 first: (0,0,0), (0,1,0), then row i1 = 1.
  EXPECT_EQ(value_at(0), 1.0);
  EXPECT_EQ(value_at(1), 3.0);
  EXPECT_EQ(value_at(2), 2.0);
  EXPECT_EQ(value_at(3), 4.0);
}

TEST(Tsr3, RejectsCorruptInput) {
  std::stringstream bad_magic("XXXX");
  EXPECT_THROW(read_tsr3(bad_magic), FormatError);
  Tensor3 x({2, 2, 2}, 1.0);
  std::stringstream buf;
  write_tsr3(buf, x);
  std::string truncated = buf.str().substr(0, buf.str().size() - 3);
  std::stringstream t(truncated);
  EXPECT_THROW(read_tsr3(t), FormatError);
  EXPECT_THROW(read_tsr3(std::filesystem::path("/nonexistent/file.tsr3")), std::runtime_error);
}

TEST(CsvTriples, RoundTripAndOneBasedIndices) {
  Tensor3 x({2, 3, 2});
  x(1, 2, 1) = 5.5;
  x(0, 0, 0) = -1.25;
  std::stringstream buf;
  write_csv_triples(buf, x, true);
  EXPECT_EQ(buf.str(), "i,j,k,value\n1,1,1,-1.25\n2,3,2,5.5\n");
  EXPECT_EQ(read_csv_triples(buf, Dims{2, 3, 2}), x);
  std::stringstream again(buf.str());
  EXPECT_EQ(read_csv_triples(again).dims(), (Dims{2, 3, 2}));
}

TEST(CsvTriples, RejectsMalformedRows) {
  std::stringstream no_header("1,1,1,2\n");
  EXPECT_THROW(read_csv_triples(no_header), FormatError);
  std::stringstream zero_index("i,j,k,value\n0,1,1,2\n");
  EXPECT_THROW(read_csv_triples(zero_index), FormatError);
  std::stringstream junk("i,j,k,value\n1,1,x,2\n");
  EXPECT_THROW(read_csv_triples(junk), FormatError);
  std::stringstream outside("i,j,k,value\n3,1,1,2\n");
  EXPECT_THROW(read_csv_triples(outside, Dims{2, 2, 2}), FormatError);
}

TEST(Io, ExtensionDispatchAndMasks) {
  const auto dir = std::filesystem::temp_directory_path() / "tslto_io_test";
  std::filesystem::create_directories(dir);
  Rng rng(2);
  Tensor3 x = tslto::testing::random_tensor({2, 3, 4}, rng);
  write_tensor(dir / "x.csv", x);
  write_tensor(dir / "x.tsr3", x);
  EXPECT_LE((read_tensor(dir / "x.csv") - x).norm(), 0.0);
  EXPECT_EQ(read_tensor(dir / "x.tsr3"), x);
  ObservationMask m(x.dims());
  m.set(1, 2, 3);
  write_mask(dir / "m.tsr3", m);
  EXPECT_EQ(read_mask(dir / "m.tsr3"), m);
  std::filesystem::remove_all(dir);
}
