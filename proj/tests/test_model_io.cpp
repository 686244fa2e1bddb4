#include "doctest.h"
#include "support.hpp"
#include "topicpref/errors.hpp"
#include "topicpref/factorization.hpp"

#include <cstring>
#include <random>

using namespace topicpref;
using testsupport::read_file;
using testsupport::scratch;
using testsupport::write_file;

namespace {

FactorModel sample_model() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> p(3 * 2), q(3 * 4);
  for (auto& x : p) x = n(rng);
  for (auto& x : q) x = n(rng);
  p[0] = -0.0;
  q[1] = 5e-324;
  return FactorModel(3, Index({"amy", "bob"}), Index({"tpp", "casino", "tax hike", "\xE5\x8E\x9F\xE7\x99\xBA"}), p, q);
}

std::string load_error(const std::filesystem::path& p) {
  try {
    (void)load_model(p);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

void put_u64(std::string& bytes, std::size_t offset, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes[offset + static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

}  // namespace

TEST_CASE("round-trip is bit-exact") {
  auto dir = scratch("model");
  auto m = sample_model();
  save_model(m, dir / "m.bin");
  auto back = load_model(dir / "m.bin");
  CHECK(back.k() == m.k());
  CHECK(back.users() == m.users());
  CHECK(back.topics() == m.topics());
  REQUIRE(back.p().size() == m.p().size());
  REQUIRE(back.q().size() == m.q().size());
  CHECK(std::memcmp(back.p().data(), m.p().data(), m.p().size() * sizeof(double)) == 0);
  CHECK(std::memcmp(back.q().data(), m.q().data(), m.q().size() * sizeof(double)) == 0);
  save_model(back, dir / "again.bin");
  CHECK(read_file(dir / "m.bin") == read_file(dir / "again.bin"));
}

TEST_CASE("every truncation is rejected") {
  auto dir = scratch("model-trunc");
  save_model(sample_model(), dir / "m.bin");
  auto bytes = read_file(dir / "m.bin");
  for (std::size_t len = 0; len < bytes.size(); ++len) {
    write_file(dir / "t.bin", bytes.substr(0, len));
    CHECK_THROWS_AS(load_model(dir / "t.bin"), FormatError);
  }
}

TEST_CASE("every single-byte corruption is rejected") {
  auto dir = scratch("model-flip");
  save_model(sample_model(), dir / "m.bin");
  auto bytes = read_file(dir / "m.bin");
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    auto bad = bytes;
    bad[i] = static_cast<char>(bad[i] ^ 0x5A);
    write_file(dir / "f.bin", bad);
    CHECK_THROWS_AS(load_model(dir / "f.bin"), FormatError);
  }
}

TEST_CASE("specific format errors") {
  auto dir = scratch("model-errors");
  save_model(sample_model(), dir / "m.bin");
  auto bytes = read_file(dir / "m.bin");

  SUBCASE("k mismatch names both values") {
    auto bad = bytes;
    put_u64(bad, 16, 4);
    write_file(dir / "k.bin", bad);
    auto msg = load_error(dir / "k.bin");
    CHECK(msg.find("k mismatch") != std::string::npos);
    CHECK(msg.find("k=4") != std::string::npos);
    CHECK(msg.find("k=3") != std::string::npos);
  }
  SUBCASE("version") {
    auto bad = bytes;
    bad[8] = 9;
    write_file(dir / "v.bin", bad);
    CHECK(load_error(dir / "v.bin").find("version 9") != std::string::npos);
  }
  SUBCASE("magic") {
    write_file(dir / "x.bin", "hello world, not a model");
    CHECK(load_error(dir / "x.bin").find("magic") != std::string::npos);
  }
  SUBCASE("trailing bytes") {
    write_file(dir / "long.bin", bytes + "xxxxxxxx");
    CHECK_THROWS_AS(load_model(dir / "long.bin"), FormatError);
  }
  SUBCASE("missing file is an I/O error") {
    CHECK_THROWS_AS(load_model(dir / "absent.bin"), IoError);
  }
}
