#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "topicpref/errors.hpp"
#include "topicpref/factorization.hpp"

// Layout (all integers little-endian):
//   magic "TPREFMF\0" | u32 version | u32 reserved (0)
//   u64 k | u64 users | u64 topics
//   u64 p_count | p_count x f64   (P, column-major: p_0, p_1, ...)
//   u64 q_count | q_count x f64   (Q, column-major)
//   users x (u32 byte length | bytes) | topics x (u32 byte length | bytes)
//   u64 FNV-1a hash of every preceding byte

namespace topicpref {

namespace {

constexpr char kMagic[8] = {'T', 'P', 'R', 'E', 'F', 'M', 'F', '\0'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    auto c = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    uint(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<unsigned char>& buffer() { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<unsigned char>& buf, std::size_t end, std::string path)
      : buf_(buf), end_(end), path_(std::move(path)) {}

  void need(std::size_t n, const char* what) {
    if (end_ - pos_ < n) throw FormatError(path_ + ": truncated model file while reading " + what);
  }
  template <typename U>
  U uint(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(uint<std::uint64_t>(what)); }
  std::string str(const char* what) {
    auto n = uint<std::uint32_t>(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return end_ - pos_; }
  const unsigned char* cursor() const { return buf_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  const std::vector<unsigned char>& buf_;
  std::size_t pos_ = 0;
  std::size_t end_;
  std::string path_;
};

}  // namespace

void save_model(const FactorModel& model, const std::filesystem::path& path) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.uint<std::uint32_t>(kVersion);
  w.uint<std::uint32_t>(0);
  w.uint<std::uint64_t>(model.k());
  w.uint<std::uint64_t>(model.users().size());
  w.uint<std::uint64_t>(model.topics().size());
  w.uint<std::uint64_t>(model.p().size());
  for (double v : model.p()) w.f64(v);
  w.uint<std::uint64_t>(model.q().size());
  for (double v : model.q()) w.f64(v);
  for (const auto& id : model.users().ids()) w.str(id);
  for (const auto& id : model.topics().ids()) w.str(id);
  auto& buf = w.buffer();
  w.uint<std::uint64_t>(fnv1a(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model file: " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failure: " + path.string());
}

FactorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto name = path.string();

  if (buf.size() < sizeof kMagic || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError(name + ": not a topicpref model file (bad magic)");
  }
  if (buf.size() < sizeof kMagic + 8) throw FormatError(name + ": truncated model file while reading header");
  // The trailing 8 bytes hold the checksum; parse everything before them.
  Reader r(buf, buf.size() - 8, name);
  r.skip(sizeof kMagic);
  auto version = r.uint<std::uint32_t>("version");
  if (version != kVersion) {
    throw FormatError(name + ": unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kVersion) + ")");
  }
  r.uint<std::uint32_t>("reserved");
  const auto k = r.uint<std::uint64_t>("k");
  const auto n_users = r.uint<std::uint64_t>("user count");
  const auto n_topics = r.uint<std::uint64_t>("topic count");
  if (k == 0) throw FormatError(name + ": header k is 0");

  const auto p_count = r.uint<std::uint64_t>("P block length");
  if (n_users > 0 && p_count != k * n_users) {
    throw FormatError(name + ": k mismatch: header k=" + std::to_string(k) + " but P block holds " +
                      std::to_string(p_count) + " values for " + std::to_string(n_users) + " users (k=" +
                      (p_count % n_users == 0 ? std::to_string(p_count / n_users) : std::string("non-integral")) +
                      ")");
  }
  if (p_count > r.remaining() / 8) throw FormatError(name + ": truncated model file while reading P");
  std::vector<double> p(p_count);
  for (auto& v : p) v = r.f64("P");

  const auto q_count = r.uint<std::uint64_t>("Q block length");
  if (n_topics > 0 && q_count != k * n_topics) {
    throw FormatError(name + ": k mismatch: header k=" + std::to_string(k) + " but Q block holds " +
                      std::to_string(q_count) + " values for " + std::to_string(n_topics) + " topics (k=" +
                      (q_count % n_topics == 0 ? std::to_string(q_count / n_topics) : std::string("non-integral")) +
                      ")");
  }
  if (q_count > r.remaining() / 8) throw FormatError(name + ": truncated model file while reading Q");
  std::vector<double> q(q_count);
  for (auto& v : q) v = r.f64("Q");

  if (n_users > r.remaining() / 4 || n_topics > r.remaining() / 4) {
    throw FormatError(name + ": truncated model file while reading index maps");
  }
  std::vector<std::string> users(n_users);
  for (auto& id : users) id = r.str("user ids");
  std::vector<std::string> topics(n_topics);
  for (auto& id : topics) id = r.str("topic ids");
  if (r.remaining() != 0) throw FormatError(name + ": " + std::to_string(r.remaining()) + " unexpected trailing bytes");

  Reader tail(buf, buf.size(), name);
  tail.skip(buf.size() - 8);
  const auto stored = tail.uint<std::uint64_t>("checksum");
  if (stored != fnv1a(buf.data(), buf.size() - 8)) throw FormatError(name + ": checksum mismatch (corrupted file)");

  try {
    return FactorModel(k, Index(std::move(users)), Index(std::move(topics)), std::move(p), std::move(q));
  } catch (const std::invalid_argument& e) {
    throw FormatError(name + ": " + e.what());
  }
}

}  // namespace topicpref
