#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "cim/ppo.hpp"

namespace cim {

namespace {

constexpr std::array<char, 8> kMagic{'C', 'I', 'M', 'P', 'O', 'L', 'C', 'Y'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 16;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 4);
  }

  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 8);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw std::runtime_error("policy file is truncated");
  }

  std::uint32_t u32() {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  double f64() {
    unsigned char b[8];
    bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }

 private:
  std::istream& in_;
};

void write_net(Writer& w, const Mlp& net) {
  w.u32(static_cast<std::uint32_t>(net.layers().size()));
  for (const DenseLayer& l : net.layers()) {
    w.u32(static_cast<std::uint32_t>(l.w.rows()));
    w.u32(static_cast<std::uint32_t>(l.w.cols()));
  }
  for (const DenseLayer& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.w.cols(); ++c) w.f64(l.w(r, c));
    }
    for (Eigen::Index r = 0; r < l.b.size(); ++r) w.f64(l.b[r]);
  }
}

Mlp read_net(Reader& r) {
  const std::uint32_t count = r.u32();
  if (count < 1 || count > 16) throw std::runtime_error("policy file has a bad layer count");
  Mlp net;
  std::uint32_t prev_rows = 0;
  for (std::uint32_t l = 0; l < count; ++l) {
    const std::uint32_t rows = r.u32(), cols = r.u32();
    if (rows < 1 || cols < 1 || rows > kMaxDim || cols > kMaxDim) {
      throw std::runtime_error("policy file has a bad layer shape");
    }
    if (l > 0 && cols != prev_rows) throw std::runtime_error("policy file has inconsistent layer shapes");
    prev_rows = rows;
    net.layers().push_back({Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)});
  }
  for (DenseLayer& l : net.layers()) {
    for (Eigen::Index i = 0; i < l.w.rows(); ++i) {
      for (Eigen::Index j = 0; j < l.w.cols(); ++j) l.w(i, j) = r.f64();
    }
    for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b[i] = r.f64();
  }
  return net;
}

}  // namespace

void save_params(const std::filesystem::path& path, const PolicyParams& p) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic.data(), kMagic.size());
  Writer w(out);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(p.num_actions()));
  write_net(w, p.actor);
  write_net(w, p.critic);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

PolicyParams load_params(const std::filesystem::path& path, std::size_t expected_actions) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Reader r(in);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw std::runtime_error(path.string() + " is not a policy file");
  if (const std::uint32_t v = r.u32(); v != kVersion) {
    throw std::runtime_error("unsupported policy file version " + std::to_string(v));
  }
  const std::uint32_t actions = r.u32();
  if (expected_actions != 0 && actions != expected_actions) {
    throw std::invalid_argument("policy has " + std::to_string(actions) + " actions, expected " +
                                std::to_string(expected_actions));
  }
  PolicyParams p;
  p.actor = read_net(r);
  p.critic = read_net(r);
  if (p.actor.output_size() != actions || p.actor.input_size() != kStateSize ||
      p.critic.input_size() != kStateSize || p.critic.output_size() != 1) {
    throw std::runtime_error("policy file shapes do not match its header");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("trailing bytes in policy file");
  return p;
}

}  // namespace cim
