#include <array>
#include <cstring>
#include <fstream>

#include "gani/error.hpp"
#include "gani/models.hpp"

namespace gani {

namespace {

constexpr std::array<char, 8> kSgcMagic = {'G', 'A', 'N', 'I', 'S', 'G', 'C', '1'};
constexpr std::array<char, 8> kGcnMagic = {'G', 'A', 'N', 'I', 'G', 'C', 'N', '1'};

// Header integers and weights are written in host byte order; every supported
// target is little-endian.
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw Error("io", "cannot open " + path.string() + " for writing");
  }
  void magic(const std::array<char, 8>& m) { out_.write(m.data(), m.size()); }
  void u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void matrix(const Matrix& m) {
    const auto d = m.data();
    out_.write(reinterpret_cast<const char*>(d.data()),
               static_cast<std::streamsize>(d.size() * sizeof(double)));
  }
  void finish() {
    out_.flush();
    if (!out_) throw Error("io", "failed writing " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path)
      : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw Error("io", "cannot open " + path.string());
  }
  void expect_magic(const std::array<char, 8>& m) {
    std::array<char, 8> got{};
    in_.read(got.data(), got.size());
    if (!in_ || got != m) throw Error("io", path_.string() + ": wrong model file type");
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw Error("io", path_.string() + ": truncated header");
    return v;
  }
  Matrix matrix(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    auto d = m.data();
    in_.read(reinterpret_cast<char*>(d.data()),
             static_cast<std::streamsize>(d.size() * sizeof(double)));
    if (!in_) throw Error("io", path_.string() + ": truncated weights");
    return m;
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw Error("io", path_.string() + ": trailing bytes after weights");
    }
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

}  // namespace

void save_model(const std::filesystem::path& path, const SgcModel& model) {
  Writer w(path);
  w.magic(kSgcMagic);
  w.u64(model.weights.rows());
  w.u64(model.weights.cols());
  w.u64(model.hops);
  w.u64(model.seed);
  w.matrix(model.weights);
  w.finish();
}

void save_model(const std::filesystem::path& path, const GcnModel& model) {
  Writer w(path);
  w.magic(kGcnMagic);
  w.u64(model.w1.rows());
  w.u64(model.hidden);
  w.u64(model.w2.cols());
  w.u64(model.seed);
  w.matrix(model.w1);
  w.matrix(model.w2);
  w.finish();
}

SgcModel load_sgc_model(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kSgcMagic);
  SgcModel m;
  const auto d = r.u64();
  const auto c = r.u64();
  m.hops = r.u64();
  m.seed = r.u64();
  m.weights = r.matrix(d, c);
  r.expect_end();
  return m;
}

GcnModel load_gcn_model(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kGcnMagic);
  GcnModel m;
  const auto d = r.u64();
  m.hidden = r.u64();
  const auto c = r.u64();
  m.seed = r.u64();
  m.w1 = r.matrix(d, m.hidden);
  m.w2 = r.matrix(m.hidden, c);
  r.expect_end();
  return m;
}

}  // namespace gani
