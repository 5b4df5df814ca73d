#include "horocycle/eigen_cache.hpp"

#include "json.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace horocycle {

namespace {

static_assert(std::endian::native == std::endian::little, "cache encoding assumes little-endian host");

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& data, size_t pos, size_t end) : data_(data), pos_(pos), end_(end) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  const char* bytes(size_t n) {
    need(n);
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }
  size_t pos() const { return pos_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > end_) throw CacheError("truncated eigenvalue cache");
  }
  const std::string& data_;
  size_t pos_, end_;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

uint32_t crc_of(const std::string& data, size_t len) {
  return static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(len)));
}

CacheHeader parse_header(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  if (j.value("format", "") != "horocycle-lambda") throw CacheError("not an eigenvalue cache");
  CacheHeader h;
  h.format_version = j.at("format_version").get<int>();
  if (h.format_version != kCacheFormatVersion)
    throw CacheError("unsupported cache format_version " + std::to_string(h.format_version));
  h.k = j.at("k").get<int>();
  h.index = j.at("index").get<int>();
  h.N = j.at("N").get<int>();
  h.precision_bits = j.at("precision_bits").get<int>();
  return h;
}

}  // namespace

std::filesystem::path cache_file(const std::filesystem::path& dir, int k, int index) {
  char name[32];
  std::snprintf(name, sizeof name, "k%03d_i%02d.lam", k, index);
  return dir / name;
}

void write_cache(const std::filesystem::path& path, const Eigenform& f) {
  nlohmann::ordered_json header = {{"format", "horocycle-lambda"},
                                    {"format_version", kCacheFormatVersion},
                                    {"k", f.weight()},
                                    {"index", f.index()},
                                    {"N", f.table_size()},
                                    {"precision_bits", f.precision_bits()}};
  std::string out = header.dump();
  out.push_back('\n');

  mpz_class m;
  std::vector<unsigned char> buf;
  for (int n = 1; n <= f.table_size(); ++n) {
    const BigFloat& v = f.lambda(n);
    int8_t sign = 0;
    int64_t exponent = 0;
    size_t count = 0;
    buf.clear();
    if (!mpfr_zero_p(v.raw())) {
      if (!mpfr_number_p(v.raw())) throw CacheError("non-finite eigenvalue at n=" + std::to_string(n));
      exponent = mpfr_get_z_2exp(m.get_mpz_t(), v.raw());
      sign = static_cast<int8_t>(sgn(m));
      buf.resize((mpz_sizeinbase(m.get_mpz_t(), 2) + 7) / 8);
      mpz_export(buf.data(), &count, 1, 1, 1, 0, m.get_mpz_t());
      buf.resize(count);
    }
    put(out, sign);
    put(out, exponent);
    put(out, static_cast<uint32_t>(buf.size()));
    out.append(reinterpret_cast<const char*>(buf.data()), buf.size());
    put(out, f.lambda_error(n));
  }
  put(out, crc_of(out, out.size()));

  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) throw CacheError("cannot write " + tmp.string());
    o.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!o) throw CacheError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Eigenform read_cache(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  if (data.size() < 4) throw CacheError("truncated eigenvalue cache " + path.string());
  const size_t body = data.size() - 4;
  uint32_t stored;
  std::memcpy(&stored, data.data() + body, 4);
  if (stored != crc_of(data, body)) throw CacheError("checksum mismatch in " + path.string());

  const size_t eol = data.find('\n');
  if (eol == std::string::npos || eol >= body) throw CacheError("missing header in " + path.string());
  CacheHeader h;
  try {
    h = parse_header(data.substr(0, eol));
  } catch (const nlohmann::json::exception& e) {
    throw CacheError("bad header in " + path.string() + ": " + e.what());
  }
  if (h.N < 1 || h.precision_bits < MPFR_PREC_MIN) throw CacheError("bad header values in " + path.string());

  std::vector<BigFloat> lam(static_cast<size_t>(h.N) + 1, BigFloat(h.precision_bits));
  std::vector<double> err(lam.size(), 0.0);
  Reader r(data, eol + 1, body);
  mpz_class m;
  for (int n = 1; n <= h.N; ++n) {
    const auto sign = r.get<int8_t>();
    const auto exponent = r.get<int64_t>();
    const auto count = r.get<uint32_t>();
    const char* bytes = r.bytes(count);
    if (sign == 0) {
      mpfr_set_zero(lam[n].raw(), 1);
    } else {
      mpz_import(m.get_mpz_t(), count, 1, 1, 1, 0, bytes);
      if (sign < 0) m = -m;
      if (mpfr_set_z_2exp(lam[n].raw(), m.get_mpz_t(), exponent, MPFR_RNDN) != 0)
        throw CacheError("mantissa wider than precision_bits in " + path.string());
    }
    err[n] = r.get<double>();
  }
  if (r.pos() != body) throw CacheError("trailing bytes in " + path.string());
  return Eigenform(h.k, h.index, h.precision_bits, std::move(lam), std::move(err));
}

std::optional<CacheHeader> peek_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  try {
    return parse_header(line);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool cache_valid(const std::filesystem::path& path, int N, int precision_bits) {
  const auto h = peek_cache(path);
  if (!h || h->N < N || h->precision_bits != precision_bits) return false;
  const std::string data = slurp(path);
  if (data.size() < 4) return false;
  uint32_t stored;
  std::memcpy(&stored, data.data() + data.size() - 4, 4);
  return stored == crc_of(data, data.size() - 4);
}

}  // namespace horocycle
