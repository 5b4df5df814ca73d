#include "doctest.h"

#include "horocycle/eigen_cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <unistd.h>

using namespace horocycle;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* tag) {
  fs::path dir = fs::temp_directory_path() / ("horocycle-test-" + std::string(tag) + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

}  // namespace

TEST_CASE("cache file naming") {
  CHECK(cache_file("d", 12, 0) == fs::path("d") / "k012_i00.lam");
  CHECK(cache_file("d", 300, 24) == fs::path("d") / "k300_i24.lam");
}

TEST_CASE("cache round trip is bit identical") {
  const fs::path dir = scratch_dir("cache");
  const auto forms = eigenforms(24, 500);
  REQUIRE(forms.size() == 2);
  for (const Eigenform& f : forms) {
    const fs::path p = cache_file(dir, f.weight(), f.index());
    write_cache(p, f);
    const Eigenform g = read_cache(p);
    CHECK(g.weight() == 24);
    CHECK(g.index() == f.index());
    CHECK(g.precision_bits() == f.precision_bits());
    REQUIRE(g.table_size() == 500);
    bool same = true;
    for (int n = 1; n <= 500; ++n) {
      same = same && mpfr_equal_p(f.lambda(n).raw(), g.lambda(n).raw()) != 0 &&
             f.lambda_error(n) == g.lambda_error(n) && f.lambda_value(n) == g.lambda_value(n);
    }
    CHECK(same);

    const auto h = peek_cache(p);
    REQUIRE(h.has_value());
    CHECK(h->k == 24);
    CHECK(h->N == 500);
    CHECK(h->format_version == kCacheFormatVersion);
    CHECK(cache_valid(p, 500, f.precision_bits()));
    CHECK(cache_valid(p, 100, f.precision_bits()));
    CHECK_FALSE(cache_valid(p, 501, f.precision_bits()));
    CHECK_FALSE(cache_valid(p, 500, f.precision_bits() * 2));

    // Rewriting gives the same bytes.
    const std::string before = slurp(p);
    write_cache(p, g);
    CHECK(slurp(p) == before);
  }
  fs::remove_all(dir);
}

TEST_CASE("cache corruption is detected") {
  const fs::path dir = scratch_dir("corrupt");
  const Eigenform f = eigenforms(12, 200).at(0);
  const fs::path p = cache_file(dir, 12, 0);
  write_cache(p, f);
  const std::string good = slurp(p);

  std::string flipped = good;
  flipped[good.size() / 2] = static_cast<char>(flipped[good.size() / 2] ^ 0x10);
  spit(p, flipped);
  CHECK_THROWS_AS(read_cache(p), CacheError);
  CHECK_FALSE(cache_valid(p, 200, f.precision_bits()));

  spit(p, good.substr(0, good.size() - 7));
  CHECK_THROWS_AS(read_cache(p), CacheError);

  spit(p, "not a cache\n");
  CHECK_THROWS_AS(read_cache(p), CacheError);
  CHECK_FALSE(peek_cache(p).has_value());

  CHECK_FALSE(peek_cache(dir / "missing.lam").has_value());
  CHECK_FALSE(cache_valid(dir / "missing.lam", 1, 128));
  CHECK_THROWS_AS(read_cache(dir / "missing.lam"), CacheError);
  fs::remove_all(dir);
}
