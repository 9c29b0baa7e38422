#include <doctest.h>

#include <set>

#include "support.hpp"
#include "tnpath/generator.hpp"
#include "tnpath/io.hpp"

using namespace tnpath;

namespace {

std::size_t open_count(const TensorNetwork& net) {
  std::size_t k = 0;
  for (IndexId i = 0; i < net.index_count(); ++i) k += net.is_output(i);
  return k;
}

}  // namespace

TEST_CASE("two tensors, one shared index") {
  const auto net = generate({2, 1.0, 0, 3, 3, 0});
  REQUIRE(net.tensor_count() == 2);
  REQUIRE(net.index_count() == 1);
  CHECK(net.carriers(0).size() == 2);
  CHECK(net.extent(0) == 3);
  CHECK(net.index(0).name == "e0");
}

TEST_CASE("structure") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 3 + seed * 3;
    const GenConfig config{n, std::min(3.0, double(n - 1)), seed % 5, 2, 7, seed};
    const auto net = generate(config);
    CHECK(net.tensor_count() == n);
    CHECK(open_count(net) == config.n_open);
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (IndexId i = 0; i < net.index_count(); ++i) {
      const auto& idx = net.index(i);
      CHECK(idx.extent >= 2);
      CHECK(idx.extent <= 7);
      const auto c = net.carriers(i);
      if (net.is_output(i)) {
        CHECK(c.size() == 1);
        CHECK(idx.name[0] == 'o');
      } else {
        REQUIRE(c.size() == 2);
        CHECK((idx.name[0] == 'e' || idx.name[0] == 's'));
        CHECK(pairs.insert({c[0], c[1]}).second);  // no repeated tensor pair
      }
    }
    for (std::size_t t = 0; t < n; ++t) CHECK(!net.leaf_head(t).empty());
  }
}

TEST_CASE("average degree tracks regularity") {
  for (double regularity : {2.0, 3.0, 4.5}) {
    for (std::size_t n : {64, 256}) {
      for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto net = generate({n, regularity, 0, 2, 2, seed});
        const double degree = 2.0 * double(contracting_index_count(net)) / double(n);
        CHECK(degree >= regularity - 0.5);
        CHECK(degree <= regularity + 0.5);
      }
    }
  }
}

TEST_CASE("same seed, same network") {
  const GenConfig config{50, 3.0, 4, 2, 5, 1234};
  CHECK(dump_network(generate(config)) == dump_network(generate(config)));
  GenConfig other = config;
  other.seed = 1235;
  CHECK(dump_network(generate(config)) != dump_network(generate(other)));
}

TEST_CASE("index cap by rejection") {
  GenConfig config{20, 3.0, 2, 2, 5, 3};
  config.max_indices = 30;
  const auto net = generate(config);
  CHECK(contracting_index_count(net) <= 30);

  config.max_indices = 5;  // 30 indices are always needed
  config.max_attempts = 20;
  CHECK_THROWS_AS(generate(config), Error);
}

TEST_CASE("generation errors") {
  auto kind = [](const GenConfig& c) {
    try {
      generate(c);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::parse;  // not thrown
  };
  CHECK(kind({0, 3.0, 0, 2, 2, 0}) == ErrorKind::generation);
  CHECK(kind({4, 3.5, 0, 2, 2, 0}) == ErrorKind::generation);  // 7 > 6 possible pairs
  CHECK(kind({4, -1.0, 0, 2, 2, 0}) == ErrorKind::generation);
  CHECK(kind({4, 2.0, 0, 5, 2, 0}) == ErrorKind::generation);
  CHECK(kind({4, 2.0, 0, 0, 2, 0}) == ErrorKind::generation);
  CHECK_NOTHROW(generate({4, 3.0, 0, 2, 2, 0}));  // complete graph
}

TEST_CASE("isolated tensors get a placeholder") {
  // one index for six tensors leaves four without any
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto net = generate({6, 0.34, 0, 2, 3, seed});
    std::size_t placeholders = 0;
    for (IndexId i = 0; i < net.index_count(); ++i) placeholders += net.index(i).name[0] == 's';
    CHECK(placeholders >= 2);
    for (std::size_t t = 0; t < 6; ++t) CHECK(!net.leaf_head(t).empty());
  }
}
