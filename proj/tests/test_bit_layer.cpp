#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "sfdc/bit_layer.hpp"

using sfdc::BitLayer;

TEST_CASE("single bit writes and reads") {
  BitLayer layer(16);
  layer.write_bit(0, true);
  for (std::size_t i = 0; i < 16; ++i) CHECK(layer.read_bit(i) == (i == 0));

  BitLayer other(16);
  other.write_bit(9, true);
  CHECK(other.read_bit(9));

  SECTION("all-zero layer reads zero everywhere") {
    BitLayer zero(100);
    for (std::size_t i = 0; i < 100; ++i) CHECK_FALSE(zero.read_bit(i));
  }

  SECTION("clearing a bit") {
    layer.write_bit(0, false);
    CHECK_FALSE(layer.read_bit(0));
  }

  SECTION("out-of-range access throws") {
    CHECK_THROWS_AS(layer.read_bit(16), std::out_of_range);
    CHECK_THROWS_AS(layer.write_bit(16, true), std::out_of_range);
  }
}

TEST_CASE("random writes agree with a per-bit oracle") {
  std::mt19937_64 rng(42);
  BitLayer layer(128);
  oracles::NaiveBits ref(128);
  std::uniform_int_distribution<std::size_t> pos(0, 127);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int step = 0; step < 1000; ++step) {
    const std::size_t i = pos(rng);
    const bool b = bit(rng) != 0;
    layer.write_bit(i, b);
    ref.write(i, b);
  }
  for (std::size_t i = 0; i < 128; ++i) CHECK(layer.read_bit(i) == ref.read(i));
}

TEST_CASE("rblock extracts right-aligned blocks") {
  const BitLayer layer = oracles::layer_from_string("10110010");
  CHECK(layer.rblock(2, 3) == 0b110);

  SECTION("all-zero layer yields zero for any block") {
    BitLayer zero(70);
    for (unsigned q = 1; q <= 64; q += 7)
      for (std::uint64_t i = 0; i < 70; i += 9) CHECK(zero.rblock(i, q) == 0);
  }

  SECTION("reads past the end are zero-filled") {
    CHECK(layer.rblock(6, 4) == 0b1000);
    CHECK(layer.rblock(8, 8) == 0);
  }

  SECTION("word-straddling block matches the oracle") {
    std::mt19937_64 rng(7);
    BitLayer wide(130);
    oracles::NaiveBits ref(130);
    for (std::size_t i = 0; i < 130; ++i) {
      const bool b = rng() & 1;
      wide.write_bit(i, b);
      ref.write(i, b);
    }
    CHECK(wide.rblock(63, 2) == ref.rblock(63, 2));
    for (int step = 0; step < 1000; ++step) {
      const std::uint64_t i = rng() % 140;
      const unsigned q = 1 + rng() % 64;
      CAPTURE(i, q);
      CHECK(wide.rblock(i, q) == ref.rblock(i, q));
    }
  }

  SECTION("width bounds are enforced") {
    CHECK_THROWS_AS(layer.rblock(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(layer.rblock(0, 65), std::invalid_argument);
    CHECK_THROWS_AS(layer.lblock(0, 0), std::invalid_argument);
  }
}

TEST_CASE("lblock is rblock shifted to the top of the word") {
  std::mt19937_64 rng(11);
  BitLayer layer(200);
  for (std::size_t i = 0; i < 200; ++i) layer.write_bit(i, rng() & 1);

  for (int step = 0; step < 1000; ++step) {
    const std::uint64_t i = rng() % 210;
    const unsigned q = 1 + rng() % 64;
    CAPTURE(i, q);
    CHECK(layer.lblock(i, q) == layer.rblock(i, q) << (64 - q));
  }

  SECTION("all-ones layer, full word") {
    BitLayer ones(64);
    for (std::size_t i = 0; i < 64; ++i) ones.write_bit(i, true);
    CHECK(ones.lblock(0, 64) == ~std::uint64_t{0});
  }

  SECTION("left-aligned prefix of a known string") {
    const BitLayer bits = oracles::layer_from_string("10110010");
    CHECK(bits.lblock(0, 4) == std::uint64_t{0b1011} << 60);
  }
}

TEST_CASE("rblock equals the bit-sum contract") {
  // rblock(S, i, q) = sum_k read_bit(S, i+k) * 2^(q-1-k)
  std::mt19937_64 rng(13);
  BitLayer layer(150);
  for (std::size_t i = 0; i < 150; ++i) layer.write_bit(i, rng() & 1);
  for (int step = 0; step < 500; ++step) {
    const std::uint64_t i = rng() % 150;
    const unsigned q = 1 + rng() % 32;
    std::uint64_t want = 0;
    for (unsigned k = 0; k < q; ++k) {
      const std::uint64_t pos = i + k;
      want = (want << 1) | static_cast<std::uint64_t>(pos < 150 && layer.read_bit(pos));
    }
    CAPTURE(i, q);
    CHECK(layer.rblock(i, q) == want);
  }
}

TEST_CASE("from_words zeroes the padding") {
  std::vector<std::uint64_t> words = {~std::uint64_t{0}, ~std::uint64_t{0}};
  const BitLayer layer = BitLayer::from_words(words, 70);
  for (std::size_t i = 0; i < 70; ++i) CHECK(layer.read_bit(i));
  CHECK(layer.words()[1] == (~std::uint64_t{0}) << 58);
  CHECK_THROWS_AS(BitLayer::from_words(words, 400), std::invalid_argument);
}
