#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "sfdc/fibonacci.hpp"
#include "sfdc/gamma.hpp"

using sfdc::CodeTable;
using sfdc::GammaContainer;
using sfdc::GammaPlacementLog;
using sfdc::SfdcContainer;
using sfdc::Symbol;

namespace {

GammaContainer golden_container(unsigned lambda, GammaPlacementLog* log = nullptr) {
  return GammaContainer::encode(oracles::to_symbols("Compression"), oracles::golden_table(),
                                lambda, log);
}

// Decode-facing gamma tests use the canonical table with the same lengths;
// the gamma decoder has no lookahead, so the printed non-prefix-free codes
// would misread characters that the standard walk can still disambiguate.
GammaContainer canonical_container(unsigned lambda) {
  return GammaContainer::encode(oracles::to_symbols("Compression"),
                                oracles::canonical_golden_table(), lambda);
}

}  // namespace

TEST_CASE("golden gamma layout with six layers") {
  const GammaContainer cont = golden_container(6);
  REQUIRE(cont.size() == 11);
  REQUIRE(cont.column_count() == 11);
  CHECK(oracles::layer_to_string(cont.layer(0)) == "11101000110");
  CHECK(oracles::layer_to_string(cont.layer(1)) == "11011100111");
  CHECK(oracles::layer_to_string(cont.layer(2)) == "00111111000");
  CHECK(oracles::layer_to_string(cont.layer(3)) == "00100000101");
  CHECK(oracles::layer_to_string(cont.layer(4)) == "01111000010");
  CHECK(oracles::layer_to_string(cont.layer(5)) == "11001000010");
}

TEST_CASE("golden gamma layout with five layers") {
  const GammaContainer cont = golden_container(5);
  REQUIRE(cont.column_count() == 11);
  CHECK(oracles::layer_to_string(cont.layer(0)) == "11101000110");
  CHECK(oracles::layer_to_string(cont.layer(1)) == "11011100111");
  CHECK(oracles::layer_to_string(cont.layer(2)) == "00111011000");
  CHECK(oracles::layer_to_string(cont.layer(3)) == "00100111101");
  CHECK(oracles::layer_to_string(cont.layer(4)) == "01111100011");
}

TEST_CASE("short codes never flow across columns") {
  std::mt19937_64 rng(51);
  for (int round = 0; round < 10; ++round) {
    const auto text = oracles::random_text(rng, 300, 2 + rng() % 14);
    const CodeTable t = oracles::table_for(text);
    const unsigned lambda = std::max(2u, t.max_length());
    const GammaContainer g = GammaContainer::encode(text, t, lambda);
    const SfdcContainer s = SfdcContainer::encode(text, t, lambda);
    REQUIRE(g.column_count() == text.size());
    for (unsigned h = 0; h + 1 < lambda; ++h) REQUIRE(g.layer(h) == s.fixed_layer(h));
    REQUIRE(g.layer(lambda - 1) == s.dynamic_layer());
    // With codes strictly shorter than the layer count the last layer idles.
    if (t.max_length() < lambda)
      REQUIRE(oracles::layer_to_string(g.layer(lambda - 1)) ==
              std::string(text.size(), '0'));
  }
}

TEST_CASE("gamma access reports column delays") {
  const GammaContainer cont = canonical_container(6);

  SECTION("the long code finishes in column five") {
    // Standard delay is 8; the idle fixed slots absorb three pending bits.
    const auto [sym, delay] = cont.access(0);
    CHECK(sym == 'C');
    CHECK(delay == 5);
  }

  SECTION("short codes resolve in their own column") {
    for (std::uint64_t i : {2, 4, 5, 6, 7, 8, 10}) {
      const auto [sym, delay] = cont.access(i);
      CHECK(sym == oracles::to_symbols("Compression")[i]);
      CHECK(delay == 0);
    }
  }

  SECTION("all positions agree with the placement log") {
    std::mt19937_64 rng(53);
    for (int round = 0; round < 15; ++round) {
      const auto text = oracles::random_text(rng, 50 + rng() % 400, 2 + rng() % 30);
      const CodeTable t = oracles::table_for(text);
      const unsigned lambda = 2 + rng() % 6;
      GammaPlacementLog log;
      const GammaContainer enc = GammaContainer::encode(text, t, lambda, &log);
      std::vector<std::uint64_t> want(text.size(), 0);
      for (const auto& p : log) want[p.text_pos] = p.column - p.text_pos;
      for (std::uint64_t i = 0; i < text.size(); ++i) {
        const auto [sym, delay] = enc.access(i);
        CAPTURE(round, lambda, i);
        REQUIRE(sym == text[i]);
        REQUIRE(delay == want[i]);
      }
    }
  }
}

TEST_CASE("gamma windows round-trip") {
  const GammaContainer cont = canonical_container(5);
  CHECK(cont.decode_all() == oracles::to_symbols("Compression"));
  CHECK(cont.decode_window(0, 10) == oracles::to_symbols("Compression"));
  CHECK(cont.decode_window(8, 10) == oracles::to_symbols("ion"));

  std::mt19937_64 rng(59);
  for (int round = 0; round < 20; ++round) {
    const auto text = oracles::random_text(rng, 64 + rng() % 500, 2 + rng() % 40);
    const CodeTable t = oracles::table_for(text);
    const GammaContainer enc = GammaContainer::encode(text, t, 2 + rng() % 8);
    const auto full = enc.decode_all();
    REQUIRE(full == text);
    for (int w = 0; w < 8; ++w) {
      const std::uint64_t i = rng() % text.size();
      const std::uint64_t j = i + rng() % (text.size() - i);
      REQUIRE(enc.decode_window(i, j) ==
              std::vector<Symbol>(full.begin() + i, full.begin() + j + 1));
    }
  }
}

TEST_CASE("column fill is a prefix of the layers and no bit is lost") {
  std::mt19937_64 rng(61);
  for (int round = 0; round < 15; ++round) {
    const auto text = oracles::random_text(rng, 100 + rng() % 300, 2 + rng() % 24);
    const CodeTable t = oracles::table_for(text);
    const unsigned lambda = 2 + rng() % 7;
    GammaPlacementLog log;
    const GammaContainer enc = GammaContainer::encode(text, t, lambda, &log);

    std::uint64_t total_bits = 0;
    const auto freq = sfdc::FrequencyTable::from_text(text);
    for (const auto& [sym, cnt] : freq.items()) total_bits += cnt * t.at(sym).length;
    REQUIRE(log.size() == total_bits);
    REQUIRE(lambda * enc.column_count() >= total_bits);

    // Within a column the used layers are exactly 0..k-1.
    std::vector<unsigned> used(enc.column_count(), 0);
    for (const auto& p : log) ++used[p.column];
    std::vector<unsigned> max_layer(enc.column_count(), 0);
    for (const auto& p : log) max_layer[p.column] = std::max(max_layer[p.column], p.layer);
    for (std::uint64_t c = 0; c < enc.column_count(); ++c)
      if (used[c] > 0) REQUIRE(max_layer[c] + 1 == used[c]);
  }
}

TEST_CASE("gamma delay simulation") {
  SECTION("codes within the layer count give zero delay") {
    const auto text = oracles::to_symbols("Compression");
    CHECK(sfdc::gamma_compute_delay(text, oracles::golden_table(), 10).mean_delay == 0.0);
  }

  SECTION("simulated mean equals measured access mean") {
    std::mt19937_64 rng(67);
    for (int round = 0; round < 15; ++round) {
      const auto text = oracles::random_text(rng, 100 + rng() % 500, 2 + rng() % 24);
      const CodeTable t = oracles::table_for(text);
      const unsigned lambda = 2 + rng() % 7;
      const GammaContainer enc = GammaContainer::encode(text, t, lambda);
      double sum = 0;
      for (std::uint64_t i = 0; i < text.size(); ++i) sum += enc.access(i).second;
      const auto st = sfdc::gamma_compute_delay(text, t, lambda);
      CAPTURE(round, lambda);
      REQUIRE(st.mean_delay == Catch::Approx(sum / text.size()).margin(1e-12));
      REQUIRE(st.dynamic_length == enc.column_count());
    }
  }

  SECTION("Fibonacci text lands in the reported range") {
    const auto text = sfdc::generate_fibonacci_text(10, 2000, 83);
    const CodeTable t = oracles::table_for(text);
    const double mean = sfdc::gamma_compute_delay(text, t, 8).mean_delay;
    CHECK(mean >= 0.0);
    CHECK(mean <= 0.12);
  }
}

TEST_CASE("gamma layer bits versus standard") {
  auto std_total = [](const std::vector<Symbol>& text, const CodeTable& t, unsigned lambda) {
    return (lambda - 1) * text.size() + SfdcContainer::encode(text, t, lambda).dynamic_size();
  };
  auto gamma_total = [](const std::vector<Symbol>& text, const CodeTable& t, unsigned lambda) {
    return lambda * GammaContainer::encode(text, t, lambda).column_count();
  };

  SECTION("a heavy pending backlog favors gamma") {
    const auto text = sfdc::generate_fibonacci_text(10, 50, 3);
    const CodeTable t = oracles::table_for(text);
    for (unsigned lambda = 5; lambda <= 8; ++lambda) {
      CAPTURE(lambda);
      CHECK(gamma_total(text, t, lambda) <= std_total(text, t, lambda));
    }
  }

  SECTION("light backlog differs only by flush-column rounding") {
    const auto text = oracles::to_symbols(
        "peter piper picked a peck of pickled peppers a peck of pickled peppers");
    const CodeTable t = oracles::table_for(text);
    for (unsigned lambda = 3; lambda <= 8; ++lambda) {
      const auto s = std_total(text, t, lambda);
      const auto g = gamma_total(text, t, lambda);
      CAPTURE(lambda);
      CHECK(g <= s + lambda);
    }
  }
}

TEST_CASE("gamma delay never exceeds the standard variant") {
  std::mt19937_64 rng(71);
  for (int round = 0; round < 25; ++round) {
    const auto text = oracles::random_text(rng, 200 + rng() % 800, 2 + rng() % 40);
    const CodeTable t = oracles::table_for(text);
    const unsigned lambda = 2 + rng() % 9;
    const double g = sfdc::gamma_compute_delay(text, t, lambda).mean_delay;
    const double s = sfdc::compute_delay(text, t, lambda).mean_delay;
    CAPTURE(round, lambda);
    REQUIRE(g <= s + 1e-9);
  }
}
