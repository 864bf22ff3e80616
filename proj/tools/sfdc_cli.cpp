// Command-line front end: encode/decode/access/window/delay/fibgen/search/
// theory/bench over container files.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "sfdc/fibonacci.hpp"
#include "sfdc/gamma.hpp"
#include "sfdc/io.hpp"
#include "sfdc/search.hpp"
#include "sfdc/sfdc.hpp"

namespace {

using sfdc::CodeTable;
using sfdc::FrequencyTable;
using sfdc::GammaContainer;
using sfdc::SfdcContainer;
using sfdc::Symbol;

struct GlobalOpts {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool quiet = false;
};

sfdc::IngestMode parse_mode(const std::string& mode) {
  if (mode == "bytes") return sfdc::IngestMode::Bytes;
  if (mode == "utf8") return sfdc::IngestMode::Utf8;
  if (mode == "ints") return sfdc::IngestMode::IntegerLines;
  throw CLI::ValidationError("--mode", "expected bytes, utf8 or ints");
}

std::vector<Symbol> ingest_file(const std::string& path, sfdc::IngestMode mode) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open input file: " + path);
  return sfdc::ingest(is, mode);
}

sfdc::AnyContainer load_container(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open container file: " + path);
  return sfdc::deserialize(is);
}

const SfdcContainer& require_standard(const sfdc::AnyContainer& cont, const char* op) {
  if (!std::holds_alternative<SfdcContainer>(cont))
    throw std::runtime_error(std::string(op) + " requires a standard-variant container");
  return std::get<SfdcContainer>(cont);
}

unsigned default_lambda(const FrequencyTable& freq, const CodeTable& codes) {
  const double mean = codes.average_length(freq);
  return std::max(2u, static_cast<unsigned>(std::ceil(mean - 1e-12)));
}

void emit_symbols(std::ostream& os, const std::vector<Symbol>& symbols, sfdc::IngestMode mode) {
  switch (mode) {
    case sfdc::IngestMode::Bytes:
      for (Symbol c : symbols) os.put(static_cast<char>(c));
      break;
    case sfdc::IngestMode::Utf8:
      for (Symbol cp : symbols) {
        if (cp < 0x80) {
          os.put(static_cast<char>(cp));
        } else if (cp < 0x800) {
          os.put(static_cast<char>(0xc0 | (cp >> 6)));
          os.put(static_cast<char>(0x80 | (cp & 0x3f)));
        } else if (cp < 0x10000) {
          os.put(static_cast<char>(0xe0 | (cp >> 12)));
          os.put(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
          os.put(static_cast<char>(0x80 | (cp & 0x3f)));
        } else {
          os.put(static_cast<char>(0xf0 | (cp >> 18)));
          os.put(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
          os.put(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
          os.put(static_cast<char>(0x80 | (cp & 0x3f)));
        }
      }
      break;
    case sfdc::IngestMode::IntegerLines:
      for (Symbol c : symbols) os << c << '\n';
      break;
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int cmd_encode(const GlobalOpts& g, const std::string& input, const std::string& output,
               unsigned lambda, const std::string& variant, const std::string& mode_name) {
  const sfdc::IngestMode mode = parse_mode(mode_name);
  const auto text = ingest_file(input, mode);
  if (text.empty()) throw std::runtime_error("input text is empty");
  const FrequencyTable freq = FrequencyTable::from_text(text);
  const CodeTable codes = CodeTable::build(freq);
  if (lambda == 0) lambda = default_lambda(freq, codes);
  if (lambda < 2) throw std::runtime_error("layer count must be at least 2");

  std::ofstream os(output, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + output);

  sfdc::DelayStats st;
  if (variant == "standard") {
    const SfdcContainer cont = SfdcContainer::encode(text, codes, lambda);
    sfdc::serialize(cont, os);
    st = cont.stats();
  } else if (variant == "gamma") {
    const GammaContainer cont = GammaContainer::encode(text, codes, lambda);
    sfdc::serialize(cont, os);
    st = cont.stats();
  } else {
    throw CLI::ValidationError("--variant", "expected standard or gamma");
  }
  if (!os) throw std::runtime_error("container write failed: " + output);

  if (!g.quiet) {
    std::cout << "n " << st.length << "\n"
              << "lambda " << lambda << "\n"
              << "variant " << variant << "\n"
              << "bits_per_symbol " << st.bits_per_char << "\n"
              << "idle_bits_per_symbol " << st.idle_bits_per_char << "\n"
              << "mean_delay " << st.mean_delay << "\n";
  }
  return 0;
}

int cmd_decode(const GlobalOpts&, const std::string& container, const std::string& output,
               const std::string& mode_name) {
  const sfdc::IngestMode mode = parse_mode(mode_name);
  const auto any = load_container(container);
  const std::vector<Symbol> text = std::visit([](const auto& c) { return c.decode_all(); }, any);
  if (output == "-") {
    emit_symbols(std::cout, text, mode);
  } else {
    std::ofstream os(output, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + output);
    emit_symbols(os, text, mode);
  }
  return 0;
}

int cmd_access(const GlobalOpts&, const std::string& container, std::uint64_t i) {
  const auto any = load_container(container);
  const auto [sym, delay] =
      std::visit([&](const auto& c) { return c.access(i); }, any);
  std::cout << "symbol " << sym;
  if (sym >= 0x20 && sym < 0x7f) std::cout << " '" << static_cast<char>(sym) << "'";
  std::cout << "\ndelay " << delay << "\n";
  return 0;
}

int cmd_window(const GlobalOpts&, const std::string& container, std::uint64_t i, std::uint64_t j,
               const std::string& mode_name) {
  const sfdc::IngestMode mode = parse_mode(mode_name);
  const auto any = load_container(container);
  const auto window = std::visit([&](const auto& c) { return c.decode_window(i, j); }, any);
  emit_symbols(std::cout, window, mode);
  if (mode != sfdc::IngestMode::IntegerLines) std::cout << "\n";
  return 0;
}

std::pair<unsigned, unsigned> parse_range(const std::string& range) {
  const auto dots = range.find("..");
  if (dots == std::string::npos) {
    const unsigned v = static_cast<unsigned>(std::stoul(range));
    return {v, v};
  }
  const unsigned a = static_cast<unsigned>(std::stoul(range.substr(0, dots)));
  const unsigned b = static_cast<unsigned>(std::stoul(range.substr(dots + 2)));
  if (a < 2 || b < a) throw std::runtime_error("bad lambda range: " + range);
  return {a, b};
}

int cmd_delay(const GlobalOpts& g, const std::string& input, const std::string& range,
              const std::string& variant, double bound, const std::string& mode_name) {
  const auto text = ingest_file(input, parse_mode(mode_name));
  if (text.empty()) throw std::runtime_error("input text is empty");
  const FrequencyTable freq = FrequencyTable::from_text(text);
  const CodeTable codes = CodeTable::build(freq);
  const auto [lo, hi] = parse_range(range);

  const bool run_standard = variant == "standard" || variant == "both";
  const bool run_gamma = variant == "gamma" || variant == "both";
  if (!run_standard && !run_gamma)
    throw CLI::ValidationError("--variant", "expected standard, gamma or both");

  unsigned best_standard = 0, best_gamma = 0;
  if (!g.quiet) std::cout << "lambda variant mean_delay\n";
  for (unsigned lambda = lo; lambda <= hi; ++lambda) {
    if (run_standard) {
      const double mean = sfdc::compute_delay(text, codes, lambda).mean_delay;
      if (!g.quiet) std::cout << lambda << " standard " << mean << "\n";
      if (best_standard == 0 && mean < bound) best_standard = lambda;
    }
    if (run_gamma) {
      const double mean = sfdc::gamma_compute_delay(text, codes, lambda).mean_delay;
      if (!g.quiet) std::cout << lambda << " gamma " << mean << "\n";
      if (best_gamma == 0 && mean < bound) best_gamma = lambda;
    }
  }
  auto report = [&](const char* name, unsigned best) {
    std::cout << "min_lambda_below_bound " << name << " ";
    if (best)
      std::cout << best << "\n";
    else
      std::cout << "none\n";
  };
  if (run_standard) report("standard", best_standard);
  if (run_gamma) report("gamma", best_gamma);
  return 0;
}

int cmd_fibgen(const GlobalOpts& g, unsigned sigma, std::uint64_t scale, std::uint64_t seed,
               const std::string& output) {
  if (sigma > 256) throw std::runtime_error("byte output needs sigma <= 256");
  const auto text = sfdc::generate_fibonacci_text(sigma, scale, seed);
  std::ofstream os(output, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + output);
  emit_symbols(os, text, sfdc::IngestMode::Bytes);
  if (!g.quiet) {
    std::cout << "length " << text.size() << "\ncounts";
    const FrequencyTable freq = FrequencyTable::from_text(text);
    for (unsigned c = 0; c < sigma; ++c) std::cout << " " << freq.count(c);
    std::cout << "\n";
  }
  return 0;
}

int cmd_search(const GlobalOpts& g, const std::string& container, std::string pattern_literal,
               const std::string& pattern_file, unsigned q, bool baseline,
               const std::string& mode_name) {
  const auto any = load_container(container);
  const SfdcContainer& cont = require_standard(any, "search");

  std::vector<Symbol> pattern;
  if (!pattern_file.empty()) {
    pattern = ingest_file(pattern_file, parse_mode(mode_name));
  } else {
    for (char c : pattern_literal) pattern.push_back(static_cast<unsigned char>(c));
  }
  if (pattern.empty()) throw std::runtime_error("pattern is empty");

  const auto start = std::chrono::steady_clock::now();
  const auto hits = sfdc::skip_search_text(cont, pattern, q, g.threads);
  const double blind_time = seconds_since(start);

  std::cout << "count " << hits.size() << "\n";
  if (!g.quiet && !hits.empty()) {
    std::cout << "positions";
    for (std::uint64_t h : hits) std::cout << " " << h;
    std::cout << "\n";
  }

  if (baseline) {
    const auto text = cont.decode_all();
    const auto base_start = std::chrono::steady_clock::now();
    const auto expected = sfdc::plain_skip_search(text, pattern);
    const double plain_time = seconds_since(base_start);
    if (expected != hits) throw std::runtime_error("baseline mismatch: result sets differ");
    std::cout << "baseline_agreement ok\n";
    const double n = static_cast<double>(cont.size());
    std::cout << "sfdc_throughput_mbps " << n / (blind_time * 1e6 + 1e-12) << "\n";
    std::cout << "plain_throughput_mbps " << n / (plain_time * 1e6 + 1e-12) << "\n";
    std::cout << "speedup " << plain_time / (blind_time + 1e-12) << "\n";
  }
  return 0;
}

int cmd_theory(const GlobalOpts&, unsigned sigma, unsigned lambda) {
  std::cout << "sigma " << sigma << "\nlambda " << lambda << "\n";
  std::cout << "expected_code_length " << sfdc::to_double(sfdc::expected_code_length(sigma))
            << "\n";
  std::cout << "expected_idle_bits " << sfdc::to_double(sfdc::expected_idle_bits(sigma, lambda))
            << "\n";
  if (lambda >= 4 && lambda + 1 <= sigma) {
    std::cout << "expected_delay_standard "
              << sfdc::to_double(sfdc::expected_delay_standard(sigma, lambda)) << "\n";
    const auto [lo, hi] = sfdc::gamma_delay_bounds(sigma, lambda);
    std::cout << "gamma_delay_lower " << sfdc::to_double(lo) << "\n";
    std::cout << "gamma_delay_upper " << sfdc::to_double(hi) << "\n";
    std::cout << "gamma_delay_ceiling_sum "
              << sfdc::to_double(sfdc::gamma_delay_ceil_sum(sigma, lambda)) << "\n";
  } else {
    std::cout << "expected_delay_standard out-of-regime\n";
  }
  return 0;
}

int cmd_bench(const GlobalOpts& g, const std::string& corpus_dir, const std::string& lambdas_arg,
              const std::string& lengths_arg, const std::string& csv_path) {
  std::vector<unsigned> lambdas;
  for (const auto& part : CLI::detail::split(lambdas_arg, ','))
    lambdas.push_back(static_cast<unsigned>(std::stoul(part)));
  std::vector<std::uint64_t> lengths;
  for (const auto& part : CLI::detail::split(lengths_arg, ','))
    lengths.push_back(std::stoull(part));

  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("corpus directory has no files");

  std::ofstream csv;
  std::ostream* out = &std::cout;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    if (!csv) throw std::runtime_error("cannot open csv file: " + csv_path);
    out = &csv;
  }
  *out << "file,operation,lambda,param,bits_per_symbol,mean_delay,throughput_bytes_per_sec,"
          "occurrences\n";

  for (const std::string& path : files) {
    const auto text = ingest_file(path, sfdc::IngestMode::Bytes);
    if (text.size() < 2) continue;
    const std::string name = std::filesystem::path(path).filename().string();
    const FrequencyTable freq = FrequencyTable::from_text(text);
    const CodeTable codes = CodeTable::build(freq);
    std::mt19937_64 rng(g.seed);

    for (unsigned lambda : lambdas) {
      auto t0 = std::chrono::steady_clock::now();
      const SfdcContainer cont = SfdcContainer::encode(text, codes, lambda);
      const double enc_time = seconds_since(t0);
      const sfdc::DelayStats st = cont.stats();
      auto row = [&](const std::string& op, const std::string& param, double secs,
                     std::uint64_t occurrences) {
        *out << csv_quote(name) << "," << op << "," << lambda << "," << csv_quote(param) << ","
             << st.bits_per_char << "," << st.mean_delay << ","
             << static_cast<std::uint64_t>(text.size() / (secs + 1e-12)) << "," << occurrences
             << "\n";
      };
      row("encode", "", enc_time, 0);

      t0 = std::chrono::steady_clock::now();
      const auto decoded = cont.decode_all();
      row("decode", "", seconds_since(t0), 0);
      if (decoded != text) throw std::runtime_error("decode mismatch in bench");

      // Random-order single-character accesses, seeded shuffle.
      std::vector<std::uint64_t> order(std::min<std::uint64_t>(text.size(), 100000));
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      t0 = std::chrono::steady_clock::now();
      std::uint64_t sink = 0;
      for (std::uint64_t i : order) sink += cont.access(i).first;
      const double access_time = seconds_since(t0);
      row("access", "n=" + std::to_string(order.size()) + ";sink=" + std::to_string(sink % 97),
          access_time * text.size() / order.size(), 0);

      for (std::uint64_t m : lengths) {
        if (m > text.size()) continue;
        const std::uint64_t start = rng() % (text.size() - m + 1);
        const std::vector<Symbol> pattern(text.begin() + start, text.begin() + start + m);

        t0 = std::chrono::steady_clock::now();
        const auto hits = sfdc::skip_search_text(cont, pattern, 0, g.threads);
        const double blind_time = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const auto expected = sfdc::plain_skip_search(text, pattern);
        const double plain_time = seconds_since(t0);
        if (hits != expected) throw std::runtime_error("bench search mismatch");

        row("sfdc_skip_search", "m=" + std::to_string(m), blind_time, hits.size());
        row("plain_skip_search", "m=" + std::to_string(m), plain_time, expected.size());
        if (!g.quiet)
          std::cerr << name << " lambda=" << lambda << " m=" << m << " speedup "
                    << plain_time / (blind_time + 1e-12) << "\n";
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered variable-length encoding with direct access"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed for all randomized steps");
  app.add_option("--threads", g.threads, "worker threads for search probing")
      ->check(CLI::Range(1u, 256u));
  app.add_flag("--quiet", g.quiet, "suppress informational output");

  std::string input, output, container, mode = "bytes", variant = "standard";
  unsigned lambda = 0;

  auto* enc = app.add_subcommand("encode", "encode a file into a container");
  enc->add_option("input", input)->required();
  enc->add_option("output", output)->required();
  enc->add_option("--lambda", lambda, "layer count (default: ceil of mean code length)");
  enc->add_option("--variant", variant)->check(CLI::IsMember({"standard", "gamma"}));
  enc->add_option("--mode", mode)->check(CLI::IsMember({"bytes", "utf8", "ints"}));

  std::string dec_out = "-";
  auto* dec = app.add_subcommand("decode", "decode a container back to its text");
  dec->add_option("container", container)->required();
  dec->add_option("output", dec_out);
  dec->add_option("--mode", mode)->check(CLI::IsMember({"bytes", "utf8", "ints"}));

  std::uint64_t pos_i = 0, pos_j = 0;
  auto* acc = app.add_subcommand("access", "decode one character and report its delay");
  acc->add_option("container", container)->required();
  acc->add_option("i", pos_i)->required();

  auto* win = app.add_subcommand("window", "decode a window of the text");
  win->add_option("container", container)->required();
  win->add_option("i", pos_i)->required();
  win->add_option("j", pos_j)->required();
  win->add_option("--mode", mode)->check(CLI::IsMember({"bytes", "utf8", "ints"}));

  std::string range = "2..8";
  double bound = 1.0;
  std::string delay_variant = "both";
  auto* del = app.add_subcommand("delay", "simulate mean decoding delay per layer count");
  del->add_option("input", input)->required();
  del->add_option("--lambda-range", range, "layer counts to sweep, e.g. 4..9");
  del->add_option("--variant", delay_variant)->check(CLI::IsMember({"standard", "gamma", "both"}));
  del->add_option("--bound", bound, "target mean delay");
  del->add_option("--mode", mode)->check(CLI::IsMember({"bytes", "utf8", "ints"}));

  unsigned sigma = 10;
  std::uint64_t scale = 1, fib_seed = 0;
  auto* fib = app.add_subcommand("fibgen", "generate a Fibonacci-frequency text");
  fib->add_option("--sigma", sigma)->required();
  fib->add_option("--scale", scale);
  fib->add_option("--seed", fib_seed);
  fib->add_option("output", output)->required();

  std::string pattern_literal, pattern_file;
  unsigned q = 0;
  bool baseline = false;
  auto* sea = app.add_subcommand("search", "find a pattern without decoding the text");
  sea->add_option("container", container)->required();
  sea->add_option("--pattern", pattern_literal, "pattern as a byte literal");
  sea->add_option("--pattern-file", pattern_file, "pattern read from a file");
  sea->add_option("--q", q, "probe block width (default min(8, m))")->check(CLI::Range(1u, 16u));
  sea->add_flag("--baseline", baseline, "cross-check against plain skip search");
  sea->add_option("--mode", mode)->check(CLI::IsMember({"bytes", "utf8", "ints"}));

  unsigned th_sigma = 10, th_lambda = 5;
  auto* the = app.add_subcommand("theory", "closed-form expectations for the Fibonacci model");
  the->add_option("--sigma", th_sigma)->required();
  the->add_option("--lambda", th_lambda)->required();

  std::string corpus_dir, lambdas_arg = "5,6,7,8", lengths_arg = "16,32,64", csv_path;
  auto* ben = app.add_subcommand("bench", "sweep encode/decode/access/search over a corpus");
  ben->add_option("corpus", corpus_dir)->required();
  ben->add_option("--lambdas", lambdas_arg);
  ben->add_option("--pattern-lengths", lengths_arg);
  ben->add_option("--csv", csv_path, "write the report as CSV");

  // Let --seed/--threads/--quiet appear after the subcommand as well.
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enc) return cmd_encode(g, input, output, lambda, variant, mode);
    if (*dec) return cmd_decode(g, container, dec_out, mode);
    if (*acc) return cmd_access(g, container, pos_i);
    if (*win) return cmd_window(g, container, pos_i, pos_j, mode);
    if (*del) return cmd_delay(g, input, range, delay_variant, bound, mode);
    if (*fib) return cmd_fibgen(g, sigma, scale, fib_seed, output);
    if (*sea) return cmd_search(g, container, pattern_literal, pattern_file, q, baseline, mode);
    if (*the) return cmd_theory(g, th_sigma, th_lambda);
    if (*ben) return cmd_bench(g, corpus_dir, lambdas_arg, lengths_arg, csv_path);
  } catch (const std::exception& e) {
    std::cerr << "sfdc: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
