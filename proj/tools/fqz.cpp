// fqz: command-line front end for condensation-measure quantization.

#include "fqz/asymptotics.hpp"
#include "fqz/config.hpp"
#include "fqz/mass.hpp"
#include "fqz/quantizer.hpp"
#include "fqz/report.hpp"
#include "fqz/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <regex>

namespace {

using namespace fqz;

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kResource = 3 };

struct Common {
  std::string config;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "built-in system name or path to a JSON config")->required();
  cmd->add_option("--format", c.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
}

RunManifest manifest_for(const LoadedConfig& cfg, const std::string& sub, std::map<std::string, std::string> flags,
                         std::uint64_t seed) {
  RunManifest m;
  m.config_source = cfg.source;
  m.config_hash = hex64(fnv1a(cfg.text));
  m.subcommand = sub;
  m.flags = std::move(flags);
  m.seed = seed;
  return m;
}

std::string render(const Table& table, const RunManifest& m, const std::string& format) {
  return format == "jsonl" ? to_jsonl(table, &m) : to_csv(table, &m);
}

void print_notes(const LoadedConfig& cfg) {
  for (const auto& note : cfg.notes) std::cerr << "note: " << note << '\n';
}

int cmd_dim(const Common& c) {
  const auto cfg = load_config(c.config);
  print_notes(cfg);
  const auto& cs = cfg.system;
  Table t{{"item", "value", "status", "detail"}, {}, {"item", "detail"}};
  t.add({"name", cfg.name, "", ""});
  t.add({"case", to_string(cs.case_tag()), "", ""});
  t.add({"dimension", std::to_string(cs.dim()), "", ""});
  t.add({"d0", format_double(dimension_d0(cs), 15), "", "u0/l0"});
  t.add({"u0", format_double(u0(cs), 15), "", ""});
  t.add({"l0", format_double(l0(cs), 15), "", ""});
  t.add({"k0_nu", format_double(dimension_kr(cs.t(), cs.c(), 0), 15), "", ""});
  t.add({"similarity_dimension_outer", format_double(cs.outer().similarity_dimension(), 15), "", ""});
  t.add({"similarity_dimension_inner", format_double(cs.inner().similarity_dimension(), 15), "", ""});
  std::vector<std::pair<std::string, ValidationReport>> reports{{"outer", validate_osc(cs.outer())}};
  if (cs.case_tag() == CaseTag::CaseII) {
    reports.emplace_back("inner", validate_osc(cs.inner()));
    reports.emplace_back("system", validate_iosc(cs));
  }
  bool ok = true;
  for (const auto& [scope, r] : reports) {
    const std::string label = r.subject + " " + scope;
    for (const auto& check : r.checks) t.add({label + " " + check.name, "", to_string(check.status), check.detail});
    t.add({label, "", r.passed() ? "PASS" : "FAIL", ""});
    ok = ok && r.passed();
  }
  const auto m = manifest_for(cfg, "dim", {{"format", c.format}}, 0);
  std::cout << render(t, m, c.format);
  return ok ? kOk : kCheckFailed;
}

int cmd_diagnose(const Common& c, const std::string& suite, const SuiteOptions& opt) {
  const auto cfg = load_config(c.config);
  print_notes(cfg);
  const auto rows = run_suite(cfg.system, suite, opt);
  const auto m = manifest_for(cfg, "diagnose",
                              {{"suite", suite},
                               {"jmax", std::to_string(opt.jmax)},
                               {"antichains", std::to_string(opt.antichains)},
                               {"format", c.format}},
                              opt.seed);
  std::cout << render(check_table(rows), m, c.format);
  return all_pass(rows) ? kOk : kCheckFailed;
}

std::pair<int, int> parse_range(const std::string& text) {
  static const std::regex re(R"(^\s*(\d+)\s*(?:\.\.|-|:)\s*(\d+)\s*$)");
  std::smatch mt;
  if (std::regex_match(text, mt, re)) return {std::stoi(mt[1]), std::stoi(mt[2])};
  static const std::regex single(R"(^\s*(\d+)\s*$)");
  if (std::regex_match(text, mt, single)) return {std::stoi(mt[1]), std::stoi(mt[1])};
  throw CLI::ValidationError("--j-range", "expected A..B, got '" + text + "'");
}

struct QuantizeFlags {
  std::string j_range = "1..8";
  std::string method = "antichain";
  double tol = 1e-3;
  std::uint64_t seed = 1;
  bool timing = false;
  int threads = 1;
  std::size_t max_pieces = std::size_t{1} << 21;
  int iterations = 30;
  std::string cache_dir;
  bool no_cache = false;
};

int cmd_quantize(const Common& c, const QuantizeFlags& f) {
  const auto cfg = load_config(c.config);
  print_notes(cfg);
  const auto [j_min, j_max] = parse_range(f.j_range);
  const QuantizeMethod method = f.method == "lloyd"    ? QuantizeMethod::Lloyd
                                : f.method == "oracle" ? QuantizeMethod::Oracle
                                                       : QuantizeMethod::Antichain;
  auto m = manifest_for(cfg, "quantize",
                        {{"j_range", std::to_string(j_min) + ".." + std::to_string(j_max)},
                         {"method", f.method},
                         {"tol", format_double(f.tol, 17)},
                         {"max_pieces", std::to_string(f.max_pieces)},
                         {"iterations", std::to_string(f.iterations)},
                         {"timing", f.timing ? "1" : "0"},
                         {"format", c.format}},
                        f.seed);
  const std::string key = m.hash();
  const std::string ext = c.format == "jsonl" ? ".jsonl" : ".csv";
  const ResultCache cache(f.cache_dir.empty() ? ResultCache::default_dir() : std::filesystem::path(f.cache_dir));
  const bool use_cache = !f.no_cache && !f.timing;
  if (use_cache) {
    if (auto hit = cache.load(key, ext)) {
      std::cerr << "cache hit: " << (cache.dir() / (key + ext)).string() << '\n';
      std::cout << *hit;
      return hit->find(",unconverged") == std::string::npos ? kOk : kResource;
    }
  }

  CoefficientOptions opt;
  opt.bracket.tol = f.tol;
  opt.bracket.max_pieces = f.max_pieces;
  opt.lloyd.iterations = f.iterations;
  opt.timing = f.timing;
  const auto start = std::chrono::steady_clock::now();
  const auto rows = coefficient_table(cfg.system, j_min, j_max, method, opt);
  if (f.timing) m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Table t{{"n", "method", "e_lower", "e_upper", "coef_lower", "coef_upper", "seconds"}, {}, {}};
  bool converged = true;
  for (const auto& r : rows) {
    const std::string line = coefficient_csv_row(r, f.timing);
    std::vector<std::string> cells;
    std::size_t pos = 0;
    for (std::size_t next; (next = line.find(',', pos)) != std::string::npos; pos = next + 1) cells.push_back(line.substr(pos, next - pos));
    cells.push_back(line.substr(pos));
    t.add(cells);
    if (!r.converged) {
      converged = false;
      std::cerr << "resource: j=" << r.j << " n=" << r.n << " bracket did not reach tol " << f.tol
                << " within " << f.max_pieces << " pieces; e_upper is still an upper bound\n";
    }
  }
  std::string body = render(t, m, c.format);
  if (!converged) body += c.format == "jsonl" ? "{\"status\":\"unconverged\"}\n" : "# status,unconverged\n";
  std::cout << body;
  if (use_cache) cache.store(key, ext, body, m.json());
  return converged ? kOk : kResource;
}

int cmd_antichain(const Common& c, int j) {
  const auto cfg = load_config(c.config);
  print_notes(cfg);
  const auto& cs = cfg.system;
  const auto fam = explicit_family(cs, j, cfg.family_cap);
  Table t{{"kind", "word", "inner_word", "length", "mass_exact", "mass"}, {}, {"word", "inner_word", "mass_exact"}};
  auto word = [](const Word& w) { return w.empty() ? std::string("θ") : w.str(); };
  for (const auto& sigma : fam.members.members()) {
    const Rational mass = cs.case_tag() == CaseTag::CaseI ? mass_case1_exact(cs, sigma) : mass_case2_exact(cs, sigma);
    t.add({cs.case_tag() == CaseTag::CaseI ? "Lambda" : "Gamma", word(sigma), "", std::to_string(sigma.size()),
           mass.get_str(), format_double(mass.get_d(), 15)});
  }
  for (std::size_t a = 0; a < fam.psi.size(); ++a)
    for (const auto& rho : fam.inner[a].members()) {
      const Rational mass = mass_case2_exact(cs, fam.psi[a], rho);
      t.add({"Psi x Gamma(sigma)", word(fam.psi[a]), word(rho), std::to_string(fam.psi[a].size() + rho.size()),
             mass.get_str(), format_double(mass.get_d(), 15)});
    }
  const auto m = manifest_for(cfg, "antichain", {{"j", std::to_string(j)}, {"format", c.format}}, 0);
  std::cout << render(t, m, c.format);
  std::cerr << "count " << fam.count << '\n';
  return kOk;
}

int cmd_mass(const Common& c, const std::string& word_text, const std::string& omega_text) {
  const auto cfg = load_config(c.config);
  print_notes(cfg);
  const auto& cs = cfg.system;
  auto parse = [](const std::string& text, int n) { return text == "θ" || text.empty() ? Word(n) : Word::parse(text, n); };
  const Word sigma = parse(word_text, cs.outer_size());
  Table t{{"word", "omega", "mass_exact", "mass", "log_mass"}, {}, {"word", "omega", "mass_exact"}};
  if (cs.case_tag() == CaseTag::CaseI) {
    if (!omega_text.empty()) throw CLI::ValidationError("--omega", "only Case II systems take an inner word");
    const Rational mass = mass_case1_exact(cs, sigma);
    t.add({word_text, "", mass.get_str(), format_double(mass.get_d(), 15), format_double(log_mass_case1(cs, sigma), 15)});
  } else {
    std::optional<Word> omega;
    if (!omega_text.empty()) omega = parse(omega_text, cs.inner_size());
    const Rational mass = mass_case2_exact(cs, sigma, omega);
    t.add({word_text, omega_text, mass.get_str(), format_double(mass.get_d(), 15),
           format_double(log_mass_case2(cs, sigma, omega), 15)});
  }
  const auto m = manifest_for(cfg, "mass", {{"word", word_text}, {"omega", omega_text}, {"format", c.format}}, 0);
  std::cout << render(t, m, c.format);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantization of condensation measures"};
  app.set_version_flag("--version", std::string(fqz::kToolVersion));
  app.require_subcommand(1);

  Common dim_c, diag_c, quant_c, anti_c, mass_c;
  auto* dim = app.add_subcommand("dim", "dimensions and separation checks");
  add_common(dim, dim_c);

  auto* diag = app.add_subcommand("diagnose", "identity, bound, convergence and ball-mass checks");
  add_common(diag, diag_c);
  std::string suite;
  fqz::SuiteOptions suite_opt;
  diag->add_option("--suite", suite, "mass, antichain, identity, convergence or ball")
      ->required()
      ->check(CLI::IsMember(fqz::suite_names()));
  diag->add_option("--jmax", suite_opt.jmax, "largest level j")->check(CLI::Range(1, 30));
  diag->add_option("--antichains", suite_opt.antichains, "random maximal antichains per check")->check(CLI::Range(0, 100000));
  diag->add_option("--seed", suite_opt.seed, "seed for random antichains");

  auto* quant = app.add_subcommand("quantize", "quantization coefficient table");
  add_common(quant, quant_c);
  QuantizeFlags qf;
  quant->add_option("--j-range", qf.j_range, "levels, as A..B");
  quant->add_option("--method", qf.method, "antichain, lloyd or oracle")->check(CLI::IsMember({"antichain", "lloyd", "oracle"}));
  quant->add_option("--tol", qf.tol, "bracket tolerance in nats")->check(CLI::PositiveNumber);
  quant->add_option("--seed", qf.seed, "root seed, recorded in the manifest");
  quant->add_flag("--timing", qf.timing, "fill the seconds column (disables the cache)");
  quant->add_option("--threads", qf.threads, "worker cap")->check(CLI::Range(1, 1024));
  quant->add_option("--max-pieces", qf.max_pieces, "bracket piece budget")->check(CLI::Range(std::size_t{16}, std::size_t{1} << 28));
  quant->add_option("--iterations", qf.iterations, "lloyd iterations")->check(CLI::Range(0, 10000));
  quant->add_option("--cache-dir", qf.cache_dir, "cache directory (default: $FQZ_CACHE_DIR)");
  quant->add_flag("--no-cache", qf.no_cache, "neither read nor write the cache");

  auto* anti = app.add_subcommand("antichain", "dump the level family at j");
  add_common(anti, anti_c);
  int j = 1;
  anti->add_option("--j", j, "level")->required()->check(CLI::Range(1, 64));

  auto* mass = app.add_subcommand("mass", "mass of a cylinder");
  add_common(mass, mass_c);
  std::string word, omega;
  mass->add_option("--word", word, "outer word, e.g. 121")->required();
  mass->add_option("--omega", omega, "inner word (Case II)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    if (*dim) return cmd_dim(dim_c);
    if (*diag) return cmd_diagnose(diag_c, suite, suite_opt);
    if (*quant) return cmd_quantize(quant_c, qf);
    if (*anti) return cmd_antichain(anti_c, j);
    if (*mass) return cmd_mass(mass_c, word, omega);
  } catch (const fqz::ConfigError& e) {
    std::cerr << "config error at '" << e.field() << "': " << e.what() << '\n';
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const std::length_error& e) {
    std::cerr << "resource: " << e.what() << '\n';
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
