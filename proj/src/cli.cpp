#include "maxbell/cli.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "maxbell/bellman_core.hpp"
#include "maxbell/errors.hpp"
#include "maxbell/extremal_lab.hpp"
#include "maxbell/io.hpp"
#include "maxbell/verification.hpp"
#include "maxbell/weight_theory.hpp"

namespace maxbell {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw UsageError("malformed number \"" + text + "\" for " + what);
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw UsageError("empty list for " + what);
  return out;
}

// "v" or "lo:hi:n".
std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  if (text.find(':') == std::string::npos) return {parse_number(text, what)};
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("grid for " + what + " must be lo:hi:n");
  const double lo = parse_number(parts[0], what);
  const double hi = parse_number(parts[1], what);
  const double n = parse_number(parts[2], what);
  if (!(n >= 1.0) || n != std::floor(n) || n > 1e6) {
    throw UsageError("grid count for " + what + " must be a positive integer");
  }
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : i + 1 == count ? hi : lo + (hi - lo) * double(i) / double(count - 1);
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct Globals {
  std::string format;
  std::string out_path;
  std::uint64_t seed = 0;
  std::string command_line;
};

// Scalar results: bare primary value by default, or a json object / csv row.
void emit_fields(std::ostream& out, const Globals& g,
                 const std::vector<std::pair<std::string, double>>& fields, const std::string& plain) {
  if (g.format == "json") {
    Json doc = Json::object();
    for (const auto& [k, v] : fields) doc[k] = v;
    out << doc.dump() << '\n';
  } else if (g.format == "csv") {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].first;
    out << '\n';
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << format_number(fields[i].second);
    out << '\n';
  } else {
    out << plain << '\n';
  }
}

struct VerifyFlags {
  std::string suite;
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return !values.at(key).empty(); }
  double number(const std::string& key, double fallback) const {
    return has(key) ? parse_number(values.at(key), "--" + key) : fallback;
  }
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? parse_list(values.at(key), "--" + key) : fallback;
  }
  std::size_t count(const std::string& key, std::size_t fallback) const {
    const double v = number(key, double(fallback));
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) throw UsageError("--" + key + " must be a count");
    return static_cast<std::size_t>(v);
  }
  const std::string& text(const std::string& key) const { return values.at(key); }
};

const std::vector<std::string> kVerifyKeys{"p",     "k",      "b",    "F",     "f",      "h",
                                           "z",     "alphas", "q",    "hexp",  "kcut",   "pieces",
                                           "budget", "depth", "trials", "tree", "weight"};

double single_p(const VerifyFlags& flags, double fallback) {
  const std::vector<double> ps = flags.list("p", {fallback});
  if (ps.size() != 1) throw UsageError("suite " + flags.suite + " takes a single --p");
  return ps.front();
}

std::vector<VerificationReport> run_suite(const std::string& suite, const VerifyFlags& flags,
                                          std::uint64_t seed) {
  std::vector<VerificationReport> reports;
  auto tree_doc = [&]() -> std::optional<TreeDocument> {
    if (!flags.has("tree")) return std::nullopt;
    return tree_from_json(read_json_file(flags.text("tree")));
  };
  auto leaf = [](const TreeDocument& doc, const std::string& name) -> const LeafFunction& {
    auto it = doc.functions.find(name);
    if (it == doc.functions.end()) throw UsageError("tree file lacks leaf_values \"" + name + "\"");
    return it->second;
  };

  if (suite == "thm1") {
    SymmetrizationProblem prob;
    prob.q = flags.number("q", 2.0);
    prob.k = flags.number("kcut", 1.0);
    prob.h = flags.has("weight") ? piecewise_from_json(read_json_file(flags.text("weight")))
                                 : PiecewisePower::power(1.0, flags.number("hexp", 0.0));
    const std::size_t trials = flags.count("trials", 200);
    if (auto doc = tree_doc()) {
      const LeafFunction& phi = leaf(*doc, "phi");
      reports.push_back(verify_symmetrization(doc->tree, decreasing_rearrangement(phi), prob, trials, seed));
    } else {
      reports.push_back(run_thm1_suite(prob, trials, seed));
    }
  } else if (suite == "thm2") {
    const double p = single_p(flags, 2.0);
    const double k = flags.number("k", 1.0);
    const double b = flags.number("b", 0.0);
    reports.push_back(verify_thm2_upper(p, k, b, flags.count("trials", 500), seed));
    if (flags.has("budget")) {
      const double F = flags.number("F", 2.0);
      const double f = flags.number("f", 1.0);
      const std::size_t pieces = flags.count("pieces", 64);
      const std::size_t budget = flags.count("budget", 20000);
      const BruteForceResult bf = bruteforce_thm2_sup(p, k, b, F, f, int(pieces), int(budget), seed);
      const ApStarConstants ac = power_weight_constants({k, b, p});
      const double target = bellman_star({{p, F, f}, ac.a, ac.c});
      VerificationReport rep;
      rep.name = "thm2_bruteforce";
      rep.instance = "pieces=" + std::to_string(pieces) + " budget=" + std::to_string(budget);
      rep.seed = seed;
      rep.trials = 1;
      const bool bracket = pieces >= 64 && budget >= 20000;
      rep.tolerance = bracket ? "best in [0.95, 1 + 1e-8] * bellman_star" : "best <= bellman_star (1 + 1e-8)";
      TrialRecord row;
      row.lhs = bf.best;
      row.rhs = target;
      row.margin = target - bf.best;
      row.pass = bf.best <= target * (1.0 + 1e-8) && (!bracket || bf.best >= 0.95 * target);
      rep.details = {{"proposals", bf.proposals},
                     {"accepted", bf.accepted},
                     {"fit_failures", bf.fit_failures},
                     {"ratio", bf.best / target}};
      rep.add(row, [&] {
        return Json{{"breakpoints", bf.breakpoints}, {"values", bf.values}, {"p", p}, {"k", k},
                    {"b", b}, {"F", F}, {"f", f}};
      });
      reports.push_back(std::move(rep));
    }
  } else if (suite == "prop1" || suite == "thm3" || suite == "doob") {
    if (auto doc = tree_doc()) {
      const double p = single_p(flags, 2.0);
      const LeafFunction& phi = leaf(*doc, "phi");
      if (suite == "doob") {
        reports.push_back(verify_doob(phi, p));
      } else {
        const LeafFunction& w = leaf(*doc, "w");
        reports.push_back(suite == "prop1" ? verify_lerner(w, phi, p) : verify_thm3(w, phi, p));
      }
      reports.back().seed = seed;
    } else {
      SuiteOptions opt;
      opt.seed = seed;
      opt.trials = flags.count("trials", suite == "doob" ? 200 : 100);
      opt.max_depth = int(flags.count("depth", 6));
      if (opt.max_depth < 1 || opt.max_depth > 12) throw UsageError("--depth must lie in 1..12");
      opt.p_values = flags.list("p", opt.p_values);
      reports.push_back(suite == "prop1"  ? run_lerner_suite(opt)
                        : suite == "thm3" ? run_thm3_suite(opt)
                                          : run_doob_suite(opt));
    }
  } else if (suite == "prop2") {
    const Prop2Config cfg{single_p(flags, 2.0), flags.number("F", 2.0), flags.number("f", 1.0),
                          flags.number("h", 4.0 / 3.0), flags.number("z", 1.0)};
    reports.push_back(verify_prop2(cfg, flags.list("alphas", {0.1, 0.01, 0.001})));
    reports.back().seed = seed;
  } else {
    throw UsageError("unknown suite \"" + suite + "\"");
  }
  return reports;
}

int cmd_verify(const VerifyFlags& flags, const Globals& g, std::ostream& out) {
  std::vector<VerificationReport> reports;
  if (flags.suite == "all") {
    for (const char* s : {"thm1", "thm2", "prop1", "thm3", "prop2", "doob"}) {
      VerifyFlags own{s, {}};
      for (const std::string& key : kVerifyKeys) own.values[key] = "";
      for (const char* shared : {"trials", "depth"}) own.values[shared] = flags.text(shared);
      for (auto& r : run_suite(s, own, g.seed)) reports.push_back(std::move(r));
    }
  } else {
    reports = run_suite(flags.suite, flags, g.seed);
  }

  bool pass = true;
  for (const auto& r : reports) pass = pass && r.pass;
  if (g.format == "json") {
    Json doc{{"command", g.command_line}, {"pass", pass}, {"reports", Json::array()}};
    for (const auto& r : reports) doc["reports"].push_back(report_to_json(r));
    out << doc.dump(2) << '\n';
  } else {
    out << "# " << g.command_line << '\n';
    bool header = true;
    for (const auto& r : reports) {
      write_csv(out, r, header);
      header = false;
    }
  }
  return pass ? kExitOk : kExitViolation;
}

int cmd_table(const std::string& expr, const std::map<std::string, std::string>& params,
              const Globals& g, std::ostream& out) {
  std::vector<std::string> names;
  if (expr == "bellman") {
    names = {"p", "F", "f"};
  } else if (expr == "bellman_star") {
    names = {"p", "F", "f", "a", "c"};
  } else if (expr == "prop2_rhs") {
    names = {"p", "F", "f", "h", "z"};
  } else {
    throw UsageError("unknown expression \"" + expr + "\"");
  }
  std::vector<std::vector<double>> grids;
  for (const std::string& n : names) {
    if (params.at(n).empty()) throw UsageError("table --expr " + expr + " needs --" + n);
    grids.push_back(parse_grid(params.at(n), "--" + n));
  }

  auto evaluate = [&](const std::vector<double>& x) {
    if (expr == "bellman") return bellman_unweighted({x[0], x[1], x[2]});
    if (expr == "bellman_star") return bellman_star({{x[0], x[1], x[2]}, x[3], x[4]});
    return prop2_limit_rhs({x[0], x[1], x[2], x[3], x[4]});
  };

  Json rows = Json::array();
  const bool json = g.format == "json";
  if (!json) {
    for (const std::string& n : names) out << n << ',';
    out << "value,note\n";
  }
  std::vector<std::size_t> idx(names.size(), 0);
  for (;;) {
    std::vector<double> x(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) x[i] = grids[i][idx[i]];
    std::optional<double> value;
    std::string note;
    try {
      value = evaluate(x);
    } catch (const Error& e) {
      note = e.what();
    }
    if (json) {
      Json row = Json::object();
      for (std::size_t i = 0; i < names.size(); ++i) row[names[i]] = x[i];
      row["value"] = value ? Json(*value) : Json(nullptr);
      if (!note.empty()) row["note"] = note;
      rows.push_back(std::move(row));
    } else {
      for (double v : x) out << format_number(v) << ',';
      out << (value ? format_number(*value) : "NA") << ',';
      if (!note.empty()) out << '"' << note << '"';
      out << '\n';
    }
    // Odometer over the grids, last parameter fastest.
    std::size_t d = names.size();
    while (d > 0) {
      --d;
      if (++idx[d] < grids[d].size()) break;
      idx[d] = 0;
      if (d == 0) {
        d = names.size() + 1;
        break;
      }
    }
    if (d == names.size() + 1) break;
  }
  if (json) out << Json{{"expr", expr}, {"command", g.command_line}, {"rows", rows}}.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bellman functions of tree maximal operators: formulas, constructions, checks", "maxbell"};
  app.require_subcommand(1);
  app.fallthrough();
  // -h would collide with the --h parameter.
  app.set_help_flag("--help", "Print this help message and exit");

  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out_path, "Write output to PATH instead of standard output");
  app.add_option("--seed", g.seed, "Random seed");

  double p = 0.0, y = 0.0, F = 0.0, f = 0.0, a = 0.0, c = 0.0, k = 0.0, b = 0.0;

  CLI::App* omega = app.add_subcommand("omega", "Inverse of H_p on [1, p/(p-1)]");
  omega->add_option("--p", p)->required();
  omega->add_option("--y", y)->required();

  CLI::App* bellman = app.add_subcommand("bellman", "Unweighted or A_p* weighted Bellman function");
  bellman->add_option("--p", p)->required();
  bellman->add_option("--F", F)->required();
  bellman->add_option("--f", f)->required();
  CLI::Option* opt_a = bellman->add_option("--a", a);
  CLI::Option* opt_c = bellman->add_option("--c", c);
  opt_a->needs(opt_c);
  opt_c->needs(opt_a);

  CLI::App* constants = app.add_subcommand("constants", "A_p* constants of the weight k t^b");
  constants->add_option("--k", k)->required();
  constants->add_option("--b", b)->required();
  constants->add_option("--p", p)->required();

  VerifyFlags vflags;
  CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", vflags.suite)
      ->required()
      ->check(CLI::IsMember({"thm1", "thm2", "prop1", "thm3", "prop2", "doob", "all"}));
  for (const std::string& key : kVerifyKeys) {
    vflags.values[key] = "";
    verify->add_option("--" + key, vflags.values[key]);
  }

  std::string expr;
  std::map<std::string, std::string> table_params;
  CLI::App* table = app.add_subcommand("table", "Formula values on a parameter grid (param=lo:hi:n)");
  table->add_option("--expr", expr)->required()->check(CLI::IsMember({"bellman", "bellman_star", "prop2_rhs"}));
  for (const char* key : {"p", "F", "f", "a", "c", "h", "z"}) {
    table_params[key] = "";
    table->add_option(std::string("--") + key, table_params[key]);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  g.command_line = "maxbell";
  for (const std::string& s : args) g.command_line += " " + s;

  std::unique_ptr<std::ofstream> file;
  std::ostream* sink = &out;
  if (!g.out_path.empty()) {
    file = std::make_unique<std::ofstream>(g.out_path);
    if (!*file) {
      err << "error: cannot write " << g.out_path << '\n';
      return kExitUsage;
    }
    sink = file.get();
  }

  try {
    if (omega->parsed()) {
      const double v = omega_p(p, y);
      emit_fields(*sink, g, {{"p", p}, {"y", y}, {"omega", v}}, format_number(v));
    } else if (bellman->parsed()) {
      const bool weighted = opt_a->count() > 0;
      const double v = weighted ? bellman_star({{p, F, f}, a, c}) : bellman_unweighted({p, F, f});
      std::vector<std::pair<std::string, double>> fields{{"p", p}, {"F", F}, {"f", f}};
      if (weighted) {
        fields.emplace_back("a", a);
        fields.emplace_back("c", c);
      }
      fields.emplace_back("value", v);
      emit_fields(*sink, g, fields, format_number(v));
    } else if (constants->parsed()) {
      const ApStarConstants ac = power_weight_constants({k, b, p});
      emit_fields(*sink, g, {{"k", k}, {"b", b}, {"p", p}, {"a", ac.a}, {"c", ac.c}},
                  "a=" + format_number(ac.a) + " c=" + format_number(ac.c));
    } else if (verify->parsed()) {
      return cmd_verify(vflags, g, *sink);
    } else if (table->parsed()) {
      return cmd_table(expr, table_params, g, *sink);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace maxbell
