#include "bko/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include <CLI11.hpp>

#include "bko/bv.hpp"
#include "bko/errors.hpp"
#include "bko/moments.hpp"
#include "bko/operator.hpp"
#include "bko/report.hpp"
#include "bko/selftest.hpp"
#include "bko/suite.hpp"

namespace bko::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <typename T>
T parse_number(const std::string& text, const char* what) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw ConfigError(std::string("bad ") + what + " '" + text + "'");
  return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(item, what));
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

// Evaluates fn(0..count-1) on a thread pool. Results keep index order and the
// lowest-index exception is rethrown, so output does not depend on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct Common {
  std::string config;
  double tail_tol = 1e-14;
  long max_terms = 0;
  std::string grid;
  std::string out;
  std::string format = "csv";

  TruncationPolicy policy() const {
    TruncationPolicy p;
    p.tail_mass_tol = tail_tol;
    if (max_terms < 0) throw ConfigError("--max-terms must be >= 0");
    if (max_terms > 0) p.max_terms = static_cast<std::size_t>(max_terms);
    p.validate();
    return p;
  }
  std::optional<GridSpec> grid_spec() const {
    if (grid.empty()) return std::nullopt;
    return parse_grid(grid);
  }
  nlohmann::json to_json() const {
    nlohmann::json j = {{"tail_tol", tail_tol}, {"max_terms", max_terms}};
    j["grid"] = grid.empty() ? nlohmann::json(nullptr) : nlohmann::json(grid);
    return j;
  }
};

struct Context {
  const Common& common;
  const FunctionCatalog& catalog;
  TruncationPolicy policy;
};

std::vector<double> nodes_or(const Context& ctx, const std::string& list) {
  if (auto g = ctx.common.grid_spec()) {
    const Eigen::ArrayXd v = g->nodes();
    return {v.data(), v.data() + v.size()};
  }
  return parse_double_list(list);
}

std::vector<const FunctionSpec*> functions(const Context& ctx, const std::string& list) {
  std::vector<const FunctionSpec*> out;
  for (const auto& id : parse_string_list(list)) out.push_back(&ctx.catalog.get(id));
  return out;
}

void check_params(const std::vector<long>& ns, const std::vector<double>& as) {
  for (long n : ns)
    for (double a : as) OperatorParams{n, a}.validate();
}

nlohmann::json with_common(nlohmann::json j, const Common& c) {
  j.update(c.to_json());
  return j;
}

// --- eval

struct EvalCmd {
  std::string f = "exp_neg";
  std::string n = "64";
  std::string a = "1";
  std::string x = "1";
  std::string op = "kantorovich";

  void add(CLI::App* s) {
    s->add_option("--f", f, "function ids, comma separated")->capture_default_str();
    s->add_option("--n", n, "n values")->capture_default_str();
    s->add_option("--a", a, "a values")->capture_default_str();
    s->add_option("--x", x, "x values (replaced by --grid)")->capture_default_str();
    s->add_option("--operator", op, "kantorovich | baskakov | auxiliary")->capture_default_str();
  }

  Report run(const Context& ctx) const {
    if (op != "kantorovich" && op != "baskakov" && op != "auxiliary")
      throw ConfigError("unknown operator '" + op + "' (kantorovich, baskakov, auxiliary)");
    const auto fs = functions(ctx, f);
    const auto ns = parse_long_list(n);
    const auto as = parse_double_list(a);
    const auto xs = nodes_or(ctx, x);
    check_params(ns, as);

    std::vector<std::tuple<const FunctionSpec*, long, double, double>> jobs;
    for (auto* fn : fs)
      for (long nv : ns)
        for (double av : as)
          for (double xv : xs) jobs.emplace_back(fn, nv, av, xv);

    using Row = std::vector<Cell>;
    const auto rows = parallel_map<Row>(jobs.size(), [&](std::size_t i) {
      const auto& [fn, nv, av, xv] = jobs[i];
      const OperatorParams p{nv, av};
      OperatorValue v = op == "baskakov" ? baskakov_eval(*fn, p, xv, ctx.policy) : kantorovich_eval(*fn, p, xv, ctx.policy);
      if (op == "auxiliary") v.value = auxiliary_eval(*fn, p, xv, ctx.policy);
      const double fx = (*fn)(xv);
      return Row{fn->id, nv, av, xv, v.value, fx, v.value - fx, v.tail_mass, static_cast<long>(v.terms)};
    });

    Report r;
    r.command = "eval";
    r.config = with_common({{"f", parse_string_list(f)}, {"n", ns}, {"a", as}, {"x", xs}, {"operator", op}}, ctx.common);
    r.rows = Table({"f", "operator", "n", "a", "x", "value", "f_x", "error", "tail_mass", "terms"});
    for (auto row : rows) {
      row.insert(row.begin() + 1, op);
      r.rows.add_row(std::move(row));
    }
    return r;
  }
};

// --- moments

struct MomentsCmd {
  std::string family = "T";
  std::string n = "4";
  std::string a = "1";
  unsigned rmax = 2;

  void add(CLI::App* s) {
    s->add_option("--family", family, "upsilon | mu | mu_star | T | u")->capture_default_str();
    s->add_option("--n", n, "n as an exact rational")->capture_default_str();
    s->add_option("--a", a, "a as an exact rational")->capture_default_str();
    s->add_option("--rmax", rmax, "highest order")->capture_default_str();
  }

  Report run(const Context& ctx) const {
    const MomentFamily fam = parse_family(family);
    ExactParams p{parse_rational(n), parse_rational(a)};
    if (p.n <= 0) throw ConfigError("moments: n must be > 0");
    if (p.a < 0) throw ConfigError("moments: a must be >= 0");
    const MomentTable table = moment_table(fam, rmax, p);

    Report r;
    r.command = "moments";
    r.config = with_common({{"family", std::string(to_string(fam))},
                            {"n", to_string(p.n)},
                            {"a", to_string(p.a)},
                            {"rmax", rmax}},
                           ctx.common);
    if (ctx.common.format == "json") {
      r.json_rows = table.to_json()["entries"];
      return r;
    }
    const GridSpec grid = ctx.common.grid_spec().value_or(GridSpec{0.0, 4.0, 9, Spacing::uniform});
    grid.validate();
    const Eigen::ArrayXd xs = grid.nodes();
    r.rows = Table({"family", "n", "a", "r", "x", "value"});
    for (unsigned k = 0; k <= rmax; ++k)
      for (double x : xs)
        r.rows.add_row({std::string(to_string(fam)), to_string(p.n), to_string(p.a), static_cast<long>(k), x,
                        table[k].evaluate_exact(x)});
    return r;
  }
};

// --- converge

struct ConvergeCmd {
  std::string f = "exp_neg";
  std::string a = "1";
  std::string n = "64,128,256,512,1024";

  void add(CLI::App* s) {
    s->add_option("--f", f, "function ids")->capture_default_str();
    s->add_option("--a", a, "a values")->capture_default_str();
    s->add_option("--n", n, "n values (at least 3)")->capture_default_str();
  }

  Report run(const Context& ctx) const {
    const auto fs = functions(ctx, f);
    const auto ns = parse_long_list(n);
    const auto as = parse_double_list(a);
    check_params(ns, as);
    const GridSpec grid = ctx.common.grid_spec().value_or(GridSpec{0.0, 4.0, 41, Spacing::uniform});
    grid.validate();

    Report r;
    r.command = "converge";
    r.config = with_common({{"f", parse_string_list(f)}, {"n", ns}, {"a", as},
                            {"sup_grid", {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"points", grid.points},
                                          {"log", grid.spacing == Spacing::log}}}},
                           ctx.common);
    r.rows = Table({"f", "a", "n", "sup_error", "exponent", "constant", "residual"});
    for (auto* fn : fs)
      for (double av : as) {
        const auto errors = parallel_map<double>(
            ns.size(), [&](std::size_t i) { return sup_error(*fn, {ns[i], av}, grid, ctx.policy); });
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < ns.size(); ++i) pts.emplace_back(static_cast<double>(ns[i]), errors[i]);
        const RateFit fit = rate_fit(pts);
        for (std::size_t i = 0; i < ns.size(); ++i)
          r.rows.add_row({fn->id, av, ns[i], errors[i], fit.exponent, fit.constant, fit.residual});
      }
    return r;
  }
};

// --- voronovskaja

struct VoronovskajaCmd {
  std::string f = "t2";
  std::string a = "1";
  std::string x = "1";
  int r = 0;
  std::string n = "64,128,256,512,1024,2048,4096";

  void add(CLI::App* s) {
    s->add_option("--f", f, "function ids")->capture_default_str();
    s->add_option("--a", a, "a values")->capture_default_str();
    s->add_option("--x", x, "x values (replaced by --grid)")->capture_default_str();
    s->add_option("--r", r, "derivative order, 0 or 1")->capture_default_str();
    s->add_option("--n", n, "n values")->capture_default_str();
  }

  Report run(const Context& ctx) const {
    if (r != 0 && r != 1) throw ConfigError("voronovskaja: --r must be 0 or 1");
    const auto fs = functions(ctx, f);
    const auto ns = parse_long_list(n);
    const auto as = parse_double_list(a);
    const auto xs = nodes_or(ctx, x);
    check_params(ns, as);

    std::vector<std::tuple<const FunctionSpec*, double, double>> jobs;
    for (auto* fn : fs)
      for (double av : as)
        for (double xv : xs) jobs.emplace_back(fn, av, xv);
    const auto results = parallel_map<std::vector<VoronovskajaRow>>(jobs.size(), [&](std::size_t i) {
      const auto& [fn, av, xv] = jobs[i];
      return voronovskaja_check(*fn, av, xv, r, ns, ctx.policy);
    });

    Report rep;
    rep.command = "voronovskaja";
    rep.config = with_common({{"f", parse_string_list(f)}, {"n", ns}, {"a", as}, {"x", xs}, {"r", r}}, ctx.common);
    rep.rows = Table({"f", "a", "x", "r", "n", "scaled", "limit", "gap"});
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto& [fn, av, xv] = jobs[i];
      for (const auto& row : results[i])
        rep.rows.add_row({fn->id, av, xv, static_cast<long>(r), row.n, row.scaled, row.limit, row.gap()});
    }
    return rep;
  }
};

// --- bounds

struct BoundsCmd {
  std::string n;
  std::string a;
  std::string x;

  void add(CLI::App* s) {
    s->add_option("--n", n, "validation n values (default 16,64,256,1024)");
    s->add_option("--a", a, "validation a values (default 0,1,3)");
    s->add_option("--x", x, "validation x values (default 0.1,0.5,1,2,5,10; replaced by --grid)");
  }

  Report run(const Context& ctx) const {
    BoundSuiteConfig cfg;
    cfg.policy = ctx.policy;
    if (!n.empty()) cfg.validation.ns = parse_long_list(n);
    if (!a.empty()) cfg.validation.as = parse_double_list(a);
    if (ctx.common.grid_spec() || !x.empty()) cfg.validation.xs = nodes_or(ctx, x);
    check_params(cfg.validation.ns, cfg.validation.as);

    const BoundSuiteResult res = run_bound_suite(cfg, ctx.catalog);
    Report r;
    r.command = "bounds";
    nlohmann::json config = cfg.to_json();
    config["fitted"] = {{"C", res.constants.local_direct}, {"M1", res.constants.weighted}};
    r.config = with_common(std::move(config), ctx.common);
    r.rows = res.table();
    r.violations = res.violations();
    return r;
  }
};

// --- stat

struct StatCmd {
  std::string i = "1,2";
  double a = 1.0;
  double eps = 0.01;
  long kmax = 0;
  double rho = 2.0;

  void add(CLI::App* s) {
    s->add_option("--i", i, "test functions e_i, i in {1, 2}")->capture_default_str();
    s->add_option("--a", a, "a")->capture_default_str();
    s->add_option("--eps", eps, "epsilon")->capture_default_str();
    s->add_option("--kmax", kmax, "last k (0: twice the majorant threshold plus 100)")->capture_default_str();
    s->add_option("--rho", rho, "weight exponent, rho(x) = 1 + x^rho")->capture_default_str();
  }

  Report run(const Context& ctx) const {
    const auto is = parse_long_list(i);
    for (long v : is)
      if (v != 1 && v != 2) throw ConfigError("stat: --i accepts 1 and 2");
    OperatorParams{1, a}.validate();
    if (!(eps > 0.0)) throw ConfigError("stat: --eps must be > 0");
    if (kmax < 0) throw ConfigError("stat: --kmax must be >= 0");
    WeightedNormSpec spec;
    spec.rho_exponent = rho;
    if (auto g = ctx.common.grid_spec()) spec.x_max_trunc = g->x_max;
    spec.validate();

    Report r;
    r.command = "stat";
    r.config = with_common({{"i", is}, {"a", a}, {"eps", eps}, {"kmax", kmax}, {"rho", rho},
                            {"x_max_trunc", spec.x_max_trunc}},
                           ctx.common);
    r.rows = Table({"i", "k", "b", "majorant", "density", "exceeds", "threshold", "violated"});
    for (long iv : is) {
      const int e = static_cast<int>(iv);
      const long threshold = majorant_threshold(e, a, eps);
      const long last = kmax > 0 ? kmax : 2 * threshold + 100;
      const auto b = parallel_map<double>(static_cast<std::size_t>(last), [&](std::size_t k) {
        return weighted_moment_error_norm(e, {static_cast<long>(k) + 1, a}, spec).norm;
      });
      const auto density = stat_density(b, eps);
      for (long k = 1; k <= last; ++k) {
        const auto idx = static_cast<std::size_t>(k - 1);
        const BoundRecord rec{"stat", "t" + std::to_string(e), k, a, 0.0, b[idx], weighted_majorant(e, {k, a})};
        r.rows.add_row({iv, k, b[idx], rec.bound, density[idx], b[idx] >= eps, threshold, rec.violated()});
        if (rec.violated()) ++r.violations;
      }
    }
    return r;
  }
};

// --- bv

struct BvCmd {
  std::string f = "abs1,multikink,t1";
  std::string n = "256,1024,4096";
  std::string a = "0,1";
  std::string x = "0.5,1,2";
  double lambda = 2.0;

  void add(CLI::App* s) {
    s->add_option("--f", f, "function ids")->capture_default_str();
    s->add_option("--n", n, "n values")->capture_default_str();
    s->add_option("--a", a, "a values")->capture_default_str();
    s->add_option("--x", x, "x values (replaced by --grid)")->capture_default_str();
    s->add_option("--lambda", lambda, "lambda > 1")->capture_default_str();
  }

  Report run(const Context& ctx) const {
    const auto fs = functions(ctx, f);
    const auto ns = parse_long_list(n);
    const auto as = parse_double_list(a);
    const auto xs = nodes_or(ctx, x);
    check_params(ns, as);
    BVBoundParams{lambda, 1, 1.0}.validate();

    std::vector<std::tuple<const FunctionSpec*, long, double, double>> jobs;
    for (auto* fn : fs)
      for (double av : as)
        for (double xv : xs)
          for (long nv : ns) jobs.emplace_back(fn, nv, av, xv);

    using Row = std::vector<Cell>;
    const auto rows = parallel_map<Row>(jobs.size(), [&](std::size_t i) {
      const auto& [fn, nv, av, xv] = jobs[i];
      const OperatorParams p{nv, av};
      const long n0 = validity_threshold(av, xv, lambda);
      if (nv < n0) {
        const double lhs = std::fabs(kantorovich(*fn, p, xv, ctx.policy) - (*fn)(xv));
        return Row{fn->id, nv, av, xv, lambda, n0, "below_threshold", lhs, std::string(), std::string(),
                   std::string(), false};
      }
      const BVRecord rec = bv_check(*fn, p, BVBoundParams{lambda, nv, xv}, ctx.policy);
      return Row{fn->id, nv, av, xv, lambda, n0, "checked", rec.lhs, rec.bound_without_k0, rec.bound_with_k0,
                 rec.roundoff, rec.violated()};
    });

    Report r;
    r.command = "bv";
    r.config = with_common({{"f", parse_string_list(f)}, {"n", ns}, {"a", as}, {"x", xs}, {"lambda", lambda}},
                           ctx.common);
    r.rows = Table({"f", "n", "a", "x", "lambda", "n0", "status", "lhs", "bound_skip_k0", "bound_k0_2x",
                    "roundoff", "violated"});
    for (auto row : rows) {
      if (std::get<bool>(row.back())) ++r.violations;
      r.rows.add_row(std::move(row));
    }
    return r;
  }
};

// --- selftest

struct SelftestCmd {
  std::string only;

  void add(CLI::App* s) { s->add_option("--only", only, "criterion ids, comma separated (default all)"); }

  Report run(const Context& ctx, std::ostream& err) const {
    std::vector<int> ids;
    if (!only.empty())
      for (long v : parse_long_list(only)) ids.push_back(static_cast<int>(v));
    const auto results = run_acceptance(ids, [&err](const CriterionResult& c) { err << c.line() << '\n'; });

    Report r;
    r.command = "selftest";
    r.config = with_common({{"only", ids}}, ctx.common);
    r.rows = Table({"id", "title", "passed", "detail", "seconds", "budget_seconds"});
    for (const auto& c : results) {
      r.rows.add_row({static_cast<long>(c.id), c.title, c.passed, c.detail, c.seconds, c.budget_seconds});
      if (!c.passed) ++r.violations;
    }
    return r;
  }
};

// --- plot-script

struct PlotScriptCmd {
  std::string input;
  std::string xcol = "x";
  std::string ycols;
  std::string group;
  bool logx = false;
  bool logy = false;
  std::string image;

  void add(CLI::App* s) {
    s->add_option("--input", input, "CSV file produced by another subcommand")->required();
    s->add_option("--x-column", xcol, "column on the horizontal axis")->capture_default_str();
    s->add_option("--y-columns", ycols, "columns to plot, comma separated")->required();
    s->add_option("--group", group, "column whose values split the data into series");
    s->add_flag("--logx", logx, "logarithmic x axis");
    s->add_flag("--logy", logy, "logarithmic y axis");
    s->add_option("--image", image, "save to this file instead of showing a window");
  }

  static std::string py_str(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
      if (c == '\\' || c == '\'') out += '\\';
      out += c;
    }
    return out + "'";
  }

  std::string script(const Context& ctx) const {
    const auto ys = parse_string_list(ycols);
    std::ostringstream os;
    os << "#!/usr/bin/env python3\n"
       << "import csv\n"
       << "from collections import defaultdict\n\n"
       << "import matplotlib\n";
    if (!image.empty()) os << "matplotlib.use('Agg')\n";
    os << "import matplotlib.pyplot as plt\n\n"
       << "with open(" << py_str(input) << ", newline='') as fh:\n"
       << "    rows = list(csv.DictReader(fh))\n\n"
       << "series = defaultdict(list)\n"
       << "for row in rows:\n"
       << "    series[" << (group.empty() ? std::string("''") : "row[" + py_str(group) + "]") << "].append(row)\n\n"
       << "fig, ax = plt.subplots()\n"
       << "for key, part in series.items():\n"
       << "    xs = [float(r[" << py_str(xcol) << "]) for r in part]\n";
    os << "    for col in [";
    for (std::size_t k = 0; k < ys.size(); ++k) os << (k ? ", " : "") << py_str(ys[k]);
    os << "]:\n"
       << "        label = col if key == '' else col + ' (' + " << py_str(group) << " + '=' + key + ')'\n"
       << "        ax.plot(xs, [float(r[col]) for r in part], marker='.', label=label)\n"
       << "ax.set_xlabel(" << py_str(xcol) << ")\n";
    if (logx) os << "ax.set_xscale('log')\n";
    if (logy) os << "ax.set_yscale('log')\n";
    if (auto g = ctx.common.grid_spec()) os << "ax.set_xlim(" << format_cell(g->x_min) << ", " << format_cell(g->x_max) << ")\n";
    os << "ax.legend()\n"
       << "ax.grid(True, alpha=0.3)\n";
    if (image.empty())
      os << "plt.show()\n";
    else
      os << "fig.savefig(" << py_str(image) << ", dpi=150, bbox_inches='tight')\n";
    return os.str();
  }
};

}  // namespace

std::map<std::string, std::string> read_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const std::string key = eq == std::string::npos ? std::string() : trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return read_config(in);
}

GridSpec parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 && parts.size() != 4)
    throw ConfigError("bad grid '" + text + "' (x_min:x_max:points[:log])");
  GridSpec g;
  g.x_min = parse_number<double>(parts[0], "grid x_min");
  g.x_max = parse_number<double>(parts[1], "grid x_max");
  g.points = parse_number<int>(parts[2], "grid point count");
  if (parts.size() == 4) {
    if (parts[3] == "log")
      g.spacing = Spacing::log;
    else if (parts[3] != "uniform")
      throw ConfigError("bad grid spacing '" + parts[3] + "' (uniform, log)");
  }
  g.validate();
  return g;
}

std::vector<long> parse_long_list(const std::string& text) { return parse_list<long>(text, "integer"); }

std::vector<double> parse_double_list(const std::string& text) { return parse_list<double>(text, "number"); }

std::vector<std::string> parse_string_list(const std::string& text) {
  auto items = split(text, ',');
  if (items.empty() || std::any_of(items.begin(), items.end(), [](const auto& s) { return s.empty(); }))
    throw ConfigError("bad list '" + text + "'");
  return items;
}

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Baskakov-Kantorovich operators: evaluation, exact moments and bound checks", "bko"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  EvalCmd eval;
  MomentsCmd moments;
  ConvergeCmd converge;
  VoronovskajaCmd voronovskaja;
  BoundsCmd bounds;
  StatCmd stat;
  BvCmd bv;
  SelftestCmd selftest;
  PlotScriptCmd plot;

  auto sub = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", common.config, "key = value file; flags on the command line win");
    s->add_option("--tail-tol", common.tail_tol, "certified weight tail tolerance")->capture_default_str();
    s->add_option("--max-terms", common.max_terms, "weight row length limit (0: automatic)")->capture_default_str();
    s->add_option("--grid", common.grid, "x grid x_min:x_max:points[:log]");
    s->add_option("--out", common.out, "write the report here instead of stdout");
    s->add_option("--format", common.format, "csv | json")->capture_default_str();
    cmd.add(s);
  };
  sub("eval", "pointwise operator values", eval);
  sub("moments", "exact moment tables", moments);
  sub("converge", "sup errors and fitted rates", converge);
  sub("voronovskaja", "scaled errors against the asymptotic limit", voronovskaja);
  sub("bounds", "calibrated bound checks over a validation grid", bounds);
  sub("stat", "weighted errors of e_1, e_2 and their statistical density", stat);
  sub("bv", "bounded-variation rate sweep", bv);
  sub("selftest", "acceptance criteria", selftest);
  sub("plot-script", "print a matplotlib script for a CSV report", plot);

  try {
    std::vector<std::string> args = args_in;
    std::map<std::string, std::string> function_keys;
    if (!args.empty() && !args.front().starts_with("-")) {
      std::optional<std::string> path;
      for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].starts_with("--config=")) path = args[i].substr(9);
      }
      if (path) {
        std::vector<std::string> injected;
        for (const auto& [key, value] : read_config_file(*path)) {
          if (key.starts_with("function.")) {
            function_keys[key] = value;
            continue;
          }
          std::string flag = key;
          std::replace(flag.begin(), flag.end(), '_', '-');
          injected.push_back("--" + flag + "=" + value);
        }
        args.insert(args.begin() + 1, injected.begin(), injected.end());
      }
    }
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err) == 0 ? exit_ok : exit_config_error;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    FunctionCatalog catalog;
    catalog.add_from_config(function_keys);
    const Context ctx{common, catalog, common.policy()};
    const OutputFormat format = parse_format(common.format);
    if (auto g = common.grid_spec()) g->validate();

    auto emit = [&](const std::string& text) {
      if (common.out.empty()) {
        out << text;
        return;
      }
      std::ofstream f(common.out, std::ios::binary);
      if (!f) throw ConfigError("cannot write '" + common.out + "'");
      f << text;
    };

    if (name == "plot-script") {
      emit(plot.script(ctx));
      return exit_ok;
    }

    Report report;
    if (name == "eval") report = eval.run(ctx);
    else if (name == "moments") report = moments.run(ctx);
    else if (name == "converge") report = converge.run(ctx);
    else if (name == "voronovskaja") report = voronovskaja.run(ctx);
    else if (name == "bounds") report = bounds.run(ctx);
    else if (name == "stat") report = stat.run(ctx);
    else if (name == "bv") report = bv.run(ctx);
    else report = selftest.run(ctx, err);

    std::ostringstream os(std::ios::binary);
    write_report(report, format, os);
    emit(os.str());
    if (report.violations > 0) {
      err << name << ": " << report.violations << " violation(s)\n";
      return exit_bound_violation;
    }
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const TruncationFailure& e) {
    err << "numerical failure: " << e.what() << " (after " << e.terms() << " terms, tail bound "
        << format_cell(e.tail_bound()) << ")\n";
    return exit_numerical_failure;
  } catch (const BelowValidityThreshold& e) {
    err << "numerical failure: " << e.what() << " (needs n >= " << e.min_valid_n() << ")\n";
    return exit_numerical_failure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_numerical_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical_failure;
  }
}

}  // namespace bko::cli
