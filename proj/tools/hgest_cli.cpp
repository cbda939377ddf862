#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hgest/hgest.hpp"

using json = nlohmann::ordered_json;
using namespace hgest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitIo = 3;
constexpr int kExitRte = 4;

struct Globals {
  std::uint64_t seed = 1;
  std::string profile = "fast";
  std::size_t threads = 1;
  std::string out;
};

// JSON-lines sink: --out file or stdout.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw IoError("cannot open output file '" + path + "'");
    }
  }
  void line(const json& j) { os() << j.dump() << "\n"; }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open output file '" + path + "'");
  return f;
}

HgFile load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  return read_hg(in, path);
}

std::optional<std::vector<VertexSet>> classes_of(const HgFile& f) {
  if (!f.part_sizes) return std::nullopt;
  return consecutive_classes(*f.part_sizes);
}

Rational parse_rational(const std::string& s, const std::string& what) {
  try {
    return Rational::parse(s);
  } catch (const std::exception& e) {
    throw PreconditionError("cannot parse " + what + " '" + s + "': " + e.what());
  }
}

json opt_num(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

std::string power_str(const PowerOfT& p) { return "2^" + std::to_string(p.two) + "*t^" + p.texp.str(); }

void write_ledger(const std::string& path, const OracleSession& s) {
  auto f = open_out(path);
  f << "index,kind,size,charge,answer\n";
  const auto& recs = s.records();
  for (std::size_t i = 0; i < recs.size(); ++i)
    f << i << "," << to_string(recs[i].kind) << "," << recs[i].size << "," << fmt_num(recs[i].charge) << ","
      << (recs[i].answer ? 1 : 0) << "\n";
}

json estimate_json(const std::string& cmd, const Estimate& e, const Globals& g) {
  json j;
  j["command"] = cmd;
  j["estimate"] = opt_num(e.value);
  j["rte"] = e.rte();
  j["cost"] = e.cost;
  j["queries"] = e.queries;
  j["halted_i"] = e.halted_i;
  j["exhaustive"] = e.exhaustive;
  j["profile"] = g.profile;
  j["seed"] = g.seed;
  j["stream"] = e.stream;
  return j;
}

// ---------------------------------------------------------------------------
// Family parameters shared by gen and lb-experiment

struct FamilyOpts {
  std::string family = "er";
  std::size_t n = 64, k = 2, m = 0, r = 1, t = 1024;
  double p = 0.3, alpha = 0;
  std::string eps = "1/2";
  std::vector<std::size_t> sizes, roots;
  std::optional<double> p1, p2;
  double c_root = 240, c_sqrt = 1e4;
  bool relaxed = false;
  std::optional<std::int64_t> beta, B;
  std::int64_t c5 = 5;

  void add(CLI::App* sc) {
    sc->add_option("--family", family, "er, er-m, er-partite, star, planted-core, uncol-lb, col-lb")->required();
    sc->add_option("--n", n, "vertex count");
    sc->add_option("--k", k, "edge size");
    sc->add_option("--p", p, "edge probability");
    sc->add_option("--m", m, "edge count (er-m, star)");
    sc->add_option("--sizes", sizes, "class sizes (er-partite, planted-core)")->delimiter(',');
    sc->add_option("--roots", roots, "rooted vertices per class (planted-core)")->delimiter(',');
    sc->add_option("--r", r, "root size (uncol-lb)");
    sc->add_option("--eps", eps, "gap parameter (uncol-lb)");
    sc->add_option("--p1", p1, "override p1 (uncol-lb)");
    sc->add_option("--p2", p2, "override p2 (uncol-lb)");
    sc->add_option("--c-root", c_root, "root constant in p2 (uncol-lb)");
    sc->add_option("--c-sqrt", c_sqrt, "constant in sqrt(n)/c >= k (uncol-lb)");
    sc->add_flag("--relaxed", relaxed, "proceed when the uncol-lb hypotheses fail");
    sc->add_option("--t", t, "class size (col-lb)");
    sc->add_option("--alpha", alpha, "cost index (col-lb)");
    sc->add_option("--beta", beta, "grid resolution override (col-lb)");
    sc->add_option("--B", B, "grid bound override (col-lb)");
    sc->add_option("--c5", c5, "log2 of the Q scaling constant (col-lb)");
  }

  FamilySpec spec() const { return FamilySpec{family, n, k, p, m, sizes, roots}; }

  UncolPairOverrides uncol_over() const {
    UncolPairOverrides o;
    o.p1 = p1;
    o.p2 = p2;
    o.c_root = c_root;
    o.c_sqrt = c_sqrt;
    o.relaxed = relaxed;
    return o;
  }

  ColPairOverrides col_over() const {
    ColPairOverrides o;
    o.beta = beta;
    o.B = B;
    o.c5 = c5;
    return o;
  }
};

json uncol_params_json(const UncolPairParams& p) {
  return json{{"n", p.n}, {"k", p.k}, {"r", p.r}, {"eps", p.eps.str()}, {"p1", p.p1}, {"p2", p.p2},
              {"c_root", p.over.c_root}, {"c_sqrt", p.over.c_sqrt}, {"relaxed", p.over.relaxed},
              {"hypotheses_hold", p.hypotheses_hold}, {"hypothesis_note", p.hypothesis_note}};
}

json col_params_json(const ColPairParams& p) {
  return json{{"t", p.t}, {"k", p.k}, {"alpha", p.alpha}, {"m", p.m}, {"p", power_str(p.p)}, {"x", power_str(p.x)},
              {"beta", p.beta}, {"B", p.B}, {"c5", p.c5}, {"beta_formula", p.beta_formula},
              {"B_formula", p.B_formula}, {"relaxed", true}, {"hypotheses_hold", p.hypotheses_hold}};
}

std::string strip_hg(const std::string& path) {
  if (path.size() > 3 && path.compare(path.size() - 3, 3, ".hg") == 0) return path.substr(0, path.size() - 3);
  return path;
}

int cmd_gen(const Globals& g, const FamilyOpts& f, const std::string& out) {
  if (out.empty()) throw PreconditionError("gen: --out is required");
  RngStream rng(g.seed);
  json rec{{"command", "gen"}, {"family", f.family}, {"seed", g.seed}};
  if (f.family == "uncol-lb" || f.family == "col-lb") {
    const std::string base = strip_hg(out);
    json meta{{"family", f.family}, {"seed", g.seed}, {"stream", rng.stream_id()}};
    auto emit = [&](const Hypergraph& h, const std::optional<std::vector<std::size_t>>& parts, const std::string& p) {
      auto os = open_out(p);
      write_hg(os, h, parts);
    };
    if (f.family == "uncol-lb") {
      UncolPair pair = gen_uncol_pair(f.n, f.k, f.r, parse_rational(f.eps, "eps"), rng, f.uncol_over());
      emit(pair.g1, std::nullopt, base + ".1.hg");
      emit(pair.g2, std::nullopt, base + ".2.hg");
      meta["params"] = uncol_params_json(pair.params);
      meta["roots"] = pair.roots;
      meta["m1"] = pair.g1.m();
      meta["m2"] = pair.g2.m();
    } else {
      ColPair pair = gen_col_pair(f.t, f.k, f.alpha, rng, f.col_over());
      const std::vector<std::size_t> parts(f.k, f.t);
      emit(pair.g1.base, parts, base + ".1.hg");
      emit(pair.g2.base, parts, base + ".2.hg");
      meta["params"] = col_params_json(pair.params);
      meta["j"] = pair.j;
      json q = json::array();
      for (const auto& x : pair.Q) q.push_back({{"exact", power_str(x)}, {"value", x.value(f.t)}});
      meta["Q"] = q;
      meta["roots"] = pair.roots;
      std::vector<std::size_t> xs;
      for (const auto& x : pair.X) xs.push_back(x.size());
      meta["X_sizes"] = xs;
      meta["m1"] = pair.g1.base.m();
      meta["m2"] = pair.g2.base.m();
    }
    auto mf = open_out(base + ".meta.json");
    mf << meta.dump(2) << "\n";
    rec["outputs"] = {base + ".1.hg", base + ".2.hg", base + ".meta.json"};
    rec["m1"] = meta["m1"];
    rec["m2"] = meta["m2"];
  } else {
    Instance inst = make_instance(f.spec(), rng);
    std::optional<std::vector<std::size_t>> parts;
    if (inst.classes) {
      parts.emplace();
      for (const auto& c : *inst.classes) parts->push_back(c.size());
    }
    auto os = open_out(out);
    write_hg(os, inst.g, parts);
    rec["outputs"] = {out};
    rec["n"] = inst.g.n();
    rec["k"] = inst.g.k();
    rec["m"] = inst.g.m();
  }
  Sink(g.out).line(rec);
  return kExitOk;
}

int cmd_exact(const Globals& g, const std::string& input) {
  HgFile f = load_graph(input);
  json rec{{"command", "exact"}, {"input", input}, {"n", f.graph.n()}, {"k", f.graph.k()}, {"edges", f.graph.m()}};
  if (auto cls = classes_of(f)) rec["colourful"] = colourful_edge_count(f.graph, *cls);
  Sink(g.out).line(rec);
  return kExitOk;
}

struct CountOpts {
  std::string input, eps = "1/2", delta = "1/10", ledger;
  double alpha = 0;
  bool verify = false, approx = false;
};

int cmd_count_uncol(const Globals& g, const CountOpts& c) {
  HgFile f = load_graph(c.input);
  OracleSession s(f.graph, CostModel::power(c.alpha), OracleKind::indora);
  s.keep_records(!c.ledger.empty());
  RngStream rng(g.seed);
  UncolParams up;
  up.profile = parse_profile(g.profile);
  const Rational eps = parse_rational(c.eps, "eps");
  const double delta = parse_rational(c.delta, "delta").to_double();
  Estimate e;
  if (c.approx) {
    e = uncol_approx(s, eps, rng, up);
  } else {
    UncolBoostParams bp;
    bp.inner = up;
    e = uncol(s, eps, delta, rng, bp);
  }
  json rec = estimate_json("count-uncol", e, g);
  rec["eps"] = eps.str();
  rec["delta"] = c.delta;
  rec["alpha"] = c.alpha;
  if (c.verify) rec["exact"] = f.graph.m();
  if (!c.ledger.empty()) write_ledger(c.ledger, s);
  Sink(g.out).line(rec);
  return e.rte() ? kExitRte : kExitOk;
}

int cmd_count_col(const Globals& g, const CountOpts& c) {
  HgFile f = load_graph(c.input);
  auto cls = classes_of(f);
  OracleSession s(f.graph, CostModel::power(c.alpha), OracleKind::cindora);
  s.keep_records(!c.ledger.empty());
  RngStream rng(g.seed);
  ColParams cp;
  cp.profile = parse_profile(g.profile);
  const Rational eps = parse_rational(c.eps, "eps");
  const double delta = parse_rational(c.delta, "delta").to_double();
  FineDetail d;
  Estimate e = fine_count(s, eps, delta, rng, cp, cls, &d);
  json rec = estimate_json("count-col", e, g);
  rec["eps"] = eps.str();
  rec["delta"] = c.delta;
  rec["alpha"] = c.alpha;
  rec["target"] = cls ? "colourful" : "all";
  rec["coarse"] = d.coarse;
  rec["b"] = d.b;
  rec["p"] = d.p;
  rec["draws"] = d.draws;
  if (c.verify) rec["exact"] = cls ? colourful_edge_count(f.graph, *cls) : f.graph.m();
  if (!c.ledger.empty()) write_ledger(c.ledger, s);
  Sink(g.out).line(rec);
  return e.rte() ? kExitRte : kExitOk;
}

struct CoarseOpts {
  CountOpts base;
  std::optional<ClassMask> force_I;
  std::optional<std::string> zeta;
  std::optional<std::size_t> small_t;
};

int cmd_coarse_col(const Globals& g, const CoarseOpts& c) {
  HgFile f = load_graph(c.base.input);
  auto cls = classes_of(f);
  if (!cls) throw PreconditionError("coarse-col: input must be partitioned (a 'P t1 .. tk' line)");
  OracleSession s(f.graph, CostModel::power(c.base.alpha), OracleKind::cindora);
  s.keep_records(!c.base.ledger.empty());
  RngStream rng(g.seed);
  ColParams cp;
  cp.profile = parse_profile(g.profile);
  const double delta = parse_rational(c.base.delta, "delta").to_double();
  json rec{{"command", "coarse-col"}};
  double value = 0;
  if (c.force_I) {
    require(*c.force_I < (ClassMask{1} << f.graph.k()), "coarse-col: --force-I has bits beyond k");
    rec["I"] = *c.force_I;
    if (c.zeta) {
      const Rational z = parse_rational(*c.zeta, "zeta");
      value = coarse_large_core(s, *cls, *c.force_I, z, delta, rng, cp);
      rec["core"] = "large";
      rec["zeta"] = z.str();
      rec["b"] = large_core_b(f.graph.k(), mask_size(*c.force_I), log2_inv(z), log2_exact(next_pow2(s.n())), cp);
    } else {
      const std::size_t t = c.small_t ? *c.small_t : coarse_setup(s, cp).t;
      value = coarse_small_core(s, *cls, *c.force_I, t, delta, rng, cp);
      rec["core"] = "small";
      rec["t"] = t;
      rec["b"] = small_core_b(f.graph.k());
    }
  } else {
    CoarseResult r = colour_coarse(s, *cls, rng, cp);
    value = r.value;
    rec["core"] = "dispatch";
    rec["brute_force"] = r.brute_force;
    rec["t"] = r.setup.t;
    rec["alpha_prime"] = r.setup.alpha_prime;
    rec["log2_inv_zeta"] = r.setup.log2_inv_zeta;
    rec["b"] = colour_coarse_b(f.graph.k(), r.setup, cp);
  }
  auto t = s.total();
  rec["estimate"] = value;
  rec["cost"] = t.cost;
  rec["queries"] = t.queries;
  rec["profile"] = g.profile;
  rec["seed"] = g.seed;
  rec["stream"] = rng.stream_id();
  if (c.base.verify) rec["exact"] = colourful_edge_count(f.graph, *cls);
  if (!c.base.ledger.empty()) write_ledger(c.base.ledger, s);
  Sink(g.out).line(rec);
  return kExitOk;
}

int cmd_gtable(const Globals& g, std::int64_t k, const std::string& step_s) {
  require(k >= 1, "gtable: k must be positive");
  const Rational step = parse_rational(step_s, "beta-step");
  require(step > Rational(0), "gtable: beta-step must be positive");
  Sink sink(g.out);
  sink.os() << "k,beta,g\n";
  for (Rational b(0); b <= Rational(k); b = b + step) {
    const Rational v = g_exponent(k, b);
    sink.os() << k << "," << b.str() << "," << v.str() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// lb-experiment strategies

// Script lines: "[count] indora <i>", "[count] indora-all", "[count] cindora <i_1> .. <i_k>".
// Returns the number of yes answers.
struct ScriptOp {
  std::size_t count = 1;
  std::string op;
  std::vector<unsigned> args;
};

std::vector<ScriptOp> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open script '" + path + "'");
  std::vector<ScriptOp> ops;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    ScriptOp op;
    std::size_t pos = 0;
    try {
      if (std::isdigit(static_cast<unsigned char>(tok[0][0]))) op.count = std::stoull(tok[pos++]);
      if (pos >= tok.size()) throw std::invalid_argument("missing operation");
      op.op = tok[pos++];
      if (op.op != "indora" && op.op != "indora-all" && op.op != "cindora")
        throw std::invalid_argument("unknown operation '" + op.op + "'");
      for (; pos < tok.size(); ++pos) op.args.push_back(static_cast<unsigned>(std::stoul(tok[pos])));
    } catch (const std::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (op.op == "indora" && op.args.size() != 1) throw IoError(path + ":" + std::to_string(lineno) + ": indora takes one exponent");
    ops.push_back(op);
  }
  return ops;
}

Strategy script_strategy(std::vector<ScriptOp> ops, std::optional<std::vector<VertexSet>> classes) {
  return [ops = std::move(ops), classes](OracleSession& s, RngStream& rng) -> std::optional<double> {
    double yes = 0;
    std::uint64_t idx = 0;
    for (const auto& op : ops) {
      for (std::size_t c = 0; c < op.count; ++c) {
        RngStream r = rng.child(idx++);
        if (op.op == "indora-all") {
          VertexSet all = full_set(s.real_n());
          yes += s.indora(all);
        } else if (op.op == "indora") {
          VertexSet q = sample_subset(s.real_n(), op.args[0], r);
          yes += s.indora(q);
        } else {
          require(op.args.size() == s.k(), "script: cindora needs k exponents");
          RngStream pr = r.child(0);
          std::vector<VertexSet> cls = classes ? *classes : uniform_k_partition(full_set(s.real_n()), s.k(), pr);
          RngStream sr = r.child(1);
          for (std::size_t i = 0; i < cls.size(); ++i) {
            RngStream ir = sr.child(i);
            cls[i] = subset_pow2(cls[i], op.args[i], ir);
          }
          yes += s.cindora(cls);
        }
      }
    }
    return yes;
  };
}

struct LbOpts {
  FamilyOpts fam;
  std::string strategy = "null", script, csv, alg_eps = "1/2", alg_delta = "1/10";
  std::size_t trials = 20;
  double cost_alpha = 0;
};

int cmd_lb(const Globals& g, const LbOpts& o) {
  const auto& f = o.fam;
  const bool col = f.family == "col-lb";
  if (!col && f.family != "uncol-lb") throw PreconditionError("lb-experiment: --family must be uncol-lb or col-lb");
  const Profile prof = parse_profile(g.profile);
  const Rational aeps = parse_rational(o.alg_eps, "algorithm eps");
  const double adelta = parse_rational(o.alg_delta, "algorithm delta").to_double();
  std::optional<std::vector<VertexSet>> classes;
  if (col) classes = consecutive_classes(std::vector<std::size_t>(f.k, f.t));

  Strategy strat;
  OracleKind kind = OracleKind::indora;
  if (o.strategy == "null") {
    strat = [](OracleSession&, RngStream&) -> std::optional<double> { return 0.0; };
    kind = col ? OracleKind::cindora : OracleKind::indora;
  } else if (o.strategy == "full") {
    kind = col ? OracleKind::cindora : OracleKind::indora;
    strat = [classes](OracleSession& s, RngStream&) -> std::optional<double> {
      if (classes) return s.cindora(*classes) ? 1.0 : 0.0;
      VertexSet all = full_set(s.real_n());
      return s.indora(all) ? 1.0 : 0.0;
    };
  } else if (o.strategy == "uncol") {
    strat = [=](OracleSession& s, RngStream& r) -> std::optional<double> {
      UncolBoostParams bp;
      bp.inner.profile = prof;
      return uncol(s, aeps, adelta, r, bp).value;
    };
  } else if (o.strategy == "count-col") {
    kind = OracleKind::cindora;
    strat = [=](OracleSession& s, RngStream& r) -> std::optional<double> {
      ColParams cp;
      cp.profile = prof;
      return fine_count(s, aeps, adelta, r, cp, classes).value;
    };
  } else if (o.strategy == "coarse-col") {
    if (!col) throw PreconditionError("lb-experiment: coarse-col needs the col-lb family");
    kind = OracleKind::cindora;
    strat = [=](OracleSession& s, RngStream& r) -> std::optional<double> {
      ColParams cp;
      cp.profile = prof;
      return colour_coarse(s, *classes, r, cp).value;
    };
  } else if (o.strategy == "custom-script") {
    if (o.script.empty()) throw PreconditionError("lb-experiment: custom-script needs --script");
    auto ops = load_script(o.script);
    bool has_c = false, has_i = false;
    for (const auto& op : ops) (op.op == "cindora" ? has_c : has_i) = true;
    if (has_c && has_i) throw PreconditionError("lb-experiment: a script may not mix indora and cindora operations");
    kind = has_c ? OracleKind::cindora : OracleKind::indora;
    strat = script_strategy(std::move(ops), classes);
  } else {
    throw PreconditionError("lb-experiment: unknown strategy '" + o.strategy + "'");
  }

  RngStream rng(g.seed);
  const CostModel model = CostModel::power(o.cost_alpha);
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  bool hyp = false;
  DistinguishReport rep;
  if (col) {
    auto over = f.col_over();
    rep = distinguish_experiment(
        strat,
        [&](RngStream& r) {
          ColPair p = gen_col_pair(f.t, f.k, f.alpha, r, over);
          sizes.push_back({p.g1.base.m(), p.g2.base.m()});
          hyp = p.params.hypotheses_hold;
          return p;
        },
        kind, model, o.trials, rng);
  } else {
    auto over = f.uncol_over();
    const Rational eps = parse_rational(f.eps, "eps");
    rep = distinguish_experiment(
        strat,
        [&](RngStream& r) {
          UncolPair p = gen_uncol_pair(f.n, f.k, f.r, eps, r, over);
          sizes.push_back({p.g1.m(), p.g2.m()});
          hyp = p.params.hypotheses_hold;
          return p;
        },
        kind, model, o.trials, rng);
  }
  std::size_t rte = 0;
  for (const auto& t : rep.trials) rte += !t.out1 || !t.out2;
  if (!o.csv.empty()) {
    auto os = open_out(o.csv);
    os << "trial,distinguished,out1,out2,cost_g1,queries_g1,audit_violations,e1,e2\n";
    auto cell = [](std::optional<double> v) { return v ? fmt_num(*v) : std::string("RTE"); };
    for (std::size_t i = 0; i < rep.trials.size(); ++i) {
      const auto& t = rep.trials[i];
      os << i << "," << (t.distinguished ? 1 : 0) << "," << cell(t.out1) << "," << cell(t.out2) << ","
         << fmt_num(t.cost_g1) << "," << t.queries_g1 << "," << t.audit_violations << "," << sizes[i].first << ","
         << sizes[i].second << "\n";
    }
  }
  json rec{{"command", "lb-experiment"}, {"family", f.family}, {"strategy", o.strategy},
           {"oracle", to_string(kind)}, {"trials", o.trials}, {"rate", rep.rate},
           {"median_cost", rep.median_cost}, {"audit_violations", rep.audit_violations},
           {"rte_runs", rte}, {"hypotheses_hold", hyp}, {"relaxed", col || f.relaxed},
           {"profile", g.profile}, {"seed", g.seed}};
  Sink(g.out).line(rec);
  return 2 * rte > o.trials ? kExitRte : kExitOk;
}

// ---------------------------------------------------------------------------
// Benchmarks

int cmd_scaling(const Globals& g, ScalingConfig cfg, unsigned lo, unsigned hi, const std::string& csv,
                const std::string& gp) {
  require(lo >= 1 && lo <= hi && hi <= 30, "scaling: need 1 <= --log-n-min <= --log-n-max <= 30");
  for (unsigned e = lo; e <= hi; ++e) cfg.ns.push_back(std::size_t{1} << e);
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.profile = parse_profile(g.profile);
  ScalingResult r = run_cost_scaling(cfg);
  if (!csv.empty()) {
    auto os = open_out(csv);
    write_csv(os, r.records);
  }
  if (!gp.empty()) {
    auto os = open_out(gp);
    write_gnuplot(os, r);
  }
  Sink sink(g.out);
  for (const auto& [a, pts] : r.medians) {
    json med = json::array();
    for (const auto& [n, c] : pts) med.push_back({{"n", n}, {"median_cost", c}});
    Rational ar = Rational::parse(fmt_num(a));
    json rec{{"command", "scaling"}, {"k", cfg.k}, {"alpha", a}, {"medians", med},
             {"slope", opt_num(r.slopes.at(a))},
             {"reference", a + g_exponent(static_cast<std::int64_t>(cfg.k), ar).to_double()},
             {"profile", g.profile}, {"seed", g.seed}};
    sink.line(rec);
  }
  return kExitOk;
}

std::vector<FamilySpec> load_families(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  std::vector<FamilySpec> out;
  for (const auto& f : j.value("families", json::array())) {
    FamilySpec s;
    s.name = f.value("family", s.name);
    s.n = f.value("n", s.n);
    s.k = f.value("k", s.k);
    s.p = f.value("p", s.p);
    s.m = f.value("m", s.m);
    s.sizes = f.value("sizes", s.sizes);
    s.roots = f.value("roots", s.roots);
    out.push_back(s);
  }
  return out;
}

struct AccOpts {
  FamilyOpts fam;
  std::string config, csv, estimator = "uncol-approx", eps = "1/2", delta = "1/10";
  std::size_t trials = 20;
  double alpha = 0;
  bool have_family = false;
};

int cmd_accuracy(const Globals& g, const AccOpts& o) {
  AccuracyConfig cfg;
  if (!o.config.empty()) cfg.families = load_families(o.config);
  if (o.have_family) cfg.families.push_back(o.fam.spec());
  cfg.estimator = parse_estimator(o.estimator);
  cfg.eps = parse_rational(o.eps, "eps");
  cfg.delta = parse_rational(o.delta, "delta").to_double();
  cfg.trials = o.trials;
  cfg.profile = parse_profile(g.profile);
  cfg.alpha = o.alpha;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  auto rows = run_accuracy_suite(cfg);
  if (!o.csv.empty()) {
    auto os = open_out(o.csv);
    write_csv(os, rows);
  }
  std::size_t ok = 0, rte = 0;
  for (const auto& r : rows) {
    ok += r.within_eps;
    rte += !r.estimate;
  }
  json rec{{"command", "accuracy"}, {"estimator", o.estimator}, {"runs", rows.size()},
           {"success_rate", rows.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(rows.size())},
           {"rte_runs", rte}, {"profile", g.profile}, {"seed", g.seed}};
  Sink(g.out).line(rec);
  return 2 * rte > rows.size() && !rows.empty() ? kExitRte : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hgest: edge estimation with cost-accounted independence oracles"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "root seed")->capture_default_str();
  app.add_option("--profile", g.profile, "theory or fast")->check(CLI::IsMember({"theory", "fast"}))->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for trial fan-out")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output path (JSON lines; the graph file for gen)");

  std::function<int()> run;

  FamilyOpts gen_f;
  auto* gen = app.add_subcommand("gen", "generate a hypergraph or a lower-bound pair");
  gen_f.add(gen);
  gen->callback([&] { run = [&] { return cmd_gen(Globals{g.seed, g.profile, g.threads, ""}, gen_f, g.out); }; });

  std::string exact_in;
  auto* ex = app.add_subcommand("exact", "exact edge count (and colourful count for partitioned input)");
  ex->add_option("--input", exact_in)->required();
  ex->callback([&] { run = [&] { return cmd_exact(g, exact_in); }; });

  CountOpts cu;
  auto* cun = app.add_subcommand("count-uncol", "estimate e(G) with indora queries");
  auto add_count = [](CLI::App* sc, CountOpts& c) {
    sc->add_option("--input", c.input)->required();
    sc->add_option("--eps", c.eps, "approximation parameter")->capture_default_str();
    sc->add_option("--delta", c.delta, "failure probability")->capture_default_str();
    sc->add_option("--alpha", c.alpha, "cost index: a query on x vertices costs x^alpha")->capture_default_str();
    sc->add_flag("--verify", c.verify, "also report the exact count");
    sc->add_option("--ledger", c.ledger, "write the per-query ledger as CSV");
  };
  add_count(cun, cu);
  cun->add_flag("--approx", cu.approx, "single unboosted run");
  cun->callback([&] { run = [&] { return cmd_count_uncol(g, cu); }; });

  CountOpts cc;
  auto* ccol = app.add_subcommand("count-col", "estimate e(G) (or the colourful count) with cindora queries");
  add_count(ccol, cc);
  ccol->callback([&] { run = [&] { return cmd_count_col(g, cc); }; });

  CoarseOpts co;
  std::string force_I_s;
  auto* cco = app.add_subcommand("coarse-col", "coarse colourful count of a partitioned input");
  add_count(cco, co.base);
  cco->add_option("--force-I", force_I_s, "class bitmask I; skips the dispatcher");
  cco->add_option("--zeta", co.zeta, "root threshold p/q (large core with --force-I)");
  cco->add_option("--small-t", co.small_t, "block size t (small core with --force-I)");
  cco->callback([&] {
    run = [&] {
      if (!force_I_s.empty()) {
        try {
          co.force_I = static_cast<ClassMask>(std::stoul(force_I_s, nullptr, 0));
        } catch (const std::exception&) {
          throw PreconditionError("cannot parse --force-I '" + force_I_s + "'");
        }
      }
      return cmd_coarse_col(g, co);
    };
  });

  std::int64_t gt_k = 2;
  std::string gt_step = "1/2";
  auto* gt = app.add_subcommand("gtable", "CSV of the overhead exponent g(k,beta)");
  gt->add_option("--k", gt_k)->required();
  gt->add_option("--beta-step", gt_step)->capture_default_str();
  gt->callback([&] { run = [&] { return cmd_gtable(g, gt_k, gt_step); }; });

  LbOpts lb;
  auto* lbe = app.add_subcommand("lb-experiment", "distinguishing game on lower-bound pairs");
  lb.fam.add(lbe);
  lbe->add_option("--strategy", lb.strategy)
      ->check(CLI::IsMember({"null", "full", "uncol", "count-col", "coarse-col", "custom-script"}))
      ->capture_default_str();
  lbe->add_option("--script", lb.script, "strategy script for custom-script");
  lbe->add_option("--trials", lb.trials)->capture_default_str();
  lbe->add_option("--csv", lb.csv, "per-trial CSV");
  lbe->add_option("--alg-eps", lb.alg_eps, "eps passed to the estimating strategies")->capture_default_str();
  lbe->add_option("--alg-delta", lb.alg_delta, "delta passed to the estimating strategies")->capture_default_str();
  lbe->add_option("--cost-alpha", lb.cost_alpha, "cost index of the oracle")->capture_default_str();
  lbe->callback([&] { run = [&] { return cmd_lb(g, lb); }; });

  ScalingConfig sc_cfg;
  unsigned sc_lo = 6, sc_hi = 11;
  std::string sc_eps = "1/2", sc_csv, sc_gp;
  auto* sca = app.add_subcommand("scaling", "median oracle cost versus n");
  sca->add_option("--k", sc_cfg.k)->capture_default_str();
  sca->add_option("--alphas", sc_cfg.alphas, "cost indices")->delimiter(',');
  sca->add_option("--log-n-min", sc_lo)->capture_default_str();
  sca->add_option("--log-n-max", sc_hi)->capture_default_str();
  sca->add_option("--trials", sc_cfg.trials)->capture_default_str();
  sca->add_option("--eps", sc_eps)->capture_default_str();
  sca->add_option("--density", sc_cfg.density, "edges per vertex")->capture_default_str();
  sca->add_option("--csv", sc_csv, "per-trial CSV");
  sca->add_option("--gnuplot", sc_gp, "two-column n/median export");
  sca->callback([&] {
    run = [&] {
      sc_cfg.eps = parse_rational(sc_eps, "eps");
      return cmd_scaling(g, sc_cfg, sc_lo, sc_hi, sc_csv, sc_gp);
    };
  });

  AccOpts acc;
  auto* ac = app.add_subcommand("accuracy", "accuracy suite against exact counts");
  ac->add_option("--config", acc.config, "JSON file with a 'families' list");
  ac->add_option("--family", acc.fam.family, "er, er-m, er-partite, star, planted-core, empty");
  ac->add_option("--n", acc.fam.n);
  ac->add_option("--k", acc.fam.k);
  ac->add_option("--p", acc.fam.p);
  ac->add_option("--m", acc.fam.m);
  ac->add_option("--sizes", acc.fam.sizes)->delimiter(',');
  ac->add_option("--roots", acc.fam.roots)->delimiter(',');
  ac->add_option("--estimator", acc.estimator, "uncol-approx, uncol or fine")->capture_default_str();
  ac->add_option("--eps", acc.eps)->capture_default_str();
  ac->add_option("--delta", acc.delta)->capture_default_str();
  ac->add_option("--trials", acc.trials)->capture_default_str();
  ac->add_option("--alpha", acc.alpha)->capture_default_str();
  ac->add_option("--csv", acc.csv);
  ac->callback([&] {
    acc.have_family = ac->count("--family") > 0;
    run = [&] { return cmd_accuracy(g, acc); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }
  try {
    return run();
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ResourceExceeded& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitRte;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
