#include "cqrl_cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "cqrl/channels.hpp"
#include "cqrl/cq_state.hpp"
#include "cqrl/mcsim.hpp"
#include "cqrl/regions.hpp"
#include "cqrl/scalar.hpp"
#include "cqrl/tiltlab.hpp"
#include "cqrl/tolerances.hpp"
#include "cqrl_cli/acceptance.hpp"

#ifndef CQRL_VERSION
#define CQRL_VERSION "unknown"
#endif

namespace cqrl::cli {

using nlohmann::json;
namespace rg = cqrl::regions;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
      return kParse;
    case ErrorKind::BudgetExceeded:
      return kBudget;
    default:
      return kConfig;
  }
}

double parse_angle(const std::string& s) {
  std::string body = s;
  bool deg = false;
  if (body.rfind("deg:", 0) == 0) {
    deg = true;
    body = body.substr(4);
  }
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(body, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "bad angle '" + s + "'");
  }
  if (used != body.size()) throw Error(ErrorKind::ParseError, "bad angle '" + s + "'");
  return deg ? v * std::numbers::pi / 180.0 : v;
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw Error(ErrorKind::ParseError, "empty register name in query");
    out.push_back(item);
  }
  return out;
}

}  // namespace

Query parse_query(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.size() < 4 || (s[0] != 'H' && s[0] != 'I') || s[1] != '(' || s.back() != ')')
    throw Error(ErrorKind::ParseError, "query must look like H(A,B|C) or I(A;B|C): '" + raw + "'");
  Query q;
  q.kind = s[0];
  std::string body = s.substr(2, s.size() - 3);
  std::string cond;
  if (const auto bar = body.find('|'); bar != std::string::npos) {
    cond = body.substr(bar + 1);
    body = body.substr(0, bar);
    q.c = split_names(cond);
  }
  if (q.kind == 'H') {
    if (body.find(';') != std::string::npos) throw Error(ErrorKind::ParseError, "entropy query takes one argument list");
    q.a = split_names(body);
  } else {
    const auto semi = body.find(';');
    if (semi == std::string::npos) throw Error(ErrorKind::ParseError, "information query needs 'A;B'");
    q.a = split_names(body.substr(0, semi));
    q.b = split_names(body.substr(semi + 1));
  }
  return q;
}

// ---------------------------------------------------------------------------
// Examples

namespace {

constexpr double kBackoff = 1e-6;

rg::Thm1Config binary_thm1_config(double tau) {
  rg::Thm1Config c;
  c.field = 2;
  c.p_x1 = Pmf({1 - tau, tau});
  c.p_u2 = Pmf::uniform(2);
  c.p_u3 = Pmf::uniform(2);
  c.f2 = {0, 1};
  c.f3 = {0, 1};
  return c;
}

json rates_json(const rg::Rates& r) { return json::array({r[0], r[1], r[2]}); }

json report_json(const rg::RegionReport& r) {
  json j;
  rg::to_json(j, r);
  return j;
}

}  // namespace

json example_ex1(double delta1, double delta2, double delta3, double tau) {
  const auto ch = channels::build_ex1(delta1, delta2, delta3, tau);
  json j;
  j["example"] = "ex1";
  j["params"] = {{"delta1", delta1}, {"delta2", delta2}, {"delta3", delta3}, {"tau", tau}};
  std::array<double, 3> caps{};
  for (int u = 0; u < 3; ++u) caps[static_cast<size_t>(u)] = channels::user_capacity_cost(ch, u, ch.tau()[static_cast<size_t>(u)]).capacity;
  const double c1 = channels::user_capacity_cost(ch, 0, channels::unconstrained).capacity;
  const double tt = std::min(tau, 0.5);
  j["cost_capacity"] = caps;
  j["cost_capacity_closed_form"] = {binary_entropy(binary_convolve(tt, delta1)) - binary_entropy(delta1), 1 - binary_entropy(delta2),
                                    1 - binary_entropy(delta3)};
  j["c1_unconstrained"] = c1;
  j["eq1_holds"] = channels::condition_eq1(caps, c1);
  const auto th = mcsim::ex1_thresholds({delta1, delta2, delta3}, tau);
  j["sim_thresholds"] = {{"r1", th.r1}, {"r1_plus_rj", th.sum}, {"rj", th.rj}};
  const auto ce = channels::classical_equivalent(ch);
  if (const auto* c = std::get_if<channels::ClassicalIC>(&ce)) j["classical_equivalent"] = channels::classical_to_json(*c);
  const rg::Rates rates = {caps[0] - kBackoff, caps[1] - kBackoff, caps[2] - kBackoff};
  const auto rep = rg::thm1_check(ch, binary_thm1_config(tt), rates);
  j["thm1"] = {{"rates", rates_json(rates)}, {"feasible", rep.feasible}, {"report", report_json(rep)}};
  return j;
}

json example_ex2(const Ex2Params& p) {
  const auto ch = channels::build_ex2(p.phi, p.delta2, p.delta3, p.tau);
  const auto cf = channels::ex2_closed_form(p.phi, p.delta2, p.delta3, p.tau);
  json j;
  j["example"] = "ex2";
  j["params"] = {{"phi", p.phi}, {"delta2", p.delta2}, {"delta3", p.delta3}, {"tau", p.tau}};
  std::array<double, 3> caps{};
  for (int u = 0; u < 3; ++u) caps[static_cast<size_t>(u)] = channels::user_capacity_cost(ch, u, ch.tau()[static_cast<size_t>(u)]).capacity;
  const double c1 = channels::user_capacity_cost(ch, 0, channels::unconstrained).capacity;
  j["cost_capacity"] = caps;
  j["cost_capacity_closed_form"] = cf.cost_capacity;
  j["c1_unconstrained"] = c1;
  j["c1_closed_form"] = cf.c1;
  const auto& C = cf.cost_capacity;
  const bool eq1 = channels::condition_eq1(C, cf.c1);
  const bool gap = cf.c1 > C[0] + std::max(C[1], C[2]) + tolerances().rate;
  j["eq1_holds"] = eq1;
  j["c1_exceeds_sum"] = gap;
  const rg::Rates rates = {C[0] - kBackoff, C[1] - kBackoff, C[2] - kBackoff};
  const auto rep = rg::thm1_check(ch, binary_thm1_config(std::min(p.tau, 0.5)), rates);
  j["thm1"] = {{"rates", rates_json(rates)}, {"feasible", rep.feasible}, {"report", report_json(rep)}};
  bool unstructured_short = false;
  if (p.scan) {
    rg::GridSpec g;
    g.denominator = p.denominator;
    g.max_aux = p.max_aux;
    g.threads = p.threads;
    const auto sr = rg::max_r1_scan(ch, rg::EvaluatorKind::Unstructured, rates[1], rates[2], g);
    j["unstructured_scan"] = rg::to_json(sr);
    unstructured_short = !sr.found || sr.max_r1 <= C[0] - 1e-3;
    j["unstructured_gap"] = sr.found ? C[0] - sr.max_r1 : C[0];
  }
  std::string verdict;
  if (!eq1 || !gap) verdict = "separation conditions fail";
  else if (!rep.feasible) verdict = "coset bound does not certify the capacity point";
  else if (!p.scan) verdict = "separation conditions hold (unstructured scan skipped)";
  else verdict = unstructured_short ? "separation demonstrated" : "unstructured scan reaches the capacity point";
  j["verdict"] = verdict;
  return j;
}

json example_ex3(double phi, double delta2, double delta3, double tau1, double tau2, double tau3) {
  const auto ch = channels::build_ex3(phi, delta2, delta3, tau1, tau2, tau3);
  const auto cf = channels::ex3_closed_form(phi, delta2, delta3, tau1, tau2, tau3);
  json j;
  j["example"] = "ex3";
  j["params"] = {{"phi", phi}, {"delta2", delta2}, {"delta3", delta3}, {"tau1", tau1}, {"tau2", tau2}, {"tau3", tau3}};
  std::array<double, 3> caps{};
  for (int u = 0; u < 3; ++u) caps[static_cast<size_t>(u)] = channels::user_capacity_cost(ch, u, ch.tau()[static_cast<size_t>(u)]).capacity;
  j["cost_capacity"] = caps;
  j["cost_capacity_closed_form"] = cf.cost_capacity;
  j["c1_closed_form"] = cf.c1;
  const auto& C = cf.cost_capacity;
  j["eq1_holds"] = channels::condition_eq1(C, cf.c1);
  const double theta = channels::ex3_theta(phi, tau1, tau2, tau3);
  const double sum = C[0] + C[1] + C[2];
  j["theta"] = theta;
  j["theta_renamed"] = channels::ex3_theta_renamed(phi, tau1, tau2, tau3);
  j["capacity_sum"] = sum;
  // Ternary coset layers carrying binary inputs: p_U(2) = 0, f(u) = min(u, 1).
  rg::Thm1Config cfg;
  cfg.field = 3;
  cfg.p_x1 = Pmf({1 - std::min(tau1, 0.5), std::min(tau1, 0.5)});
  cfg.p_u2 = Pmf({1 - std::min(tau2, 0.5), std::min(tau2, 0.5), 0.0});
  cfg.p_u3 = Pmf({1 - std::min(tau3, 0.5), std::min(tau3, 0.5), 0.0});
  cfg.f2 = {0, 1, 1};
  cfg.f3 = {0, 1, 1};
  const rg::Rates rates = {C[0] - kBackoff, C[1] - kBackoff, C[2] - kBackoff};
  const auto rep = rg::thm1_check(ch, cfg, rates);
  j["thm1"] = {{"rates", rates_json(rates)}, {"feasible", rep.feasible}, {"report", report_json(rep)}};
  j["verdict"] = sum < theta ? "coset sufficiency condition holds" : "coset sufficiency condition fails";
  return j;
}

// ---------------------------------------------------------------------------

namespace {

// A path, or inline JSON when the argument starts with '{'.
json read_json_file(const std::string& path) {
  if (!path.empty() && path.front() == '{') {
    try {
      return json::parse(path);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::ParseError, std::string("inline JSON: ") + e.what());
    }
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

struct ChannelArgs {
  std::string file;
  std::string example;
  std::string phi = "1.2";
  double delta1 = 0.1, delta2 = 0.15, delta3 = 0.15;
  double tau = 0.125;
  double tau1 = 0.125, tau2 = 0.25, tau3 = 0.25;

  void add(CLI::App* app) {
    auto* f = app->add_option("--channel", file, "ChannelSpec JSON file");
    auto* e = app->add_option("--example", example, "Built-in channel instead of a file")->check(CLI::IsMember({"ex1", "ex2", "ex3"}));
    f->excludes(e);
    app->add_option("--phi", phi, "Angle φ (radians, or deg:<value>)");
    app->add_option("--delta1", delta1, "Crossover δ₁ (ex1)");
    app->add_option("--delta2", delta2, "Crossover δ₂");
    app->add_option("--delta3", delta3, "Crossover δ₃");
    app->add_option("--tau", tau, "Cost budget of user 1 (ex1, ex2)");
    app->add_option("--tau1", tau1, "Cost budget τ₁ (ex3)");
    app->add_option("--tau2", tau2, "Cost budget τ₂ (ex3)");
    app->add_option("--tau3", tau3, "Cost budget τ₃ (ex3)");
  }

  channels::ChannelSpec build() const {
    if (!file.empty()) return channels::channel_from_json(read_json_file(file));
    if (example == "ex1") return channels::build_ex1(delta1, delta2, delta3, tau);
    if (example == "ex2") return channels::build_ex2(parse_angle(phi), delta2, delta3, tau);
    if (example == "ex3") return channels::build_ex3(parse_angle(phi), delta2, delta3, tau1, tau2, tau3);
    throw Error(ErrorKind::ConfigMismatch, "give --channel or --example");
  }
};

// Classical registers X1..X3 with a product pmf; quantum register Y (joint
// output) or Y1/Y2/Y3 (one receiver).
CqState channel_state(const channels::ChannelSpec& ch, const json& pmf, const std::string& qname) {
  std::array<std::vector<double>, 3> p;
  try {
    for (int u = 0; u < 3; ++u) p[static_cast<size_t>(u)] = Pmf(pmf.at("x" + std::to_string(u + 1)).get<std::vector<double>>()).probs;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("pmf file: ") + e.what());
  }
  for (int u = 0; u < 3; ++u)
    if (static_cast<int>(p[static_cast<size_t>(u)].size()) != ch.inputs()[static_cast<size_t>(u)])
      throw Error(ErrorKind::ConfigMismatch, "pmf size differs from the input alphabet of user " + std::to_string(u + 1));
  int rx = -1;
  if (qname == "Y1") rx = 0;
  else if (qname == "Y2") rx = 1;
  else if (qname == "Y3") rx = 2;
  const auto& d = ch.output_dims();
  const int dim = rx < 0 ? d[0] * d[1] * d[2] : d[static_cast<size_t>(rx)];
  CqState s({{"X1", ch.inputs()[0]}, {"X2", ch.inputs()[1]}, {"X3", ch.inputs()[2]}}, dim, qname);
  for (int a = 0; a < ch.inputs()[0]; ++a)
    for (int b = 0; b < ch.inputs()[1]; ++b)
      for (int c = 0; c < ch.inputs()[2]; ++c) {
        const double w = p[0][static_cast<size_t>(a)] * p[1][static_cast<size_t>(b)] * p[2][static_cast<size_t>(c)];
        if (w <= 0) continue;
        const int op = s.add_operator_unchecked(rx < 0 ? ch.state(a, b, c) : ch.marginal(rx, a, b, c));
        s.add_point({a, b, c}, w, op);
      }
  return s;
}

// {"registers": [{"name", "alphabet"}], "quantum": {"name", "dim"},
//  "points": [{"x": [...], "p": ..., "matrix_re": [...], "matrix_im": [...]}]}
CqState state_from_json(const json& j) {
  try {
    std::vector<Register> regs;
    for (const auto& r : j.at("registers")) regs.push_back({r.at("name").get<std::string>(), r.at("alphabet").get<int>()});
    const int dim = j.at("quantum").at("dim").get<int>();
    const std::string qn = j.at("quantum").value("name", "Y");
    if (dim < 1) throw Error(ErrorKind::ConfigMismatch, "quantum dimension must be positive");
    CqState s(regs, dim, qn);
    for (const auto& pt : j.at("points")) {
      auto x = pt.at("x").get<std::vector<int>>();
      auto re = pt.at("matrix_re").get<std::vector<double>>();
      auto im = pt.contains("matrix_im") ? pt.at("matrix_im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
      if (re.size() != static_cast<size_t>(dim) * dim || im.size() != re.size())
        throw Error(ErrorKind::ConfigMismatch, "matrix entry count differs from the quantum dimension");
      if (x.size() != regs.size()) throw Error(ErrorKind::ConfigMismatch, "tuple length differs from the register count");
      for (size_t r = 0; r < x.size(); ++r)
        if (x[r] < 0 || x[r] >= regs[r].alphabet) throw Error(ErrorKind::ConfigMismatch, "tuple entry outside its alphabet");
      Mat m(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = cplx(re[static_cast<size_t>(r * dim + c)], im[static_cast<size_t>(r * dim + c)]);
      s.add_point(x, pt.at("p").get<double>(), s.add_operator(m));
    }
    if (std::abs(s.total_mass() - 1.0) > tolerances().prob) throw Error(ErrorKind::ConfigMismatch, "point masses do not sum to 1");
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("state file: ") + e.what());
  }
}

EntropyQuery to_entropy_query(const std::vector<std::string>& names, const std::string& qname) {
  EntropyQuery q;
  for (const auto& n : names) {
    if (n == qname) q.include_quantum = true;
    else q.classical.push_back(n);
  }
  return q;
}

EntropyQuery merge(EntropyQuery a, const EntropyQuery& b) {
  a.classical.insert(a.classical.end(), b.classical.begin(), b.classical.end());
  a.include_quantum = a.include_quantum || b.include_quantum;
  return a;
}

double evaluate_query(const CqState& s, const Query& q) {
  const auto& qn = s.quantum_name();
  const auto a = to_entropy_query(q.a, qn), c = to_entropy_query(q.c, qn);
  for (const auto& n : q.a)
    if (n != qn) s.register_index(n);
  if (q.kind == 'H') return s.entropy(merge(a, c)) - s.entropy(c);
  const auto b = to_entropy_query(q.b, qn);
  return conditional_mutual_info(s, a, b, c);
}

std::string quantum_name_of(const std::vector<Query>& qs) {
  std::string found;
  for (const auto& q : qs)
    for (const auto* list : {&q.a, &q.b, &q.c})
      for (const auto& n : *list)
        if (n == "Y" || n == "Y1" || n == "Y2" || n == "Y3") {
          if (!found.empty() && found != n) throw Error(ErrorKind::ConfigMismatch, "queries mix several output registers");
          found = n;
        }
  return found.empty() ? "Y" : found;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    try {
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad number '" + item + "'");
    }
    if (used != item.size()) throw Error(ErrorKind::ParseError, "bad number '" + item + "'");
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json option_values(const CLI::App* app) {
  json params = json::object();
  for (const auto* opt : app->get_options()) {
    const std::string name = opt->get_name();
    if (name.empty() || name == "--help" || name == "-h") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1) params[name] = res[0];
      else params[name] = res;
    } else {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

struct Output {
  std::string path;
  std::ostream* stream = nullptr;
  std::unique_ptr<std::ofstream> file;

  void open(std::ostream& fallback) {
    if (path.empty()) {
      stream = &fallback;
      return;
    }
    file = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file) throw Error(ErrorKind::ConfigMismatch, "cannot write '" + path + "'");
    stream = file.get();
  }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cqrl: classical-quantum interference channel rate-region toolkit"};
  app.name(args.empty() ? "cqrl" : args[0]);
  app.set_version_flag("--version", CQRL_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::string output_path, manifest_path;
  int threads = 1;
  std::optional<uint64_t> seed;

  auto common = [&](CLI::App* s) {
    s->add_option("--output,-o", output_path, "Write the result here instead of stdout");
    s->add_option("--manifest", manifest_path, "Run manifest path (default <output>.manifest.json, else stderr)");
  };

  // info
  auto* info = app.add_subcommand("info", "Entropies and informations of a channel or CQ state");
  ChannelArgs info_ch;
  std::string pmf_file, state_file;
  std::vector<std::string> queries;
  info_ch.add(info);
  info->add_option("--pmf", pmf_file, "Input pmf JSON file or inline {\"x1\": [...], \"x2\": [...], \"x3\": [...]}");
  info->add_option("--state", state_file, "CQ state JSON (registers, quantum, points)");
  info->add_option("--query,-q", queries, "H(A,B|C), I(A;B) or I(A;B|C)")->required();
  common(info);

  // example
  auto* example = app.add_subcommand("example", "Capacities, conditions and verdicts of ex1, ex2, ex3");
  std::string ex_name;
  ChannelArgs ex_ch;
  bool no_scan = false;
  int ex_den = 32, ex_aux = 4;
  example->add_option("name", ex_name, "ex1, ex2 or ex3")->required()->check(CLI::IsMember({"ex1", "ex2", "ex3"}));
  example->add_option("--phi", ex_ch.phi, "Angle φ (radians, or deg:<value>)");
  example->add_option("--delta1", ex_ch.delta1, "Crossover δ₁ (ex1)");
  example->add_option("--delta2", ex_ch.delta2, "Crossover δ₂");
  example->add_option("--delta3", ex_ch.delta3, "Crossover δ₃");
  example->add_option("--tau", ex_ch.tau, "Cost budget of user 1 (ex1, ex2)");
  example->add_option("--tau1", ex_ch.tau1, "Cost budget τ₁ (ex3)");
  example->add_option("--tau2", ex_ch.tau2, "Cost budget τ₂ (ex3)");
  example->add_option("--tau3", ex_ch.tau3, "Cost budget τ₃ (ex3)");
  example->add_flag("--no-scan", no_scan, "ex2: skip the unstructured R₁ scan");
  example->add_option("--denominator", ex_den, "ex2: scan grid denominator")->check(CLI::PositiveNumber);
  example->add_option("--max-aux", ex_aux, "ex2: auxiliary alphabet bound")->check(CLI::Range(1, 4));
  example->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  common(example);

  // region
  auto* region = app.add_subcommand("region", "Evaluate a rate triple or trace a boundary slice");
  ChannelArgs rg_ch;
  std::string config_file, format = "json";
  std::vector<double> rates;
  bool drop_dont_care = false, slice = false;
  double slice_r3 = 0.0, slice_tol = 1e-6;
  int rays = 32;
  rg_ch.add(region);
  region->add_option("--config", config_file, "Region configuration JSON (key \"evaluator\")")->required();
  region->add_option("--rates", rates, "R1,R2,R3")->delimiter(',')->expected(3);
  region->add_flag("--drop-dont-care", drop_dont_care, "Layered evaluators: drop the A = ∅ incoming-layer rows");
  region->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  region->add_flag("--slice", slice, "Trace the (R1, R2) boundary at fixed R3 instead");
  region->add_option("--r3", slice_r3, "Slice: fixed R3");
  region->add_option("--rays", rays, "Slice: number of rays")->check(CLI::PositiveNumber);
  region->add_option("--slice-tol", slice_tol, "Slice: bisection tolerance");
  common(region);

  // scan
  auto* scan = app.add_subcommand("scan", "Maximum R1 over a pmf grid at fixed (R2, R3)");
  ChannelArgs sc_ch;
  std::string evaluator = "unstructured";
  double r2 = 0.0, r3 = 0.0;
  rg::GridSpec grid;
  uint64_t scan_cap = grid.scan_cap;
  bool no_refine = false;
  sc_ch.add(scan);
  scan->add_option("--evaluator", evaluator, "unstructured or thm1")->check(CLI::IsMember({"unstructured", "thm1"}));
  scan->add_option("--r2", r2, "Fixed R2")->required();
  scan->add_option("--r3", r3, "Fixed R3")->required();
  scan->add_option("--denominator", grid.denominator, "Grid denominator")->check(CLI::PositiveNumber);
  scan->add_option("--max-aux", grid.max_aux, "Auxiliary alphabet bound (unstructured)");
  scan->add_option("--field", grid.field, "Field size (thm1)");
  scan->add_option("--scan-cap", scan_cap, "Maximum number of grid points");
  scan->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  scan->add_flag("--no-refine", no_refine, "Skip the refinement stage");
  common(scan);

  // sim
  auto* sim = app.add_subcommand("sim", "Monte Carlo block-error rates and soft-covering distances");
  std::string sim_target;
  std::vector<int> ns = {12};
  std::vector<int> ls, ks;
  std::vector<double> deltas = {0.01, 0.01, 0.01};
  double sim_tau = 0.2, backoff = 0.25;
  uint64_t trials = 10000;
  std::string decoder = "ml_joint", p_list = "0.8,0.2";
  int codes = 50, sc_n = 10, modulus = 2;
  sim->add_option("target", sim_target, "ex1 or soft-covering")->required()->check(CLI::IsMember({"ex1", "soft-covering"}));
  sim->add_option("--seed", seed, "Master seed (required)")->required();
  sim->add_option("--n", ns, "ex1: blocklengths")->delimiter(',');
  sim->add_option("--l", ls, "ex1: message dimensions l1,l2,l3 (default: from --backoff)")->delimiter(',')->expected(3);
  sim->add_option("--k", ks, "ex1: inner dimensions k1,k2,k3")->delimiter(',')->expected(3);
  sim->add_option("--delta", deltas, "ex1: crossovers d1,d2,d3")->delimiter(',')->expected(3);
  sim->add_option("--tau", sim_tau, "ex1: Bernoulli parameter of user 1's codebook");
  sim->add_option("--backoff", backoff, "ex1: fraction below the thresholds when --l is absent");
  sim->add_option("--trials", trials, "ex1: trials per blocklength")->check(CLI::PositiveNumber);
  sim->add_option("--decoder", decoder, "ex1: ml_joint or sum_coset")->check(CLI::IsMember({"ml_joint", "sum_coset"}));
  sim->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--p", p_list, "soft-covering: target pmf");
  sim->add_option("--codes", codes, "soft-covering: random codes averaged")->check(CLI::PositiveNumber);
  sim->add_option("--length", sc_n, "soft-covering: blocklength")->check(CLI::PositiveNumber);
  sim->add_option("--modulus", modulus, "soft-covering: field size");
  common(sim);

  // tiltlab
  auto* tilt = app.add_subcommand("tiltlab", "Tilting, smoothing, Hayashi-Nagaoka and square-root measurement checks");
  std::string suite;
  int cases = 150, max_dim = 16;
  std::vector<double> etas = {0.05, 0.1, 0.2};
  std::vector<int> sizes = {2, 4, 8, 16};
  std::string srm_phi = "deg:45";
  tilt->add_option("suite", suite, "closeness, hn, smoothing, smoothing4 or srm")
      ->required()
      ->check(CLI::IsMember({"closeness", "hn", "smoothing", "smoothing4", "srm"}));
  tilt->add_option("--seed", seed, "Master seed (required)")->required();
  tilt->add_option("--cases", cases, "closeness, hn: number of cases")->check(CLI::PositiveNumber);
  tilt->add_option("--eta", etas, "Tilting parameters (smoothing uses the first)")->delimiter(',');
  tilt->add_option("--sizes", sizes, "smoothing: auxiliary sizes")->delimiter(',');
  tilt->add_option("--max-dim", max_dim, "hn: largest dimension")->check(CLI::PositiveNumber);
  tilt->add_option("--phi", srm_phi, "srm: angle of the two-state ensemble");
  tilt->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  common(tilt);

  // verify
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  std::vector<int> only;
  verify->add_option("--only", only, "Criterion ids to run")->delimiter(',');
  verify->add_option("--threads", threads, "Worker threads for the data-parallel criteria")->check(CLI::PositiveNumber);
  common(verify);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  }

  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  CLI::App* sub = app.get_subcommands().front();
  Output result;
  result.path = output_path;
  int code = kOk;
  std::string error_message;

  try {
    result.open(out);
    std::ostream& os = *result.stream;
    const std::string name = sub->get_name();
    if (name == "info") {
      std::vector<Query> qs;
      for (const auto& q : queries) qs.push_back(parse_query(q));
      std::optional<CqState> state;
      if (!state_file.empty()) {
        state.emplace(state_from_json(read_json_file(state_file)));
      } else {
        if (pmf_file.empty()) throw Error(ErrorKind::ConfigMismatch, "info needs --state, or a channel with --pmf");
        state.emplace(channel_state(info_ch.build(), read_json_file(pmf_file), quantum_name_of(qs)));
      }
      json res = json::array();
      for (size_t i = 0; i < qs.size(); ++i) res.push_back({{"query", queries[i]}, {"value", evaluate_query(*state, qs[i])}});
      os << dump({{"queries", res}});
    } else if (name == "example") {
      json res;
      if (ex_name == "ex1") {
        res = example_ex1(ex_ch.delta1, ex_ch.delta2, ex_ch.delta3, ex_ch.tau);
      } else if (ex_name == "ex2") {
        Ex2Params p;
        p.phi = parse_angle(ex_ch.phi);
        p.delta2 = ex_ch.delta2;
        p.delta3 = ex_ch.delta3;
        p.tau = ex_ch.tau;
        p.scan = !no_scan;
        p.denominator = ex_den;
        p.max_aux = ex_aux;
        p.threads = threads;
        res = example_ex2(p);
      } else {
        res = example_ex3(parse_angle(ex_ch.phi), ex_ch.delta2, ex_ch.delta3, ex_ch.tau1, ex_ch.tau2, ex_ch.tau3);
      }
      os << dump(res);
    } else if (name == "region") {
      const auto ch = rg_ch.build();
      const auto cfg = rg::config_from_json(read_json_file(config_file));
      rg::LayeredOptions opt;
      opt.drop_dont_care = drop_dont_care;
      if (slice) {
        rg::SliceSpec spec;
        spec.r3 = slice_r3;
        spec.rays = rays;
        spec.tol = slice_tol;
        os << rg::slice_to_csv(rg::boundary_slice(ch, cfg, spec, opt));
      } else {
        if (rates.size() != 3) throw Error(ErrorKind::ConfigMismatch, "--rates R1,R2,R3 is required unless --slice");
        const auto rep = rg::evaluate(ch, cfg, {rates[0], rates[1], rates[2]}, opt);
        if (format == "csv") os << rg::to_csv(rep);
        else os << dump(report_json(rep));
      }
    } else if (name == "scan") {
      const auto ch = sc_ch.build();
      grid.scan_cap = scan_cap;
      grid.threads = threads;
      grid.refine = !no_refine;
      const auto kind = evaluator == "thm1" ? rg::EvaluatorKind::Thm1 : rg::EvaluatorKind::Unstructured;
      os << dump(rg::to_json(rg::max_r1_scan(ch, kind, r2, r3, grid)));
    } else if (name == "sim") {
      if (sim_target == "ex1") {
        os << mcsim::csv_header();
        for (int n : ns) {
          mcsim::SimConfig c;
          if (ls.empty()) {
            c = mcsim::ex1_config_below_threshold(n, {deltas[0], deltas[1], deltas[2]}, sim_tau, backoff);
          } else {
            c.n = n;
            c.l = {ls[0], ls[1], ls[2]};
            c.delta = {deltas[0], deltas[1], deltas[2]};
            c.tau = sim_tau;
          }
          if (!ks.empty()) c.k = {ks[0], ks[1], ks[2]};
          c.trials = trials;
          c.seed = *seed;
          c.threads = threads;
          c.decoder = mcsim::decoder_from_string(decoder);
          os << mcsim::csv_row(mcsim::run_ex1_sim(c));
        }
      } else {
        const auto curve = mcsim::soft_covering_curve(sc_n, modulus, parse_list(p_list), *seed, codes);
        std::ostringstream csv;
        csv << std::setprecision(17) << "n,k,tv,codes,seed\n";
        for (size_t k = 0; k < curve.size(); ++k) csv << sc_n << ',' << k << ',' << curve[k] << ',' << codes << ',' << *seed << '\n';
        os << csv.str();
      }
    } else if (name == "tiltlab") {
      json res;
      res["suite"] = suite;
      size_t passed = 0, total = 0;
      if (suite == "closeness") {
        const auto cs = tiltlab::closeness_suite(cases, etas, *seed, threads);
        for (const auto& c : cs) passed += c.pass;
        total = cs.size();
        res["cases"] = cs;
      } else if (suite == "hn") {
        const auto cs = tiltlab::hn_suite(cases, max_dim, *seed, threads);
        for (const auto& c : cs) passed += c.pass;
        total = cs.size();
        res["cases"] = cs;
      } else if (suite == "smoothing" || suite == "smoothing4") {
        if (etas.empty()) throw Error(ErrorKind::ConfigMismatch, "--eta needs a value");
        const auto cs = suite == "smoothing" ? tiltlab::smoothing_suite(sizes, etas[0], *seed)
                                             : tiltlab::four_user_smoothing_suite(sizes, etas[0], *seed);
        size_t within21 = 0;
        for (const auto& c : cs) {
          passed += c.within_3;
          within21 += c.within_21;
        }
        total = cs.size();
        res["cases"] = cs;
        res["within_21"] = within21;
      } else {
        const double phi = parse_angle(srm_phi);
        const auto r = tiltlab::tiny_srm({channels::gamma_state(phi, 0), channels::gamma_state(phi, 1)}, {0.5, 0.5});
        const double expected = (1 + std::sin(phi)) / 2;
        res["success"] = r.success;
        res["expected"] = expected;
        res["completeness_defect"] = r.completeness_defect;
        total = 1;
        passed = std::abs(r.success - expected) <= 1e-9;
      }
      // The four-user constants are reported, not asserted.
      const bool asserted = suite != "smoothing4";
      res["summary"] = {{"passed", passed}, {"total", total}, {"asserted", asserted}};
      os << dump(res);
      if (asserted && passed != total) code = kVerification;
    } else if (name == "verify") {
      AcceptanceOptions ao;
      ao.only = only;
      ao.threads = threads;
      const auto results = run_acceptance(ao);
      os << format_table(results);
      for (const auto& r : results)
        if (!r.pass) code = kVerification;
    }
    os.flush();
  } catch (const Error& e) {
    error_message = e.what();
    code = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    error_message = e.what();
    code = kConfig;
  }
  if (!error_message.empty()) err << "error: " << error_message << "\n";

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest;
  manifest["command"] = sub->get_name();
  manifest["argv"] = std::vector<std::string>(args.begin() + (args.empty() ? 0 : 1), args.end());
  manifest["parameters"] = option_values(sub);
  manifest["seed"] = seed ? json(*seed) : json(nullptr);
  manifest["version"] = CQRL_VERSION;
  manifest["started_utc"] = started_utc;
  manifest["wall_clock_seconds"] = wall;
  manifest["exit_code"] = code;
  manifest["outputs"] = json::array({output_path.empty() ? "stdout" : output_path});
  if (const char* t = std::getenv("CQRL_TOL")) manifest["cqrl_tol"] = t;
  std::string mpath = manifest_path;
  if (mpath.empty() && !output_path.empty()) mpath = output_path + ".manifest.json";
  if (mpath.empty()) {
    err << manifest.dump() << "\n";
  } else {
    std::ofstream mf(mpath);
    if (!mf) {
      err << "error: cannot write manifest '" << mpath << "'\n";
      return code == kOk ? kConfig : code;
    }
    mf << dump(manifest);
  }
  return code;
}

}  // namespace cqrl::cli
