#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <numeric>
#include <thread>

#include "cqrl/errors.hpp"
#include "cqrl/linalg.hpp"
#include "cqrl/regions.hpp"
#include "cqrl/tolerances.hpp"

namespace cqrl::regions {

namespace {

using Counts = std::vector<int>;

// Compositions of `total` into `parts` nonnegative integers, lexicographic.
std::vector<Counts> compositions(int parts, int total) {
  std::vector<Counts> out;
  Counts cur(static_cast<size_t>(parts), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == parts - 1) {
      cur[static_cast<size_t>(pos)] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[static_cast<size_t>(pos)] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, total);
  return out;
}

double cost_of(const Counts& c, const std::vector<double>& kappa, int den) {
  double s = 0.0;
  for (size_t x = 0; x < c.size(); ++x) s += c[x] * kappa[x];
  return s / den;
}

std::vector<double> to_probs(const Counts& c, int den) {
  std::vector<double> p(c.size());
  for (size_t i = 0; i < c.size(); ++i) p[i] = static_cast<double>(c[i]) / den;
  return p;
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::array<uint64_t, 3> idx{~0ULL, ~0ULL, ~0ULL};
  bool found = false;

  void offer(double v, std::array<uint64_t, 3> i) {
    if (!found || v > value || (v == value && i < idx)) {
      value = v;
      idx = i;
      found = true;
    }
  }
  void merge(const Best& o) {
    if (o.found) offer(o.value, o.idx);
  }
};

template <class F>
void parallel_for(uint64_t count, int threads, std::vector<Best>& local, F body) {
  const int t = std::max(1, threads);
  local.assign(static_cast<size_t>(t), Best{});
  if (t == 1) {
    for (uint64_t i = 0; i < count; ++i) body(i, local[0]);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      for (uint64_t i = static_cast<uint64_t>(w); i < count; i += static_cast<uint64_t>(t)) body(i, local[static_cast<size_t>(w)]);
    });
  for (auto& th : pool) th.join();
}

// Coordinate refinement: move `step` of mass between two cells of the same
// factor whenever that raises the objective; halve the step when a sweep
// makes no progress.
uint64_t refine(std::vector<std::vector<double>>& factors, double start_step, int halvings,
                const std::function<std::optional<double>(const std::vector<std::vector<double>>&)>& eval, double& best,
                uint64_t max_evals = 40000) {
  uint64_t evals = 0;
  double step = start_step;
  for (int h = 0; h <= halvings && evals < max_evals; ++h, step /= 2) {
    bool improved = true;
    while (improved && evals < max_evals) {
      improved = false;
      for (auto& f : factors) {
        for (size_t a = 0; a < f.size(); ++a)
          for (size_t b = 0; b < f.size(); ++b) {
            if (a == b || f[a] < step) continue;
            f[a] -= step;
            f[b] += step;
            std::optional<double> v;
            try {
              v = eval(factors);
            } catch (const Error&) {
              v.reset();
            }
            ++evals;
            if (v && *v > best + 1e-12) {
              best = *v;
              improved = true;
            } else {
              f[a] += step;
              f[b] -= step;
            }
          }
      }
    }
  }
  return evals;
}

// ---------------------------------------------------------------- unstructured

struct Atom {
  int dir;
  double weight;
  int mult;
};
struct Form {
  std::vector<Atom> atoms;
  int marginal_dir;
};

struct UserGrid {
  std::vector<Counts> dirs;             // gcd-reduced count vectors
  std::vector<std::vector<double>> cond;  // normalized conditionals
  std::vector<Form> forms;
};

Counts reduce(const Counts& c) {
  int g = 0;
  for (int v : c) g = std::gcd(g, v);
  Counts r = c;
  for (int& v : r) v /= g;
  return r;
}

UserGrid user_grid(const ChannelSpec& ch, int j, double rate, const GridSpec& g) {
  const int nx = ch.inputs()[static_cast<size_t>(j)];
  const int D = g.denominator;
  const auto& tol = tolerances();
  UserGrid ug;
  std::map<Counts, int> dir_index;
  for (int s = 1; s <= D; ++s)
    for (const auto& c : compositions(nx, s))
      if (reduce(c) == c) {
        dir_index.emplace(c, static_cast<int>(ug.dirs.size()));
        ug.dirs.push_back(c);
      }
  for (const auto& c : ug.dirs) {
    const int s = std::accumulate(c.begin(), c.end(), 0);
    ug.cond.push_back(to_probs(c, s));
  }
  // Single-user constraints depend on the marginal only.
  std::vector<Mat> rho;
  for (int x = 0; x < nx; ++x) rho.push_back(j == 1 ? ch.marginal(1, 0, x, 0) : ch.marginal(2, 0, 0, x));
  const auto& kappa = ch.costs()[static_cast<size_t>(j)];
  const int dmax = static_cast<int>(ug.dirs.size());
  for (const auto& m : compositions(nx, D)) {
    if (cost_of(m, kappa, D) > ch.tau()[static_cast<size_t>(j)] + tol.prob) continue;
    Mat avg = Mat::Zero(rho[0].rows(), rho[0].cols());
    double cond_h = 0.0;
    for (int x = 0; x < nx; ++x) {
      const double p = static_cast<double>(m[static_cast<size_t>(x)]) / D;
      avg += p * rho[static_cast<size_t>(x)];
      cond_h += p * entropy_bits(rho[static_cast<size_t>(x)]);
    }
    if (!(entropy_bits(avg) - cond_h - rate > tol.rate)) continue;
    const int mdir = dir_index.at(reduce(m));
    // Distinct directions in increasing index order, at most max_aux atoms.
    std::vector<Atom> cur;
    std::function<void(int, Counts&)> rec = [&](int from, Counts& left) {
      if (std::all_of(left.begin(), left.end(), [](int v) { return v == 0; })) {
        ug.forms.push_back({cur, mdir});
        return;
      }
      if (static_cast<int>(cur.size()) == g.max_aux) return;
      for (int d = from; d < dmax; ++d) {
        const auto& dv = ug.dirs[static_cast<size_t>(d)];
        int maxm = D;
        for (int x = 0; x < nx; ++x)
          if (dv[static_cast<size_t>(x)] > 0) maxm = std::min(maxm, left[static_cast<size_t>(x)] / dv[static_cast<size_t>(x)]);
        const int s = std::accumulate(dv.begin(), dv.end(), 0);
        for (int k = 1; k <= maxm; ++k) {
          for (int x = 0; x < nx; ++x) left[static_cast<size_t>(x)] -= k * dv[static_cast<size_t>(x)];
          cur.push_back({d, static_cast<double>(k * s) / D, k});
          rec(d + 1, left);
          cur.pop_back();
          for (int x = 0; x < nx; ++x) left[static_cast<size_t>(x)] += k * dv[static_cast<size_t>(x)];
        }
      }
    };
    Counts left = m;
    rec(0, left);
    if (ug.forms.size() > g.scan_cap) throw Error(ErrorKind::BudgetExceeded, "auxiliary grid exceeds scan cap");
  }
  return ug;
}

std::vector<double> joint_of(const Form& f, const UserGrid& ug, int nx, int rows, int D) {
  std::vector<double> p(static_cast<size_t>(rows * nx), 0.0);
  for (size_t a = 0; a < f.atoms.size(); ++a) {
    const auto& dv = ug.dirs[static_cast<size_t>(f.atoms[a].dir)];
    for (int x = 0; x < nx; ++x)
      p[a * static_cast<size_t>(nx) + static_cast<size_t>(x)] = static_cast<double>(f.atoms[a].mult * dv[static_cast<size_t>(x)]) / D;
  }
  return p;
}

ScanResult scan_unstructured(const ChannelSpec& ch, double r2, double r3, const GridSpec& g) {
  require_3to1(ch);
  const auto& tol = tolerances();
  const int D = g.denominator;
  const int n1 = ch.inputs()[0], n2 = ch.inputs()[1], n3 = ch.inputs()[2];
  const int d1 = ch.output_dims()[0];

  std::vector<Counts> p1s;
  for (const auto& c : compositions(n1, D))
    if (cost_of(c, ch.costs()[0], D) <= ch.tau()[0] + tol.prob) p1s.push_back(c);
  const UserGrid u2 = user_grid(ch, 1, r2, g);
  const UserGrid u3 = user_grid(ch, 2, r3, g);

  ScanResult res;
  res.grid_points = static_cast<uint64_t>(p1s.size()) * u2.forms.size() * u3.forms.size();
  if (res.grid_points > g.scan_cap)
    throw Error(ErrorKind::BudgetExceeded, "grid of " + std::to_string(res.grid_points) + " points exceeds scan cap");
  if (res.grid_points == 0) return res;

  // Directions that actually occur.
  auto used = [](const UserGrid& ug) {
    std::vector<int> map(ug.dirs.size(), -1);
    std::vector<int> list;
    for (const auto& f : ug.forms) {
      for (int d : {f.marginal_dir}) if (map[static_cast<size_t>(d)] < 0) { map[static_cast<size_t>(d)] = static_cast<int>(list.size()); list.push_back(d); }
      for (const auto& a : f.atoms)
        if (map[static_cast<size_t>(a.dir)] < 0) { map[static_cast<size_t>(a.dir)] = static_cast<int>(list.size()); list.push_back(a.dir); }
    }
    return std::make_pair(map, list);
  };
  const auto [map2, list2] = used(u2);
  const auto [map3, list3] = used(u3);
  const size_t m2 = list2.size(), m3 = list3.size();

  // Compact per-form arrays.
  struct Flat {
    std::vector<std::array<int, 4>> dir;
    std::vector<std::array<double, 4>> w;
    std::vector<int> mdir;
    std::vector<double> info;  // I(X_j; Y_j | U_j)
  };
  auto flatten = [&](const UserGrid& ug, const std::vector<int>& map, int j) {
    const int nx = ch.inputs()[static_cast<size_t>(j)];
    std::vector<Mat> rho;
    std::vector<double> hx;
    for (int x = 0; x < nx; ++x) {
      rho.push_back(j == 1 ? ch.marginal(1, 0, x, 0) : ch.marginal(2, 0, 0, x));
      hx.push_back(entropy_bits(rho.back()));
    }
    std::vector<double> gdir(ug.dirs.size(), 0.0);
    for (size_t d = 0; d < ug.dirs.size(); ++d) {
      if (map[d] < 0) continue;
      Mat avg = Mat::Zero(rho[0].rows(), rho[0].cols());
      double ch_ = 0.0;
      for (int x = 0; x < nx; ++x) {
        avg += ug.cond[d][static_cast<size_t>(x)] * rho[static_cast<size_t>(x)];
        ch_ += ug.cond[d][static_cast<size_t>(x)] * hx[static_cast<size_t>(x)];
      }
      gdir[d] = entropy_bits(avg) - ch_;
    }
    Flat f;
    for (const auto& form : ug.forms) {
      std::array<int, 4> di{0, 0, 0, 0};
      std::array<double, 4> wi{0, 0, 0, 0};
      double info = 0.0;
      for (size_t a = 0; a < form.atoms.size() && a < 4; ++a) {
        di[a] = map[static_cast<size_t>(form.atoms[a].dir)];
        wi[a] = form.atoms[a].weight;
        info += wi[a] * gdir[static_cast<size_t>(form.atoms[a].dir)];
      }
      f.dir.push_back(di);
      f.w.push_back(wi);
      f.mdir.push_back(map[static_cast<size_t>(form.marginal_dir)]);
      f.info.push_back(info);
    }
    return f;
  };
  if (g.max_aux > 4) throw Error(ErrorKind::Unsupported, "scan supports at most 4 auxiliary symbols");
  const Flat f2 = flatten(u2, map2, 1);
  const Flat f3 = flatten(u3, map3, 2);

  // M[x1][d2][d3] = Σ c2(x2) c3(x3) ρ₁(x1,x2,x3); B-part entropies do not depend on p_X1.
  std::vector<Mat> M(static_cast<size_t>(n1) * m2 * m3);
  std::vector<double> Sx(M.size());
  for (int x1 = 0; x1 < n1; ++x1)
    for (size_t a = 0; a < m2; ++a)
      for (size_t b = 0; b < m3; ++b) {
        const auto& c2 = u2.cond[static_cast<size_t>(list2[a])];
        const auto& c3 = u3.cond[static_cast<size_t>(list3[b])];
        Mat acc = Mat::Zero(d1, d1);
        for (int x2 = 0; x2 < n2; ++x2)
          for (int x3 = 0; x3 < n3; ++x3) {
            const double w = c2[static_cast<size_t>(x2)] * c3[static_cast<size_t>(x3)];
            if (w > 0) acc += w * ch.marginal(0, x1, x2, x3);
          }
        const size_t k = (static_cast<size_t>(x1) * m2 + a) * m3 + b;
        Sx[k] = entropy_bits(acc);
        M[k] = std::move(acc);
      }

  Best best;
  std::vector<double> A(m2 * m3), B(m2 * m3);
  for (size_t pi = 0; pi < p1s.size(); ++pi) {
    const auto p1 = to_probs(p1s[pi], D);
    for (size_t a = 0; a < m2; ++a)
      for (size_t b = 0; b < m3; ++b) {
        Mat acc = Mat::Zero(d1, d1);
        double bb = 0.0;
        for (int x1 = 0; x1 < n1; ++x1) {
          const size_t k = (static_cast<size_t>(x1) * m2 + a) * m3 + b;
          if (p1[static_cast<size_t>(x1)] <= 0) continue;
          acc += p1[static_cast<size_t>(x1)] * M[k];
          bb += p1[static_cast<size_t>(x1)] * Sx[k];
        }
        A[a * m3 + b] = entropy_bits(acc);
        B[a * m3 + b] = bb;
      }

    std::vector<Best> local;
    parallel_for(f3.dir.size(), g.threads, local, [&](uint64_t i3, Best& out) {
      std::vector<double> a1(m2), bB(m2), aU2(m2), aU3(m2);
      const auto& di3 = f3.dir[i3];
      const auto& w3 = f3.w[i3];
      const size_t md3 = static_cast<size_t>(f3.mdir[i3]);
      for (size_t a = 0; a < m2; ++a) {
        double s1 = 0, s2 = 0, s3 = 0;
        for (int t = 0; t < 4; ++t) {
          if (w3[static_cast<size_t>(t)] == 0) continue;
          const size_t k = a * m3 + static_cast<size_t>(di3[static_cast<size_t>(t)]);
          s1 += w3[static_cast<size_t>(t)] * (A[k] - B[k]);
          s2 += w3[static_cast<size_t>(t)] * B[k];
          s3 += w3[static_cast<size_t>(t)] * A[k];
        }
        a1[a] = s1;
        bB[a] = s2;
        aU3[a] = s3;
        aU2[a] = A[a * m3 + md3];
      }
      const double i3v = f3.info[i3];
      for (size_t i2 = 0; i2 < f2.dir.size(); ++i2) {
        const auto& di = f2.dir[i2];
        const auto& w = f2.w[i2];
        double b1 = 0, hx = 0, hu2 = 0;
        for (int t = 0; t < 4; ++t) {
          const double wt = w[static_cast<size_t>(t)];
          if (wt == 0) continue;
          const size_t d = static_cast<size_t>(di[static_cast<size_t>(t)]);
          b1 += wt * a1[d];
          hx += wt * bB[d];
          hu2 += wt * aU2[d];
        }
        const size_t md2 = static_cast<size_t>(f2.mdir[i2]);
        const double i2v = f2.info[i2];
        const double b12 = aU3[md2] - hx + i2v;
        const double b13 = hu2 - hx + i3v;
        const double b123 = A[md2 * m3 + md3] - hx + i2v + i3v;
        const double sup = std::min({b1, b12 - r2, b13 - r3, b123 - r2 - r3});
        if (sup > tol.rate) out.offer(sup, {pi, i2, i3});
      }
    });
    for (const auto& l : local) best.merge(l);
  }
  if (!best.found) return res;

  UnstructuredPmf arg;
  const auto& F2 = u2.forms[best.idx[1]];
  const auto& F3 = u3.forms[best.idx[2]];
  arg.p_x1 = Pmf(to_probs(p1s[best.idx[0]], D));
  arg.u2 = std::max<int>(1, static_cast<int>(F2.atoms.size()));
  arg.u3 = std::max<int>(1, static_cast<int>(F3.atoms.size()));
  arg.p_u2x2 = joint_of(F2, u2, n2, arg.u2, D);
  arg.p_u3x3 = joint_of(F3, u3, n3, arg.u3, D);
  const auto ref = unstructured_r1_sup(ch, arg, r2, r3);
  if (!ref || std::abs(*ref - best.value) > 1e-8)
    throw Error(ErrorKind::NumericalFailure, "fast scan disagrees with the reference evaluator at the argmax");
  res.found = true;
  res.grid_max_r1 = best.value;
  res.max_r1 = best.value;
  res.argmax = arg;

  if (g.refine) {
    // Pad to max_aux rows so mass may move into unused auxiliary symbols.
    auto pad = [](std::vector<double> p, int rows, int nx, int to) {
      p.resize(static_cast<size_t>(std::max(rows, to) * nx), 0.0);
      return p;
    };
    const int rows = std::max(g.max_aux, 1);
    std::vector<std::vector<double>> factors = {arg.p_x1.probs, pad(arg.p_u2x2, arg.u2, n2, rows),
                                                pad(arg.p_u3x3, arg.u3, n3, rows)};
    auto build = [&](const std::vector<std::vector<double>>& f) {
      UnstructuredPmf p;
      p.p_x1 = Pmf(f[0]);
      p.u2 = std::max(rows, arg.u2);
      p.u3 = std::max(rows, arg.u3);
      p.p_u2x2 = f[1];
      p.p_u3x3 = f[2];
      return p;
    };
    double val = best.value;
    res.refine_steps = refine(factors, 1.0 / (2 * D), 6,
                              [&](const std::vector<std::vector<double>>& f) { return unstructured_r1_sup(ch, build(f), r2, r3); }, val);
    if (val > res.max_r1) {
      res.max_r1 = val;
      res.argmax = build(factors);
    }
  }
  return res;
}

// ------------------------------------------------------------------ coset region

ScanResult scan_thm1(const ChannelSpec& ch, double r2, double r3, const GridSpec& g) {
  const auto& tol = tolerances();
  const int D = g.denominator;
  const int v = g.field;
  auto map_or_default = [&](const std::vector<int>& f, int j) {
    if (!f.empty()) return f;
    std::vector<int> m(static_cast<size_t>(v));
    for (int u = 0; u < v; ++u) m[static_cast<size_t>(u)] = u % ch.inputs()[static_cast<size_t>(j)];
    return m;
  };
  const auto f2 = map_or_default(g.f2, 1);
  const auto f3 = map_or_default(g.f3, 2);

  std::vector<Counts> p1s;
  for (const auto& c : compositions(ch.inputs()[0], D))
    if (cost_of(c, ch.costs()[0], D) <= ch.tau()[0] + tol.prob) p1s.push_back(c);
  auto u_lattice = [&](const std::vector<int>& f, int j) {
    std::vector<double> kappa(static_cast<size_t>(v));
    for (int u = 0; u < v; ++u) kappa[static_cast<size_t>(u)] = ch.costs()[static_cast<size_t>(j)][static_cast<size_t>(f[static_cast<size_t>(u)])];
    std::vector<Counts> out;
    for (const auto& c : compositions(v, D))
      if (cost_of(c, kappa, D) <= ch.tau()[static_cast<size_t>(j)] + tol.prob) out.push_back(c);
    return out;
  };
  const auto pu2 = u_lattice(f2, 1);
  const auto pu3 = u_lattice(f3, 2);

  ScanResult res;
  res.grid_points = static_cast<uint64_t>(p1s.size()) * pu2.size() * pu3.size();
  if (res.grid_points > g.scan_cap)
    throw Error(ErrorKind::BudgetExceeded, "grid of " + std::to_string(res.grid_points) + " points exceeds scan cap");

  auto make = [&](const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c) {
    Thm1Config cfg;
    cfg.field = v;
    cfg.p_x1 = Pmf(a);
    cfg.p_u2 = Pmf(b);
    cfg.p_u3 = Pmf(c);
    cfg.f2 = f2;
    cfg.f3 = f3;
    return cfg;
  };
  Best best;
  for (size_t pi = 0; pi < p1s.size(); ++pi) {
    const auto p1 = to_probs(p1s[pi], D);
    std::vector<Best> local;
    parallel_for(pu2.size(), g.threads, local, [&](uint64_t i2, Best& out) {
      const auto a2 = to_probs(pu2[i2], D);
      for (size_t i3 = 0; i3 < pu3.size(); ++i3) {
        const auto s = thm1_r1_sup(ch, make(p1, a2, to_probs(pu3[i3], D)), r2, r3);
        if (s) out.offer(*s, {pi, i2, i3});
      }
    });
    for (const auto& l : local) best.merge(l);
  }
  if (!best.found) return res;
  auto arg = make(to_probs(p1s[best.idx[0]], D), to_probs(pu2[best.idx[1]], D), to_probs(pu3[best.idx[2]], D));
  res.found = true;
  res.grid_max_r1 = res.max_r1 = best.value;
  res.argmax = arg;
  if (g.refine) {
    std::vector<std::vector<double>> factors = {arg.p_x1.probs, arg.p_u2.probs, arg.p_u3.probs};
    double val = best.value;
    res.refine_steps = refine(factors, 1.0 / (2 * D), 6,
                              [&](const std::vector<std::vector<double>>& f) { return thm1_r1_sup(ch, make(f[0], f[1], f[2]), r2, r3); }, val);
    if (val > res.max_r1) {
      res.max_r1 = val;
      res.argmax = make(factors[0], factors[1], factors[2]);
    }
  }
  return res;
}

}  // namespace

ScanResult max_r1_scan(const ChannelSpec& ch, EvaluatorKind kind, double r2, double r3, const GridSpec& grid) {
  if (grid.denominator < 1 || grid.max_aux < 1) throw Error(ErrorKind::DomainError, "grid denominator and auxiliary bound must be positive");
  switch (kind) {
    case EvaluatorKind::Unstructured: return scan_unstructured(ch, r2, r3, grid);
    case EvaluatorKind::Thm1: return scan_thm1(ch, r2, r3, grid);
    default: throw Error(ErrorKind::Unsupported, "pmf scans cover the thm1 and unstructured evaluators");
  }
}

nlohmann::json to_json(const ScanResult& r) {
  nlohmann::json j = {{"found", r.found}, {"max_r1", r.max_r1}, {"grid_max_r1", r.grid_max_r1},
                      {"grid_points", r.grid_points}, {"refine_steps", r.refine_steps}};
  j["argmax"] = r.argmax ? config_to_json(*r.argmax) : nlohmann::json(nullptr);
  return j;
}

std::vector<SlicePoint> boundary_slice(const ChannelSpec& ch, const RegionConfig& cfg, const SliceSpec& spec,
                                       const LayeredOptions& opt) {
  const double half_pi = std::acos(0.0);
  std::vector<SlicePoint> out;
  const int rays = std::max(1, spec.rays);
  for (int k = 0; k < rays; ++k) {
    const double th = rays == 1 ? 0.0 : half_pi * k / (rays - 1);
    const double c = std::cos(th), s = std::sin(th);
    auto ok = [&](double r) { return evaluate(ch, cfg, {r * c, r * s, spec.r3}, opt).feasible; };
    SlicePoint p{th, 0.0, 0.0};
    if (ok(0.0)) {
      double lo = 0.0, hi = 1.0;
      while (ok(hi) && hi < 64.0) {
        lo = hi;
        hi *= 2;
      }
      while (hi - lo > spec.tol) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
      }
      p.r1 = lo * c;
      p.r2 = lo * s;
    }
    out.push_back(p);
  }
  return out;
}

std::string slice_to_csv(const std::vector<SlicePoint>& pts) {
  std::ostringstream os;
  os.precision(17);
  os << "theta,R1,R2\n";
  for (const auto& p : pts) os << p.theta << ',' << p.r1 << ',' << p.r2 << '\n';
  return os.str();
}

}  // namespace cqrl::regions
