#include "cqrl/mcsim.hpp"

#include <algorithm>
#include <array>
#include <exception>
#include <bit>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include "cqrl/errors.hpp"
#include "cqrl/scalar.hpp"

namespace cqrl::mcsim {

std::vector<double> likelihood_weights(const gf::NestedCosetCode& code, const gf::Vector& m, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != code.modulus) throw Error(ErrorKind::LengthMismatch, "target pmf size differs from the field");
  const auto words = gf::enumerate_coset(code, m);
  std::vector<double> w(words.size());
  double total = 0.0;
  for (size_t a = 0; a < words.size(); ++a) {
    double v = 1.0;
    for (int s : words[a]) v *= p[static_cast<size_t>(s)] * code.modulus;
    w[a] = v;
    total += v;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::ZeroMassCoset, "every codeword of the coset has zero target mass");
  for (auto& v : w) v /= total;
  return w;
}

uint64_t likelihood_encode(const gf::NestedCosetCode& code, const gf::Vector& m, const std::vector<double>& p, Rng& rng) {
  const auto w = likelihood_weights(code, m, p);
  const double u = rng.uniform01();
  double acc = 0.0;
  for (size_t a = 0; a < w.size(); ++a) {
    acc += w[a];
    if (u < acc) return a;
  }
  // Rounding left u above the running sum: take the last index with mass.
  for (size_t a = w.size(); a-- > 0;)
    if (w[a] > 0) return a;
  return 0;
}

uint64_t likelihood_encode_resampling(gf::NestedCosetCode& code, const gf::Vector& m, const std::vector<double>& p,
                                      Rng& rng, uint64_t& retries, int max_retries) {
  for (int attempt = 0;; ++attempt) {
    try {
      return likelihood_encode(code, m, p, rng);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroMassCoset || attempt >= max_retries) throw;
      for (auto& b : code.bias) b = static_cast<int>(rng.below(static_cast<uint64_t>(code.modulus)));
      ++retries;
    }
  }
}

std::string to_string(Decoder d) { return d == Decoder::MlJoint ? "ml_joint" : "sum_coset"; }

Decoder decoder_from_string(const std::string& s) {
  if (s == "ml_joint") return Decoder::MlJoint;
  if (s == "sum_coset") return Decoder::SumCoset;
  throw Error(ErrorKind::ParseError, "unknown decoder '" + s + "'");
}

Interval wilson(uint64_t errors, uint64_t trials) {
  if (trials == 0) throw Error(ErrorKind::DomainError, "no trials");
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / nn;
  const double den = 1 + z * z / nn;
  const double centre = (p + z * z / (2 * nn)) / den;
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / den;
  return {p, std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

namespace {

uint64_t pack(const gf::Vector& v) {
  uint64_t w = 0;
  for (size_t t = 0; t < v.size(); ++t)
    if (v[t]) w |= uint64_t{1} << t;
  return w;
}

uint64_t row_bits(const gf::Matrix& g, int r) {
  uint64_t w = 0;
  for (int c = 0; c < g.cols; ++c)
    if (g.at(r, c)) w |= uint64_t{1} << c;
  return w;
}

// Table of every codeword, entry m·2^k + a, with integers read as in
// gf::index_to_vector (digit 0 most significant).
std::vector<uint64_t> code_table(const gf::NestedCosetCode& c) {
  std::vector<uint64_t> rows;  // bit b of the combined index ↦ generator row
  for (int b = 0; b < c.k; ++b) rows.push_back(row_bits(c.g_I, c.k - 1 - b));
  for (int b = 0; b < c.l; ++b) rows.push_back(row_bits(c.g_OI, c.l - 1 - b));
  const size_t size = size_t{1} << rows.size();
  std::vector<uint64_t> t(size);
  t[0] = pack(c.bias);
  for (size_t i = 1; i < size; ++i) t[i] = t[i & (i - 1)] ^ rows[static_cast<size_t>(std::countr_zero(i))];
  return t;
}

uint64_t noise(int n, double delta, Rng& rng) {
  uint64_t w = 0;
  for (int t = 0; t < n; ++t)
    if (rng.bernoulli(delta)) w |= uint64_t{1} << t;
  return w;
}

// Smallest index among the minimum-distance candidates.
size_t ml_index(const std::vector<uint64_t>& table, uint64_t y) {
  size_t best = 0;
  int bd = 65;
  for (size_t i = 0; i < table.size(); ++i) {
    const int d = std::popcount(table[i] ^ y);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

struct Tally {
  std::array<uint64_t, 3> err{};
  std::array<uint64_t, 3> ones{};
  uint64_t retries = 0;
};

void one_trial(const SimConfig& cfg, uint64_t trial, Tally& tally) {
  Rng rng = Rng::stream(cfg.seed, trial);
  const int n = cfg.n;
  auto pair = gf::random_code_pair({n, cfg.k[1], cfg.l[1], cfg.k[2], cfg.l[2], 2}, rng);

  std::vector<uint64_t> book(size_t{1} << cfg.l[0]);
  for (auto& w : book) w = noise(n, cfg.tau, rng);

  const uint64_t m1 = rng.below(book.size());
  const gf::Vector m2 = gf::index_to_vector(rng.below(uint64_t{1} << cfg.l[1]), cfg.l[1], 2);
  const gf::Vector m3 = gf::index_to_vector(rng.below(uint64_t{1} << cfg.l[2]), cfg.l[2], 2);
  const std::vector<double> uniform = {0.5, 0.5};
  const uint64_t a2 = likelihood_encode_resampling(pair.code2, m2, uniform, rng, tally.retries);
  const uint64_t a3 = likelihood_encode_resampling(pair.code3, m3, uniform, rng, tally.retries);
  const gf::Vector a2v = gf::index_to_vector(a2, cfg.k[1], 2), a3v = gf::index_to_vector(a3, cfg.k[2], 2);
  const gf::Vector u2 = gf::codeword(pair.code2, a2v, m2);
  const gf::Vector u3 = gf::codeword(pair.code3, a3v, m3);
  const auto sum = pair.sum_code();
  if (!gf::in_coset(sum, gf::add(u2, u3, 2), gf::sum_message(pair, m2, m3)))
    throw Error(ErrorKind::NumericalFailure, "sum of user codewords left the predicted coset");

  const uint64_t x1 = book[m1], x2 = pack(u2), x3 = pack(u3);
  tally.ones[0] += static_cast<uint64_t>(std::popcount(x1));
  tally.ones[1] += static_cast<uint64_t>(std::popcount(x2));
  tally.ones[2] += static_cast<uint64_t>(std::popcount(x3));
  const uint64_t y1 = x1 ^ x2 ^ x3 ^ noise(n, cfg.delta[0], rng);
  const uint64_t y2 = x2 ^ noise(n, cfg.delta[1], rng);
  const uint64_t y3 = x3 ^ noise(n, cfg.delta[2], rng);

  const auto t2 = code_table(pair.code2);
  const auto t3 = code_table(pair.code3);
  if ((ml_index(t2, y2) >> cfg.k[1]) != gf::vector_to_index(m2, 2)) ++tally.err[1];
  if ((ml_index(t3, y3) >> cfg.k[2]) != gf::vector_to_index(m3, 2)) ++tally.err[2];

  const auto ts = code_table(sum);
  uint64_t m1_hat = 0;
  if (cfg.decoder == Decoder::MlJoint) {
    int bd = 65;
    for (size_t a = 0; a < book.size(); ++a)
      for (size_t s = 0; s < ts.size(); ++s) {
        const int d = std::popcount(y1 ^ book[a] ^ ts[s]);
        if (d < bd) {
          bd = d;
          m1_hat = a;
        }
      }
  } else {
    // Sum-coset word first, with user 1's codeword averaged out; then m₁.
    const double d1 = cfg.delta[0];
    const double lam = d1 > 0 ? d1 / (1 - d1) : 0.0;
    std::vector<double> pw(static_cast<size_t>(n) + 1);
    for (int d = 0; d <= n; ++d) pw[static_cast<size_t>(d)] = std::pow(lam, d);
    size_t s_hat = 0;
    double bs = -1.0;
    for (size_t s = 0; s < ts.size(); ++s) {
      double score = 0.0;
      for (const auto w : book) score += pw[static_cast<size_t>(std::popcount(y1 ^ w ^ ts[s]))];
      if (score > bs) {
        bs = score;
        s_hat = s;
      }
    }
    m1_hat = ml_index(book, y1 ^ ts[s_hat]);
  }
  if (m1_hat != m1) ++tally.err[0];
}

}  // namespace

std::array<double, 3> sim_rates(const SimConfig& cfg) {
  return {static_cast<double>(cfg.l[0]) / cfg.n, static_cast<double>(cfg.l[1]) / cfg.n, static_cast<double>(cfg.l[2]) / cfg.n};
}

SimResult run_ex1_sim(const SimConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 64) throw Error(ErrorKind::DomainError, "blocklength must lie in [1, 64]");
  if (cfg.trials < 1) throw Error(ErrorKind::DomainError, "trials must be at least 1");
  for (int j = 0; j < 3; ++j) {
    if (cfg.l[static_cast<size_t>(j)] < 0 || cfg.k[static_cast<size_t>(j)] < 0) throw Error(ErrorKind::DomainError, "negative code dimension");
    if (!(cfg.delta[static_cast<size_t>(j)] >= 0 && cfg.delta[static_cast<size_t>(j)] <= 0.5)) throw Error(ErrorKind::DomainError, "crossover outside [0, 1/2]");
  }
  if (!(cfg.tau >= 0 && cfg.tau <= 1)) throw Error(ErrorKind::DomainError, "tau outside [0, 1]");
  const int ks = std::max(cfg.k[1], cfg.k[2]), ls = std::max(cfg.l[1], cfg.l[2]);
  const uint64_t cap = gf::enumeration_cap;
  auto too_big = [&](int bits) { return bits >= 63 || (uint64_t{1} << bits) > cap; };
  if (too_big(cfg.k[1] + cfg.l[1]) || too_big(cfg.k[2] + cfg.l[2]) || too_big(cfg.l[0] + ks + ls))
    throw Error(ErrorKind::BudgetExceeded, "decoder candidate set exceeds the enumeration cap");

  const int threads = std::max(1, cfg.threads);
  std::vector<Tally> part(static_cast<size_t>(threads));
  auto work = [&](int w) {
    for (uint64_t t = static_cast<uint64_t>(w); t < cfg.trials; t += static_cast<uint64_t>(threads)) one_trial(cfg, t, part[static_cast<size_t>(w)]);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<size_t>(threads));
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          errs[static_cast<size_t>(w)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  SimResult r;
  r.cfg = cfg;
  for (const auto& p : part) {
    for (int j = 0; j < 3; ++j) {
      r.errors[static_cast<size_t>(j)] += p.err[static_cast<size_t>(j)];
      r.ones_fraction[static_cast<size_t>(j)] += static_cast<double>(p.ones[static_cast<size_t>(j)]);
    }
    r.bias_retries += p.retries;
  }
  for (int j = 0; j < 3; ++j) {
    r.error_rate[static_cast<size_t>(j)] = wilson(r.errors[static_cast<size_t>(j)], cfg.trials);
    r.ones_fraction[static_cast<size_t>(j)] /= static_cast<double>(cfg.trials) * cfg.n;
  }
  return r;
}

std::string csv_header() {
  return "n,R1,R2,R3,trials,err1,err1_lo,err1_hi,err2,err2_lo,err2_hi,err3,err3_lo,err3_hi,seed\n";
}

std::string csv_row(const SimResult& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto rates = sim_rates(r.cfg);
  os << r.cfg.n << ',' << rates[0] << ',' << rates[1] << ',' << rates[2] << ',' << r.cfg.trials;
  for (const auto& e : r.error_rate) os << ',' << e.estimate << ',' << e.lo << ',' << e.hi;
  os << ',' << r.cfg.seed << '\n';
  return os.str();
}

Ex1Thresholds ex1_thresholds(const std::array<double, 3>& delta, double tau) {
  Ex1Thresholds t;
  t.r1 = binary_entropy(binary_convolve(tau, delta[0])) - binary_entropy(delta[0]);
  t.sum = 1 - binary_entropy(delta[0]);
  t.rj = {1 - binary_entropy(delta[1]), 1 - binary_entropy(delta[2])};
  return t;
}

SimConfig ex1_config_below_threshold(int n, const std::array<double, 3>& delta, double tau, double backoff) {
  const auto t = ex1_thresholds(delta, tau);
  SimConfig c;
  c.n = n;
  c.delta = delta;
  c.tau = tau;
  const double f = 1 - backoff;
  c.l[0] = static_cast<int>(std::floor(f * t.r1 * n + 1e-9));
  for (int j = 0; j < 2; ++j)
    c.l[static_cast<size_t>(j + 1)] = static_cast<int>(std::floor(f * std::min(t.rj[static_cast<size_t>(j)], t.sum - t.r1) * n + 1e-9));
  return c;
}

}  // namespace cqrl::mcsim
