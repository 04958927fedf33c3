#include <cmath>
#include <vector>

#include "cqrl/errors.hpp"
#include "cqrl/mcsim.hpp"

namespace cqrl::mcsim {

namespace {

int inverse_mod(int a, int p) {
  int r = 1;
  for (int e = p - 2; e > 0; --e) r = r * a % p;
  return r;
}

// Row-reduced echelon form of the top k rows; pivots[i] is the pivot column
// of row i.
struct Echelon {
  std::vector<gf::Vector> rows;
  std::vector<int> pivots;
};

Echelon echelon(const gf::Matrix& g, int k, int p) {
  Echelon e;
  for (int r = 0; r < k; ++r) {
    gf::Vector row(g.data.begin() + static_cast<long>(r) * g.cols, g.data.begin() + static_cast<long>(r + 1) * g.cols);
    for (size_t i = 0; i < e.rows.size(); ++i) {
      const int c = row[static_cast<size_t>(e.pivots[i])];
      if (c)
        for (int t = 0; t < g.cols; ++t) row[static_cast<size_t>(t)] = ((row[static_cast<size_t>(t)] - c * e.rows[i][static_cast<size_t>(t)]) % p + p) % p;
    }
    int piv = -1;
    for (int t = 0; t < g.cols; ++t)
      if (row[static_cast<size_t>(t)]) {
        piv = t;
        break;
      }
    if (piv < 0) continue;
    const int inv = inverse_mod(row[static_cast<size_t>(piv)], p);
    for (auto& v : row) v = v * inv % p;
    for (auto& other : e.rows) {
      const int c = other[static_cast<size_t>(piv)];
      if (c)
        for (int t = 0; t < g.cols; ++t) other[static_cast<size_t>(t)] = ((other[static_cast<size_t>(t)] - c * row[static_cast<size_t>(t)]) % p + p) % p;
    }
    e.rows.push_back(std::move(row));
    e.pivots.push_back(piv);
  }
  return e;
}

gf::Matrix full_rank_generator(int n, int p, Rng& rng) {
  for (;;) {
    gf::Matrix g(n, n);
    for (auto& v : g.data) v = static_cast<int>(rng.below(static_cast<uint64_t>(p)));
    if (gf::rank(g, p) == n) return g;
  }
}

void check_inputs(int n, int modulus, const std::vector<double>& p, int num_codes) {
  gf::require_prime(modulus);
  if (n < 1) throw Error(ErrorKind::DomainError, "blocklength must be positive");
  if (num_codes < 1) throw Error(ErrorKind::DomainError, "need at least one code");
  if (static_cast<int>(p.size()) != modulus) throw Error(ErrorKind::LengthMismatch, "pmf size differs from the field");
  if (std::pow(static_cast<double>(modulus), n) > 1e5) throw Error(ErrorKind::TooLarge, "field^n exceeds 1e5");
}

double tv_for(const gf::Matrix& g, int n, int k, int modulus, const std::vector<double>& mass) {
  const auto e = echelon(g, k, modulus);
  std::vector<double> coset(mass.size(), 0.0);
  std::vector<char> seen(mass.size(), 0);
  for (uint64_t idx = 0; idx < mass.size(); ++idx) {
    auto u = gf::index_to_vector(idx, n, modulus);
    for (size_t i = 0; i < e.rows.size(); ++i) {
      const int c = u[static_cast<size_t>(e.pivots[i])];
      if (c)
        for (int t = 0; t < n; ++t) u[static_cast<size_t>(t)] = ((u[static_cast<size_t>(t)] - c * e.rows[i][static_cast<size_t>(t)]) % modulus + modulus) % modulus;
    }
    const uint64_t rep = gf::vector_to_index(u, modulus);
    coset[rep] += mass[idx];
    seen[rep] = 1;
  }
  const int free_dims = n - static_cast<int>(e.rows.size());
  if (free_dims == 0) return 0.0;  // one coset carrying all of the mass
  const double inv_n = std::pow(static_cast<double>(modulus), -free_dims);
  double tv = 0.0;
  for (size_t c = 0; c < coset.size(); ++c)
    if (seen[c]) tv += std::abs(inv_n - coset[c]);
  return 0.5 * tv;
}

std::vector<double> product_mass(int n, int modulus, const std::vector<double>& p) {
  const auto size = static_cast<uint64_t>(std::llround(std::pow(static_cast<double>(modulus), n)));
  std::vector<double> mass(size);
  for (uint64_t idx = 0; idx < size; ++idx) {
    double v = 1.0;
    for (int s : gf::index_to_vector(idx, n, modulus)) v *= p[static_cast<size_t>(s)];
    mass[idx] = v;
  }
  return mass;
}

}  // namespace

double soft_covering_tv(int n, int k, int modulus, const std::vector<double>& p, uint64_t seed, int num_codes) {
  check_inputs(n, modulus, p, num_codes);
  if (k < 0 || k > n) throw Error(ErrorKind::DomainError, "k outside [0, n]");
  const auto mass = product_mass(n, modulus, p);
  double total = 0.0;
  for (int c = 0; c < num_codes; ++c) {
    Rng rng = Rng::stream(seed, static_cast<uint64_t>(c));
    total += tv_for(full_rank_generator(n, modulus, rng), n, k, modulus, mass);
  }
  return total / num_codes;
}

std::vector<double> soft_covering_curve(int n, int modulus, const std::vector<double>& p, uint64_t seed, int num_codes) {
  check_inputs(n, modulus, p, num_codes);
  const auto mass = product_mass(n, modulus, p);
  std::vector<double> out(static_cast<size_t>(n) + 1, 0.0);
  for (int c = 0; c < num_codes; ++c) {
    Rng rng = Rng::stream(seed, static_cast<uint64_t>(c));
    const auto g = full_rank_generator(n, modulus, rng);
    for (int k = 0; k <= n; ++k) out[static_cast<size_t>(k)] += tv_for(g, n, k, modulus, mass);
  }
  for (auto& v : out) v /= num_codes;
  return out;
}

}  // namespace cqrl::mcsim
