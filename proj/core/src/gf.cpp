#include "cqrl/gf.hpp"

#include <cmath>
#include <string>

#include "cqrl/errors.hpp"

namespace cqrl::gf {

bool is_supported_prime(int v) { return v == 2 || v == 3 || v == 5 || v == 7; }

void require_prime(int v) {
  if (!is_supported_prime(v)) throw Error(ErrorKind::NotPrime, "modulus " + std::to_string(v) + " not in {2,3,5,7}");
}

namespace {
int reduce(long v, int mod) {
  long r = v % mod;
  return static_cast<int>(r < 0 ? r + mod : r);
}
int inv_mod(int a, int mod) {
  for (int x = 1; x < mod; ++x)
    if ((a * x) % mod == 1) return x;
  throw Error(ErrorKind::DomainError, "zero has no inverse");
}
}  // namespace

FieldElem::FieldElem(int v, int mod) : value(0), modulus(mod) {
  require_prime(mod);
  value = reduce(v, mod);
}

FieldElem FieldElem::operator+(FieldElem o) const {
  if (o.modulus != modulus) throw Error(ErrorKind::IncompatiblePair, "moduli differ");
  return {value + o.value, modulus};
}
FieldElem FieldElem::operator-(FieldElem o) const {
  if (o.modulus != modulus) throw Error(ErrorKind::IncompatiblePair, "moduli differ");
  return {value - o.value, modulus};
}
FieldElem FieldElem::operator*(FieldElem o) const {
  if (o.modulus != modulus) throw Error(ErrorKind::IncompatiblePair, "moduli differ");
  return {value * o.value, modulus};
}
FieldElem FieldElem::inverse() const { return {inv_mod(value, modulus), modulus}; }

Matrix Matrix::top_rows(int r) const {
  Matrix out(r, cols);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < cols; ++j) out.at(i, j) = at(i, j);
  return out;
}

namespace {
// Row echelon form in place; returns rank.
int echelon(Matrix& m, int mod) {
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int piv = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.at(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    for (int j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(piv, j));
    const int inv = inv_mod(m.at(r, c), mod);
    for (int j = 0; j < m.cols; ++j) m.at(r, j) = m.at(r, j) * inv % mod;
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      const int f = m.at(i, c);
      for (int j = 0; j < m.cols; ++j) m.at(i, j) = reduce(m.at(i, j) - f * m.at(r, j), mod);
    }
    ++r;
  }
  return r;
}
}  // namespace

int rank(const Matrix& m, int modulus) {
  Matrix c = m;
  return echelon(c, modulus);
}

bool in_row_space(const Matrix& m, const Vector& v, int modulus) {
  if (static_cast<int>(v.size()) != m.cols) throw Error(ErrorKind::LengthMismatch, "vector length differs from matrix columns");
  Matrix aug(m.rows + 1, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
  for (int j = 0; j < m.cols; ++j) aug.at(m.rows, j) = reduce(v[static_cast<size_t>(j)], modulus);
  return rank(aug, modulus) == rank(m, modulus);
}

Vector add(const Vector& a, const Vector& b, int modulus) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "vector lengths differ");
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + b[i]) % modulus;
  return out;
}

Vector sub(const Vector& a, const Vector& b, int modulus) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "vector lengths differ");
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = reduce(a[i] - b[i], modulus);
  return out;
}

Vector vec_mat(const Vector& x, const Matrix& m, int modulus) {
  if (static_cast<int>(x.size()) != m.rows) throw Error(ErrorKind::LengthMismatch, "row vector length differs from matrix rows");
  Vector out(static_cast<size_t>(m.cols), 0);
  for (int i = 0; i < m.rows; ++i) {
    const int xi = x[static_cast<size_t>(i)];
    if (xi == 0) continue;
    for (int j = 0; j < m.cols; ++j) out[static_cast<size_t>(j)] += xi * m.at(i, j);
  }
  for (auto& v : out) v = reduce(v, modulus);
  return out;
}

void NestedCosetCode::validate() const {
  require_prime(modulus);
  if (n < 0 || k < 0 || l < 0) throw Error(ErrorKind::LengthMismatch, "negative code dimension");
  if (g_I.rows != k || g_I.cols != n || g_OI.rows != l || g_OI.cols != n || static_cast<int>(bias.size()) != n)
    throw Error(ErrorKind::LengthMismatch, "generator/bias shapes inconsistent with (n, k, l)");
  auto ok = [&](int v) { return v >= 0 && v < modulus; };
  for (int v : g_I.data) if (!ok(v)) throw Error(ErrorKind::DomainError, "g_I entry outside field");
  for (int v : g_OI.data) if (!ok(v)) throw Error(ErrorKind::DomainError, "g_OI entry outside field");
  for (int v : bias) if (!ok(v)) throw Error(ErrorKind::DomainError, "bias entry outside field");
}

double NestedCosetCode::rate() const { return n == 0 ? 0.0 : static_cast<double>(l) / n * std::log2(modulus); }

namespace {
uint64_t ipow(uint64_t b, int e, uint64_t cap) {
  uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > cap / b) return cap + 1;
    r *= b;
  }
  return r;
}
}  // namespace

uint64_t NestedCosetCode::coset_size() const { return ipow(static_cast<uint64_t>(modulus), k, uint64_t{1} << 62); }
uint64_t NestedCosetCode::message_count() const { return ipow(static_cast<uint64_t>(modulus), l, uint64_t{1} << 62); }

Vector codeword(const NestedCosetCode& code, const Vector& a, const Vector& m) {
  if (static_cast<int>(a.size()) != code.k || static_cast<int>(m.size()) != code.l)
    throw Error(ErrorKind::LengthMismatch, "index lengths differ from (k, l)");
  if (static_cast<int>(code.bias.size()) != code.n) throw Error(ErrorKind::LengthMismatch, "bias length differs from n");
  Vector u = code.bias;
  auto x = vec_mat(a, code.g_I, code.modulus);
  auto y = vec_mat(m, code.g_OI, code.modulus);
  for (int j = 0; j < code.n; ++j) u[j] = (u[j] + x[j] + y[j]) % code.modulus;
  return u;
}

Vector index_to_vector(uint64_t idx, int len, int modulus) {
  Vector v(static_cast<size_t>(len), 0);
  for (int i = len - 1; i >= 0; --i) {
    v[static_cast<size_t>(i)] = static_cast<int>(idx % static_cast<uint64_t>(modulus));
    idx /= static_cast<uint64_t>(modulus);
  }
  return v;
}

uint64_t vector_to_index(const Vector& v, int modulus) {
  uint64_t idx = 0;
  for (int x : v) idx = idx * static_cast<uint64_t>(modulus) + static_cast<uint64_t>(x);
  return idx;
}

std::vector<Vector> enumerate_coset(const NestedCosetCode& code, const Vector& m) {
  const uint64_t count = code.coset_size();
  if (count > enumeration_cap) throw Error(ErrorKind::TooLarge, "coset has more than 2^20 codewords");
  std::vector<Vector> out;
  out.reserve(count);
  const Vector base = codeword(code, Vector(static_cast<size_t>(code.k), 0), m);
  for (uint64_t i = 0; i < count; ++i) {
    auto a = index_to_vector(i, code.k, code.modulus);
    out.push_back(add(base, vec_mat(a, code.g_I, code.modulus), code.modulus));
  }
  return out;
}

namespace {
Matrix random_matrix(int r, int c, int mod, Rng& rng) {
  Matrix m(r, c);
  for (auto& v : m.data) v = static_cast<int>(rng.below(static_cast<uint64_t>(mod)));
  return m;
}
Vector random_vector(int n, int mod, Rng& rng) {
  Vector v(static_cast<size_t>(n));
  for (auto& x : v) x = static_cast<int>(rng.below(static_cast<uint64_t>(mod)));
  return v;
}
}  // namespace

NestedCosetCode random_nested_code(int n, int k, int l, int modulus, Rng& rng) {
  require_prime(modulus);
  if (n < 0 || k < 0 || l < 0) throw Error(ErrorKind::LengthMismatch, "negative code dimension");
  NestedCosetCode c;
  c.n = n;
  c.k = k;
  c.l = l;
  c.modulus = modulus;
  c.g_I = random_matrix(k, n, modulus, rng);
  c.g_OI = random_matrix(l, n, modulus, rng);
  c.bias = random_vector(n, modulus, rng);
  return c;
}

NestedCosetCode random_nested_code(int n, int k, int l, int modulus, uint64_t seed) {
  Rng rng(seed);
  return random_nested_code(n, k, l, modulus, rng);
}

void CodePair::validate() const {
  code2.validate();
  code3.validate();
  if (code2.modulus != code3.modulus) throw Error(ErrorKind::IncompatiblePair, "moduli differ");
  if (code2.n != code3.n) throw Error(ErrorKind::IncompatiblePair, "blocklengths differ");
  auto prefix = [](const Matrix& small, const Matrix& big) {
    for (int i = 0; i < small.rows; ++i)
      for (int j = 0; j < small.cols; ++j)
        if (small.at(i, j) != big.at(i, j)) return false;
    return true;
  };
  const bool i_ok = code2.k <= code3.k ? prefix(code2.g_I, code3.g_I) : prefix(code3.g_I, code2.g_I);
  const bool o_ok = code2.l <= code3.l ? prefix(code2.g_OI, code3.g_OI) : prefix(code3.g_OI, code2.g_OI);
  if (!i_ok || !o_ok) throw Error(ErrorKind::IncompatiblePair, "generator rows are not nested prefixes");
}

NestedCosetCode CodePair::sum_code() const {
  validate();
  NestedCosetCode s;
  s.n = code2.n;
  s.modulus = code2.modulus;
  s.k = std::max(code2.k, code3.k);
  s.l = std::max(code2.l, code3.l);
  s.g_I = code2.k >= code3.k ? code2.g_I : code3.g_I;
  s.g_OI = code2.l >= code3.l ? code2.g_OI : code3.g_OI;
  s.bias = add(code2.bias, code3.bias, s.modulus);
  return s;
}

CodePair random_code_pair(const CodePairParams& p, Rng& rng) {
  require_prime(p.modulus);
  const int kmax = std::max(p.k2, p.k3), lmax = std::max(p.l2, p.l3);
  Matrix gi = random_matrix(kmax, p.n, p.modulus, rng);
  Matrix go = random_matrix(lmax, p.n, p.modulus, rng);
  CodePair pair;
  auto fill = [&](NestedCosetCode& c, int k, int l) {
    c.n = p.n;
    c.k = k;
    c.l = l;
    c.modulus = p.modulus;
    c.g_I = gi.top_rows(k);
    c.g_OI = go.top_rows(l);
    c.bias = random_vector(p.n, p.modulus, rng);
  };
  fill(pair.code2, p.k2, p.l2);
  fill(pair.code3, p.k3, p.l3);
  return pair;
}

CodePair random_code_pair(const CodePairParams& p, uint64_t seed) {
  Rng rng(seed);
  return random_code_pair(p, rng);
}

Vector sum_codeword(const CodePair& pair, const Vector& a2, const Vector& m2, const Vector& a3,
                    const Vector& m3) {
  if (pair.code2.modulus != pair.code3.modulus) throw Error(ErrorKind::IncompatiblePair, "moduli differ");
  return add(codeword(pair.code2, a2, m2), codeword(pair.code3, a3, m3), pair.code2.modulus);
}

Vector sum_message(const CodePair& pair, const Vector& m2, const Vector& m3) {
  const int l = std::max(pair.code2.l, pair.code3.l);
  Vector s(static_cast<size_t>(l), 0);
  for (size_t i = 0; i < m2.size(); ++i) s[i] += m2[i];
  for (size_t i = 0; i < m3.size(); ++i) s[i] += m3[i];
  for (auto& v : s) v %= pair.code2.modulus;
  return s;
}

bool in_coset(const NestedCosetCode& code, const Vector& u, const Vector& m) {
  const Vector base = codeword(code, Vector(static_cast<size_t>(code.k), 0), m);
  return in_row_space(code.g_I, sub(u, base, code.modulus), code.modulus);
}

void to_json(nlohmann::json& j, const Matrix& m) {
  j = nlohmann::json{{"rows", m.rows}, {"cols", m.cols}, {"entries", m.data}};
}

void from_json(const nlohmann::json& j, Matrix& m) {
  m.rows = j.at("rows").get<int>();
  m.cols = j.at("cols").get<int>();
  m.data = j.at("entries").get<std::vector<int>>();
  if (m.data.size() != static_cast<size_t>(m.rows) * static_cast<size_t>(m.cols))
    throw Error(ErrorKind::ParseError, "matrix entry count differs from rows*cols");
}

void to_json(nlohmann::json& j, const NestedCosetCode& c) {
  j = nlohmann::json{{"modulus", c.modulus}, {"n", c.n}, {"k", c.k}, {"l", c.l},
                     {"g_I", c.g_I},         {"g_OI", c.g_OI}, {"bias", c.bias}};
}

void from_json(const nlohmann::json& j, NestedCosetCode& c) {
  c.modulus = j.at("modulus").get<int>();
  c.n = j.at("n").get<int>();
  c.k = j.at("k").get<int>();
  c.l = j.at("l").get<int>();
  j.at("g_I").get_to(c.g_I);
  j.at("g_OI").get_to(c.g_OI);
  c.bias = j.at("bias").get<Vector>();
  c.validate();
}

}  // namespace cqrl::gf
