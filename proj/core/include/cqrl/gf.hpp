#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

#include "cqrl/rng.hpp"

namespace cqrl::gf {

// Supported prime moduli.
bool is_supported_prime(int v);
void require_prime(int v);  // NotPrime

struct FieldElem {
  int value = 0;
  int modulus = 2;

  FieldElem() = default;
  FieldElem(int v, int mod);  // reduces v, NotPrime for unsupported moduli

  FieldElem operator+(FieldElem o) const;
  FieldElem operator-(FieldElem o) const;
  FieldElem operator*(FieldElem o) const;
  FieldElem inverse() const;  // DomainError for 0
  bool operator==(const FieldElem&) const = default;
};

using Vector = std::vector<int>;

// Dense row-major matrix over F_υ; entries kept in [0, υ).
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0) {}
  int& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  int at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  Matrix top_rows(int r) const;
  bool operator==(const Matrix&) const = default;
};

int rank(const Matrix& m, int modulus);
bool in_row_space(const Matrix& m, const Vector& v, int modulus);
Vector add(const Vector& a, const Vector& b, int modulus);
Vector sub(const Vector& a, const Vector& b, int modulus);
// x·M (row vector times matrix); LengthMismatch unless x.size() == M.rows.
Vector vec_mat(const Vector& x, const Matrix& m, int modulus);

struct NestedCosetCode {
  int n = 0;
  int k = 0;
  int l = 0;
  int modulus = 2;
  Matrix g_I;   // k × n
  Matrix g_OI;  // l × n
  Vector bias;  // length n

  void validate() const;
  double rate() const;  // (l / n) log₂ υ
  uint64_t coset_size() const;
  uint64_t message_count() const;
};

// Enumeration limit for cosets (multiset size υ^k).
constexpr uint64_t enumeration_cap = uint64_t{1} << 20;

// u(a, m) = a·g_I ⊕ m·g_OI ⊕ b.
Vector codeword(const NestedCosetCode& code, const Vector& a, const Vector& m);

// All υ^k codewords of coset m, index a in lexicographic order (a₀ slowest).
// Singular g_I yields repeated codewords; they are kept so counts stay υ^k.
std::vector<Vector> enumerate_coset(const NestedCosetCode& code, const Vector& m);

// Index vectors ↔ integers, digit 0 most significant.
Vector index_to_vector(uint64_t idx, int len, int modulus);
uint64_t vector_to_index(const Vector& v, int modulus);

NestedCosetCode random_nested_code(int n, int k, int l, int modulus, uint64_t seed);
NestedCosetCode random_nested_code(int n, int k, int l, int modulus, Rng& rng);

// Two codes over one field whose generator rows are prefixes of a common
// pair of matrices: g_I of the smaller is the first rows of the larger's g_I,
// likewise g_OI.
struct CodePair {
  NestedCosetCode code2;
  NestedCosetCode code3;

  void validate() const;  // IncompatiblePair
  // Code with k = max k, l = max l, the longer generators, bias b₂ ⊕ b₃: the
  // sums u₂ ⊕ u₃ fill its cosets.
  NestedCosetCode sum_code() const;
};

struct CodePairParams {
  int n = 0;
  int k2 = 0, l2 = 0;
  int k3 = 0, l3 = 0;
  int modulus = 2;
};

CodePair random_code_pair(const CodePairParams& p, uint64_t seed);
CodePair random_code_pair(const CodePairParams& p, Rng& rng);

Vector sum_codeword(const CodePair& pair, const Vector& a2, const Vector& m2, const Vector& a3,
                    const Vector& m3);
// m₂ ⊕ m₃ with the shorter message zero-padded to the sum code's l.
Vector sum_message(const CodePair& pair, const Vector& m2, const Vector& m3);
bool in_coset(const NestedCosetCode& code, const Vector& u, const Vector& m);

void to_json(nlohmann::json& j, const Matrix& m);
void from_json(const nlohmann::json& j, Matrix& m);
void to_json(nlohmann::json& j, const NestedCosetCode& c);
void from_json(const nlohmann::json& j, NestedCosetCode& c);

}  // namespace cqrl::gf
