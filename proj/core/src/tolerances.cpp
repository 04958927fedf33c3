#include "cqrl/tolerances.hpp"

#include <cstdlib>
#include <sstream>
#include <string>

#include "cqrl/errors.hpp"

namespace cqrl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownRegister: return "UnknownRegister";
    case ErrorKind::OverlappingQueries: return "OverlappingQueries";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::IncompatiblePair: return "IncompatiblePair";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::Not3to1: return "Not3to1";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ZeroMassCoset: return "ZeroMassCoset";
    case ErrorKind::NotUnit: return "NotUnit";
    case ErrorKind::DimOverflow: return "DimOverflow";
    case ErrorKind::InvalidOperands: return "InvalidOperands";
    case ErrorKind::DegenerateEnsemble: return "DegenerateEnsemble";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {
Tolerances& table() {
  static Tolerances t;
  return t;
}
}  // namespace

const Tolerances& tolerances() { return table(); }
void set_tolerances(const Tolerances& t) { table() = t; }

Tolerances parse_tolerances(const char* spec) {
  Tolerances t;
  if (spec == nullptr) return t;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "tolerance entry without '=': " + item);
    std::string key = item.substr(0, eq);
    char* end = nullptr;
    double v = std::strtod(item.c_str() + eq + 1, &end);
    if (end == item.c_str() + eq + 1 || *end != '\0' || !(v > 0))
      throw Error(ErrorKind::ParseError, "bad tolerance value: " + item);
    if (key == "all") {
      t.herm = t.psd = t.trace = t.prob = t.info = t.rate = t.commute = v;
    } else if (key == "herm") t.herm = v;
    else if (key == "psd") t.psd = v;
    else if (key == "trace") t.trace = v;
    else if (key == "prob") t.prob = v;
    else if (key == "info") t.info = v;
    else if (key == "eig") t.eig = v;
    else if (key == "eig_floor") t.eig_floor = v;
    else if (key == "rate") t.rate = v;
    else if (key == "lp_residual") t.lp_residual = v;
    else if (key == "commute") t.commute = v;
    else throw Error(ErrorKind::ParseError, "unknown tolerance key: " + key);
  }
  return t;
}

}  // namespace cqrl
