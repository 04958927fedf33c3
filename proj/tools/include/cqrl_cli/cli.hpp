#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "cqrl/errors.hpp"

namespace cqrl::cli {

enum ExitCode : int { kOk = 0, kParse = 2, kConfig = 3, kBudget = 4, kVerification = 5 };

int exit_code_for(ErrorKind kind);

// Runs one command line (args[0] is the program name). Primary output goes to
// `out` unless --output is given; the run manifest goes to --manifest, to
// "<output>.manifest.json" when --output is set, and otherwise to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "deg:45" or a plain number in radians.
double parse_angle(const std::string& s);

// Parses "H(A,B|C)", "I(A;B)" or "I(A;B|C)"; names are classical registers or
// the quantum register's name.
struct Query {
  char kind = 'H';
  std::vector<std::string> a, b, c;
};
Query parse_query(const std::string& s);  // ParseError

// Example pipelines shared with the acceptance suite.
struct Ex2Params {
  double phi = 1.2;
  double delta2 = 0.15;
  double delta3 = 0.15;
  double tau = 0.125;
  bool scan = true;
  int denominator = 32;
  int max_aux = 4;
  int threads = 1;
};
nlohmann::json example_ex1(double delta1, double delta2, double delta3, double tau);
nlohmann::json example_ex2(const Ex2Params& p);
nlohmann::json example_ex3(double phi, double delta2, double delta3, double tau1, double tau2, double tau3);

}  // namespace cqrl::cli
