#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "cqrl/errors.hpp"
#include "cqrl/tolerances.hpp"
#include "cqrl_cli/cli.hpp"

int main(int argc, char** argv) {
  if (const char* spec = std::getenv("CQRL_TOL")) {
    try {
      cqrl::set_tolerances(cqrl::parse_tolerances(spec));
    } catch (const cqrl::Error& e) {
      std::cerr << "CQRL_TOL: " << e.what() << "\n";
      return cqrl::cli::kParse;
    }
  }
  return cqrl::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
