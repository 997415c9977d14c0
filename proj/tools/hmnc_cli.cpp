#include <iostream>

#include "hmnc/cli.hpp"

int main(int argc, char** argv) {
  hmnc::RunConfig cfg;
  try {
    cfg = hmnc::parse_args(argc, argv);
  } catch (const hmnc::UsageError& e) {
    (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
    return e.exit_code();
  }
  return hmnc::run(cfg, std::cout, std::cerr);
}
