#include <string>
#include <vector>

#include "qms/cli.hpp"

int main(int argc, char** argv) {
  return qms::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
