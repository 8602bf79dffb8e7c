#include <string>
#include <vector>

#include "stark/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stark::app::run_cli(args);
}
