// Command line entry point; the actual argument handling and subcommands
// live in resynth/cli.hpp.
#include <iostream>

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::cerr << "resynth: command line surface not wired up yet\n";
  return 2;
}
