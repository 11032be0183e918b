#include <iostream>

#include "commands.hpp"
#include "config.hpp"
#include "que/errors.hpp"

int main(int argc, char** argv) {
  using namespace que::cli;
  ParseOutcome parsed = parse_command_line(argc, argv);
  if (!parsed.config) return parsed.exit_code;
  try {
    return run_command(*parsed.config, std::cerr);
  } catch (const que::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
