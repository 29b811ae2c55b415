#include <iostream>

#include "musiclite_cli/app.hpp"

int main(int argc, char** argv) {
  return musiclite::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
