// Copyright 2026 The epr-finite Authors
// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>
#include <vector>

#include "epr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return epr::cli::run(std::move(args), std::cout, std::cerr);
}
