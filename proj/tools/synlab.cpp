// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "synlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return synlab::cli::run(args);
}
