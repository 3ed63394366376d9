// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  return sskernel::cli::run(std::vector<std::string>(argv, argv + argc));
}
