// Copyright 2026 The blobq Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
    return blobq::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
