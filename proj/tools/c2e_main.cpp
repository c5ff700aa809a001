// Copyright 2026 the c2esim authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "c2e/cli.hpp"

int main(int argc, char** argv) {
    return c2e::cli::run_cli(argc, argv, std::cout, std::cerr);
}
