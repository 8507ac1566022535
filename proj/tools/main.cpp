// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/cli.hpp"

int main(int argc, char** argv) { return sparsewb::cli::run(argc, argv); }
