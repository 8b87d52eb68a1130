// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "restorelab/cli.h"

int main(int argc, char** argv) { return restorelab::run_cli(argc, argv, std::cout, std::cerr); }
