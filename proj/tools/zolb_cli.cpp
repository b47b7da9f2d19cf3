// SPDX-License-Identifier: Apache-2.0
#include "zolb/cli.hpp"

int main(int argc, char** argv) { return zolb::cli_main(argc, argv); }
