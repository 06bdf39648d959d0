// SPDX-License-Identifier: Apache-2.0
#include "merawav/cli.hpp"

int main(int argc, char** argv) { return merawav::run_cli(argc, argv); }
