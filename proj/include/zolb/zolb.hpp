// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "zolb/barrier.hpp"
#include "zolb/cli.hpp"
#include "zolb/config.hpp"
#include "zolb/core.hpp"
#include "zolb/estimator.hpp"
#include "zolb/io.hpp"
#include "zolb/oracle.hpp"
#include "zolb/problem.hpp"
#include "zolb/problems.hpp"
#include "zolb/runner.hpp"
#include "zolb/solver.hpp"
