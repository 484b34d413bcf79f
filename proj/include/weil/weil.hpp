#pragma once

// Umbrella header.

#include "weil/error.hpp"
#include "weil/random.hpp"
#include "weil/algebra.hpp"
#include "weil/linalg.hpp"
#include "weil/expr.hpp"
#include "weil/parse.hpp"
#include "weil/eval.hpp"
#include "weil/lift.hpp"
#include "weil/report.hpp"
#include "weil/poisson.hpp"
#include "weil/symplectic.hpp"
