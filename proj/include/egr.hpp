#pragma once

#include "egr/backtest.hpp"
#include "egr/core.hpp"
#include "egr/dirichlet.hpp"
#include "egr/error.hpp"
#include "egr/info.hpp"
#include "egr/numeric.hpp"
#include "egr/optimize.hpp"
#include "egr/quadrature.hpp"
#include "egr/random.hpp"
#include "egr/simplex.hpp"
