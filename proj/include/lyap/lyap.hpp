#pragma once

#include "lyap/analysis.hpp"
#include "lyap/ensemble.hpp"
#include "lyap/errors.hpp"
#include "lyap/extended_real.hpp"
#include "lyap/graph.hpp"
#include "lyap/markov_design.hpp"
#include "lyap/optimize.hpp"
#include "lyap/reduction.hpp"
#include "lyap/rng.hpp"
#include "lyap/simplex.hpp"
#include "lyap/simulate.hpp"
#include "lyap/special_functions.hpp"
