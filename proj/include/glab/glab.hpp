#pragma once

#include "glab/config.hpp"
#include "glab/csv.hpp"
#include "glab/decomposition.hpp"
#include "glab/digest.hpp"
#include "glab/error.hpp"
#include "glab/experiment.hpp"
#include "glab/fluctuation.hpp"
#include "glab/lattice.hpp"
#include "glab/lcs.hpp"
#include "glab/oracle.hpp"
#include "glab/parallel.hpp"
#include "glab/passage.hpp"
#include "glab/rng.hpp"
#include "glab/shape.hpp"
#include "glab/stats.hpp"
#include "glab/suites.hpp"
#include "glab/svg.hpp"
