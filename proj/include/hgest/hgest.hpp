#pragma once

#include "hgest/adversarial.hpp"
#include "hgest/bench.hpp"
#include "hgest/boosting.hpp"
#include "hgest/col.hpp"
#include "hgest/cost_model.hpp"
#include "hgest/errors.hpp"
#include "hgest/estimate.hpp"
#include "hgest/generators.hpp"
#include "hgest/hypergraph.hpp"
#include "hgest/math.hpp"
#include "hgest/oracle.hpp"
#include "hgest/rational.hpp"
#include "hgest/rng.hpp"
#include "hgest/sampling.hpp"
#include "hgest/uncol.hpp"
#include "hgest/vertex_set.hpp"
