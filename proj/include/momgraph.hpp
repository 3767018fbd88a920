#pragma once

#include "momgraph/errors.hpp"
#include "momgraph/rng.hpp"
#include "momgraph/parallel.hpp"
#include "momgraph/int128.hpp"
#include "momgraph/graph.hpp"
#include "momgraph/model.hpp"
#include "momgraph/sampler.hpp"
#include "momgraph/pattern.hpp"
#include "momgraph/counting.hpp"
#include "momgraph/paths.hpp"
#include "momgraph/wheel_count.hpp"
#include "momgraph/moments.hpp"
#include "momgraph/theory.hpp"
#include "momgraph/degrees.hpp"
#include "momgraph/stats.hpp"
#include "momgraph/bootstrap.hpp"
#include "momgraph/blockfit.hpp"
