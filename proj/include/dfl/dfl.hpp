#pragma once

#include "dfl/core.hpp"
#include "dfl/datagen.hpp"
#include "dfl/dataset.hpp"
#include "dfl/grid_shortest_path.hpp"
#include "dfl/harness.hpp"
#include "dfl/knapsack.hpp"
#include "dfl/losses.hpp"
#include "dfl/metrics.hpp"
#include "dfl/oracle.hpp"
#include "dfl/predictor.hpp"
#include "dfl/random.hpp"
#include "dfl/simplex.hpp"
#include "dfl/train.hpp"
#include "dfl/tsp.hpp"
#include "dfl/worker_pool.hpp"
