#pragma once

#include "eggp/benchmarks.hpp"
#include "eggp/circuit_graph.hpp"
#include "eggp/evolution.hpp"
#include "eggp/experiment.hpp"
#include "eggp/mutation.hpp"
#include "eggp/rewrites.hpp"
#include "eggp/semantics.hpp"
#include "eggp/stats.hpp"
