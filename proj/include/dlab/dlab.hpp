#pragma once

// Umbrella header for the whole library.

#include "dlab/bipartite_graph.hpp"
#include "dlab/divisors.hpp"
#include "dlab/energy.hpp"
#include "dlab/errors.hpp"
#include "dlab/experiments.hpp"
#include "dlab/gaps.hpp"
#include "dlab/graphs.hpp"
#include "dlab/incidence.hpp"
#include "dlab/intset.hpp"
#include "dlab/io.hpp"
#include "dlab/parallel.hpp"
#include "dlab/rational.hpp"
#include "dlab/rng.hpp"
#include "dlab/version.hpp"
