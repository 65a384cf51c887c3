#pragma once

#include "lsinv/distributions.hpp"
#include "lsinv/exact_engines.hpp"
#include "lsinv/harness.hpp"
#include "lsinv/optimizer.hpp"
#include "lsinv/p3_recursion.hpp"
#include "lsinv/pipeline.hpp"
#include "lsinv/policies.hpp"
#include "lsinv/random.hpp"
#include "lsinv/simulator.hpp"
