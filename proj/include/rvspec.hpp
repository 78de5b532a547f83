#pragma once

#include "rvspec/core_types.hpp"
#include "rvspec/csv.hpp"
#include "rvspec/error.hpp"
#include "rvspec/estimators.hpp"
#include "rvspec/experiments.hpp"
#include "rvspec/grouping.hpp"
#include "rvspec/numerics.hpp"
#include "rvspec/pipeline.hpp"
#include "rvspec/random.hpp"
#include "rvspec/simulation.hpp"
#include "rvspec/tuning.hpp"
