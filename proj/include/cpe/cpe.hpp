#pragma once

#include "baseline.hpp"
#include "efficient_gap_elim.hpp"
#include "experiment.hpp"
#include "hard_instances.hpp"
#include "io.hpp"
#include "lower_bounds.hpp"
#include "lp_sample.hpp"
#include "meta_runner.hpp"
#include "naive_gap_elim.hpp"
