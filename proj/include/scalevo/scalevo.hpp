#pragma once

#include "scalevo/comparison.hpp"
#include "scalevo/complexity.hpp"
#include "scalevo/cost_model.hpp"
#include "scalevo/error.hpp"
#include "scalevo/extraction.hpp"
#include "scalevo/generator.hpp"
#include "scalevo/harmonicity.hpp"
#include "scalevo/interference.hpp"
#include "scalevo/io.hpp"
#include "scalevo/melody.hpp"
#include "scalevo/parallel.hpp"
#include "scalevo/rng.hpp"
#include "scalevo/scale.hpp"
#include "scalevo/score_table.hpp"
#include "scalevo/significance.hpp"
#include "scalevo/stats.hpp"
#include "scalevo/step_distribution.hpp"
#include "scalevo/weighting.hpp"
