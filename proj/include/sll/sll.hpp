#pragma once

#include "sll/beliefs.hpp"
#include "sll/ergodicity.hpp"
#include "sll/errors.hpp"
#include "sll/graph.hpp"
#include "sll/hypothesis.hpp"
#include "sll/io.hpp"
#include "sll/matrix.hpp"
#include "sll/rng.hpp"
#include "sll/scenario.hpp"
#include "sll/simulation.hpp"
#include "sll/version.hpp"
#include "sll/weights.hpp"
