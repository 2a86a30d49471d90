#pragma once

#include "constants.hpp"
#include "example.hpp"
#include "metric.hpp"
#include "newton.hpp"
#include "oracles.hpp"
#include "projective.hpp"
#include "supports.hpp"
#include "tracker.hpp"
