#pragma once

#include "pvm/csv.hpp"
#include "pvm/dynamics.hpp"
#include "pvm/economy.hpp"
#include "pvm/hyperbolic.hpp"
#include "pvm/multiplier.hpp"
#include "pvm/predictions.hpp"
#include "pvm/sensitivity.hpp"
#include "pvm/series.hpp"
#include "pvm/specfun.hpp"
