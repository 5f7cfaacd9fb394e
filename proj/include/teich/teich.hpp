#pragma once

#include "teich/curves.hpp"
#include "teich/flat.hpp"
#include "teich/hyperbolic.hpp"
#include "teich/uniformize.hpp"
#include "teich/minima.hpp"
#include "teich/metric.hpp"
#include "teich/harness.hpp"
