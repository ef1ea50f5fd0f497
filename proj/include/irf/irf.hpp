#pragma once

#include "irf/covariance.hpp"
#include "irf/equivalence.hpp"
#include "irf/error.hpp"
#include "irf/kriging.hpp"
#include "irf/measure.hpp"
#include "irf/numeric.hpp"
#include "irf/parallel.hpp"
#include "irf/process.hpp"
#include "irf/spectral.hpp"
