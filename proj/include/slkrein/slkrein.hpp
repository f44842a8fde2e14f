#pragma once

#include "slkrein/bdm.hpp"
#include "slkrein/boundary.hpp"
#include "slkrein/errors.hpp"
#include "slkrein/json_io.hpp"
#include "slkrein/problem.hpp"
#include "slkrein/propagate.hpp"
#include "slkrein/quadrature.hpp"
#include "slkrein/shift.hpp"
#include "slkrein/spectra.hpp"
#include "slkrein/types.hpp"
#include "slkrein/vonneumann.hpp"
