#pragma once

#include "sfdm/analytic.hpp"
#include "sfdm/ball_assembly.hpp"
#include "sfdm/continuation.hpp"
#include "sfdm/cube_assembly.hpp"
#include "sfdm/errors.hpp"
#include "sfdm/fdm_oracle.hpp"
#include "sfdm/grid.hpp"
#include "sfdm/io.hpp"
#include "sfdm/newton.hpp"
#include "sfdm/parallel.hpp"
#include "sfdm/spline.hpp"
#include "sfdm/split_system.hpp"
#include "sfdm/stability.hpp"
#include "sfdm/symmetry_index.hpp"
