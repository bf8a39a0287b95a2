#pragma once

#include "stlmon/errors.hpp"
#include "stlmon/feasible.hpp"
#include "stlmon/formula.hpp"
#include "stlmon/grid.hpp"
#include "stlmon/monitor.hpp"
#include "stlmon/oracle.hpp"
#include "stlmon/scenario.hpp"
#include "stlmon/system.hpp"
#include "stlmon/tree.hpp"
#include "stlmon/util.hpp"
#include "stlmon/vectors.hpp"
