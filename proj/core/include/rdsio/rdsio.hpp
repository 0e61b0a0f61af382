#pragma once

#include "rdsio/axioms.hpp"
#include "rdsio/compose.hpp"
#include "rdsio/discrete.hpp"
#include "rdsio/equilibrium.hpp"
#include "rdsio/expr.hpp"
#include "rdsio/linear.hpp"
#include "rdsio/monotone.hpp"
#include "rdsio/tempered.hpp"
