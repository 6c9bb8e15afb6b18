#pragma once

#include "calculus.hpp"
#include "canonical.hpp"
#include "decoration.hpp"
#include "enumerate.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "graph.hpp"
#include "json_io.hpp"
#include "rational.hpp"
#include "semigroup.hpp"
#include "strata.hpp"
