#pragma once

#include "padepoly/types.hpp"
#include "padepoly/polynomial.hpp"
#include "padepoly/refine.hpp"
#include "padepoly/explore.hpp"
#include "padepoly/ecp.hpp"
#include "padepoly/matpoly.hpp"
#include "padepoly/problem.hpp"
