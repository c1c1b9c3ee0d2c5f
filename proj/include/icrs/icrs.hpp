#pragma once

#include "term.hpp"
#include "syntax.hpp"
#include "valuation.hpp"
#include "rules.hpp"
#include "matching.hpp"
#include "reduction.hpp"
#include "hypercollapsing.hpp"
