#pragma once

#include "ltgen/analytic.hpp"
#include "ltgen/enumerate.hpp"
#include "ltgen/parallel_search.hpp"
#include "ltgen/sampler.hpp"
#include "ltgen/term.hpp"
#include "ltgen/type_system.hpp"
