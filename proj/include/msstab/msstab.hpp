#pragma once

#include "msstab/errors.hpp"
#include "msstab/io.hpp"
#include "msstab/polystab.hpp"
#include "msstab/random.hpp"
#include "msstab/region.hpp"
#include "msstab/scalar_stability.hpp"
#include "msstab/schemes.hpp"
#include "msstab/simulate.hpp"
#include "msstab/system_stability.hpp"
#include "msstab/verdict.hpp"
