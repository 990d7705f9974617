#pragma once

#include "levyconc/error.hpp"
#include "levyconc/levy_measure.hpp"
#include "levyconc/numerics.hpp"
#include "levyconc/rate_functions.hpp"
#include "levyconc/sampler.hpp"
#include "levyconc/serialization.hpp"
#include "levyconc/verification.hpp"
