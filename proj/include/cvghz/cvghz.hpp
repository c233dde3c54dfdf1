#pragma once

#include "cvghz/channels.hpp"
#include "cvghz/criteria.hpp"
#include "cvghz/fit.hpp"
#include "cvghz/gaussian.hpp"
#include "cvghz/homodyne.hpp"
#include "cvghz/network.hpp"
#include "cvghz/optimize.hpp"
#include "cvghz/tolerances.hpp"
