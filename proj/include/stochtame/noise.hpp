#pragma once

#include "stochtame/noise/martingale.hpp"
#include "stochtame/noise/noise.hpp"
#include "stochtame/noise/sde_lab.hpp"
#include "stochtame/noise/wiener.hpp"
