#pragma once

#include "stochtame/verify/acceptance.hpp"
#include "stochtame/verify/oracles.hpp"
#include "stochtame/verify/structural.hpp"
#include "stochtame/verify/verify.hpp"
