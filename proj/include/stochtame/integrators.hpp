#pragma once

#include "stochtame/integrators/path_runner.hpp"
#include "stochtame/integrators/record.hpp"
#include "stochtame/integrators/stepper.hpp"
