#pragma once

#include "stochtame/models/drift_operator.hpp"
#include "stochtame/models/kernels.hpp"
