#pragma once

#include "stochtame/experiments/audit.hpp"
#include "stochtame/experiments/ensemble.hpp"
#include "stochtame/experiments/initial.hpp"
#include "stochtame/experiments/reports.hpp"
#include "stochtame/experiments/sde_studies.hpp"
#include "stochtame/experiments/statistics.hpp"
