#pragma once

#include "stochtame/control/control.hpp"
