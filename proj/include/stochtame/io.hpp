#pragma once

#include "stochtame/io/build.hpp"
#include "stochtame/io/config.hpp"
#include "stochtame/io/output.hpp"
