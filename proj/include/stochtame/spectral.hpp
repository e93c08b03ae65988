#pragma once

#include "stochtame/spectral/fft.hpp"
#include "stochtame/spectral/projection.hpp"
#include "stochtame/spectral/random_field.hpp"
#include "stochtame/spectral/snapshot.hpp"
#include "stochtame/spectral/sobolev.hpp"
#include "stochtame/spectral/spectral_field.hpp"
#include "stochtame/spectral/torus_grid.hpp"
