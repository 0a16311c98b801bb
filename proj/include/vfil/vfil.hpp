// Umbrella header.
#pragma once

#include "vfil/config.hpp"
#include "vfil/cutoff.hpp"
#include "vfil/duhamel.hpp"
#include "vfil/errors.hpp"
#include "vfil/fft.hpp"
#include "vfil/field.hpp"
#include "vfil/grid.hpp"
#include "vfil/io.hpp"
#include "vfil/params.hpp"
#include "vfil/pointvortex.hpp"
#include "vfil/profile.hpp"
#include "vfil/quadrature.hpp"
#include "vfil/schrodinger.hpp"
#include "vfil/suite.hpp"
#include "vfil/verify.hpp"
#include "vfil/xnorm.hpp"
