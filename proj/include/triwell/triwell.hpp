#pragma once

#include "triwell/types.hpp"
#include "triwell/secular.hpp"
#include "triwell/wavefunction.hpp"
#include "triwell/modes.hpp"
#include "triwell/spectra.hpp"
#include "triwell/ep3.hpp"
#include "triwell/dynamics.hpp"
#include "triwell/waveguide.hpp"
#include "triwell/io.hpp"
