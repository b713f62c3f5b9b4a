#pragma once

// Umbrella header for the numerical library. Config parsing (yaml-cpp) and
// file output are separate: dipolar/config_yaml.hpp, dipolar/io.hpp.

#include "dipolar/core.hpp"
#include "dipolar/lattice.hpp"
#include "dipolar/levels.hpp"
#include "dipolar/green.hpp"
#include "dipolar/hilbert.hpp"
#include "dipolar/ode.hpp"
#include "dipolar/lindblad.hpp"
#include "dipolar/full_model.hpp"
#include "dipolar/effective.hpp"
#include "dipolar/observables.hpp"
#include "dipolar/xy_model.hpp"
#include "dipolar/spinwave.hpp"
#include "dipolar/dtwa.hpp"
#include "dipolar/cumulant.hpp"
