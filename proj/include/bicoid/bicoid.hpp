#pragma once

// Umbrella header: a 1-D compartmental simulator of the Bicoid morphogen
// gradient with an exact stochastic engine, a deterministic mean-field
// reference, a discrete-time agent model and a grid-sweep calibration
// harness.

#include "bicoid/params.hpp"
#include "bicoid/trajectory.hpp"
#include "bicoid/rng.hpp"
#include "bicoid/ssa.hpp"
#include "bicoid/ode.hpp"
#include "bicoid/abm.hpp"
#include "bicoid/calibration.hpp"
#include "bicoid/config.hpp"
#include "bicoid/io.hpp"
