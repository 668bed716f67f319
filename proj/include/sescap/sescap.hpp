#pragma once

// Umbrella header for the whole library.

#include "sescap/types.hpp"
#include "sescap/fft.hpp"
#include "sescap/grid.hpp"
#include "sescap/contour.hpp"
#include "sescap/potential.hpp"
#include "sescap/cap_operator.hpp"
#include "sescap/dc_field.hpp"
#include "sescap/basis.hpp"
#include "sescap/hamiltonian.hpp"
#include "sescap/boundary_aids.hpp"
#include "sescap/propagation.hpp"
#include "sescap/diagnostics.hpp"
#include "sescap/io.hpp"
#include "sescap/config.hpp"
#include "sescap/experiments.hpp"
