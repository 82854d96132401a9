/// @file nmhd.hpp
/// @brief Umbrella header.
#pragma once

#include "nmhd/error.hpp"
#include "nmhd/grid.hpp"
#include "nmhd/field.hpp"
#include "nmhd/spectral.hpp"
#include "nmhd/pseudo.hpp"
#include "nmhd/model_new.hpp"
#include "nmhd/model_classical.hpp"
#include "nmhd/timestep.hpp"
#include "nmhd/diagnostics.hpp"
#include "nmhd/galerkin.hpp"
#include "nmhd/verify.hpp"
#include "nmhd/config.hpp"
#include "nmhd/snapshot.hpp"
#include "nmhd/csv.hpp"
#include "nmhd/driver.hpp"
#include "nmhd/selfcheck.hpp"
