#pragma once

#include "cavity.hpp"
#include "concurrence.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "diamond.hpp"
#include "errors.hpp"
#include "lindblad.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "svg.hpp"
#include "sweep.hpp"
#include "thermo.hpp"
#include "trajectories.hpp"
