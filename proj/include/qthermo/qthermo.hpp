// Umbrella header.

#pragma once

#include "accounting.hpp"
#include "cli.hpp"
#include "core.hpp"
#include "cycles.hpp"
#include "dynamics.hpp"
#include "fluctuations.hpp"
#include "matrix2.hpp"
#include "report.hpp"
#include "state.hpp"
