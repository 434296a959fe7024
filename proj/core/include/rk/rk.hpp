#pragma once

#include "rk/analysis.hpp"
#include "rk/ensemble.hpp"
#include "rk/errors.hpp"
#include "rk/generators.hpp"
#include "rk/kaczmarz.hpp"
#include "rk/linalg.hpp"
#include "rk/matrix_io.hpp"
#include "rk/random.hpp"
#include "rk/report.hpp"
